//! Exact quadratic irrationals `(p + q*sqrt(d)) / r`.
//!
//! Values are always held in canonical form: `d` squarefree, `r > 0`,
//! `gcd(p, q, r) = 1` and `q != 0`. Two values are equal exactly when their
//! fields are equal, so `PartialEq` is structural.
//!
//! Imaginary values `(p + q*sqrt(-d)) / r` are carried formally with
//! [`Kind::Imaginary`]; they support conjugation, trace, norm and the Möbius
//! action but have no ordering and no continued fraction.

mod parse;
mod sign;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modgroup::Matrix2Z;

pub use sign::{sign_of_surd, sign_of_two_surds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Real,
    Imaginary,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: BigInt,
    kind: Kind,
}

/// Primitive integral quadratic `a*x^2 + b*x + c` with `a > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// Splits `n > 0` as `s^2 * core` with `core` squarefree.
pub fn square_decompose(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    if let Some(small) = n.to_u64() {
        let (s, core) = square_decompose_u64(small);
        return (BigInt::from(s), BigInt::from(core));
    }
    let mut core = n.clone();
    let mut s = BigInt::one();
    let mut i = BigInt::from(2u32);
    while &i * &i <= core {
        let sq = &i * &i;
        while (&core % &sq).is_zero() {
            core /= &sq;
            s *= &i;
        }
        i += 1u32;
    }
    (s, core)
}

fn square_decompose_u64(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0u32;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, core * n)
}

pub fn is_squarefree(n: &BigInt) -> bool {
    n.is_positive() && square_decompose(n).0.is_one()
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let s = n.sqrt();
        &s * &s == *n
    }
}

impl QuadraticIrrational {
    /// Canonical form of the real value `(p + q*sqrt(d)) / r`.
    pub fn canonicalize(p: BigInt, q: BigInt, r: BigInt, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::InvalidRadicand(d.to_string()));
        }
        Self::build(p, q, r, d, Kind::Real)
    }

    /// Canonical form of the formal value `(p + q*sqrt(-d)) / r`, `d >= 1`.
    pub fn canonicalize_imaginary(p: BigInt, q: BigInt, r: BigInt, d: BigInt) -> Result<Self> {
        if !d.is_positive() {
            return Err(Error::InvalidRadicand(d.to_string()));
        }
        Self::build(p, q, r, d, Kind::Imaginary)
    }

    pub fn from_ints(p: i64, q: i64, r: i64, d: i64) -> Result<Self> {
        Self::canonicalize(p.into(), q.into(), r.into(), d.into())
    }

    /// `sqrt(d)` for a positive non-square `d`.
    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self> {
        Self::canonicalize(BigInt::zero(), BigInt::one(), BigInt::one(), d.into())
    }

    fn build(p: BigInt, mut q: BigInt, r: BigInt, d: BigInt, kind: Kind) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if q.is_zero() || d.is_zero() {
            return Err(Error::RationalValue);
        }
        let (s, core) = square_decompose(&d);
        q *= s;
        if kind == Kind::Real && core.is_one() {
            return Err(Error::RationalValue);
        }
        let (mut p, mut q, mut r) = if r.is_negative() {
            (-p, -q, -r)
        } else {
            (p, q, r)
        };
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Ok(Self {
            p,
            q,
            r,
            d: core,
            kind,
        })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// The squarefree radicand, always positive.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.kind == Kind::Real
    }

    /// `d` for real values, `-d` for imaginary ones: the square of the surd.
    pub fn signed_radicand(&self) -> BigInt {
        match self.kind {
            Kind::Real => self.d.clone(),
            Kind::Imaginary => -&self.d,
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            q: -&self.q,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            p: -&self.p,
            q: -&self.q,
            ..self.clone()
        }
    }

    /// Primitive integral minimal polynomial.
    pub fn minpoly(&self) -> IntPoly2 {
        // (r x - p)^2 = q^2 * delta
        let a = &self.r * &self.r;
        let b = -(BigInt::from(2) * &self.p * &self.r);
        let c = &self.p * &self.p - &self.q * &self.q * self.signed_radicand();
        IntPoly2::primitive(a, b, c)
    }

    /// `(x + conj x, x * conj x)`.
    pub fn trace_norm(&self) -> (BigRational, BigRational) {
        let trace = BigRational::new(BigInt::from(2) * &self.p, self.r.clone());
        let num = &self.p * &self.p - &self.q * &self.q * self.signed_radicand();
        let norm = BigRational::new(num, &self.r * &self.r);
        (trace, norm)
    }

    /// `(a x + b) / (c x + d)`.
    pub fn mobius_apply(&self, m: &Matrix2Z) -> Result<Self> {
        if m.c.is_zero() && m.d.is_zero() {
            return Err(Error::DegenerateMatrix);
        }
        let delta = self.signed_radicand();
        let n1 = &m.a * &self.p + &m.b * &self.r;
        let n2 = &m.a * &self.q;
        let m1 = &m.c * &self.p + &m.d * &self.r;
        let m2 = &m.c * &self.q;
        let den = &m1 * &m1 - &m2 * &m2 * &delta;
        let p = &n1 * &m1 - &n2 * &m2 * &delta;
        let q = &n2 * &m1 - &n1 * &m2;
        Self::build(p, q, den, self.d.clone(), self.kind)
    }

    /// `x + k` for an integer `k`.
    pub fn add_int(&self, k: &BigInt) -> Self {
        Self {
            p: &self.p + k * &self.r,
            ..self.clone()
        }
    }

    /// `k * x` for a nonzero rational `k`.
    pub fn scale(&self, k: &BigRational) -> Result<Self> {
        Self::build(
            &self.p * k.numer(),
            &self.q * k.numer(),
            &self.r * k.denom(),
            self.d.clone(),
            self.kind,
        )
    }

    pub fn recip(&self) -> Self {
        self.mobius_apply(&Matrix2Z::from_i64(0, 1, 1, 0))
            .expect("reciprocal of an irrational is irrational")
    }

    /// Sum with another value over the same field; `Ok(None)` means the sum is rational.
    pub fn checked_add(&self, other: &Self) -> Result<Option<Self>> {
        self.same_field(other)?;
        let p = &self.p * &other.r + &other.p * &self.r;
        let q = &self.q * &other.r + &other.q * &self.r;
        let r = &self.r * &other.r;
        match Self::build(p, q, r, self.d.clone(), self.kind) {
            Err(Error::RationalValue) => Ok(None),
            other => other.map(Some),
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.kind != other.kind {
            return Err(Error::Parse(format!(
                "values {self} and {other} live in different quadratic fields"
            )));
        }
        Ok(())
    }

    /// Exact `floor`, real values only.
    pub fn floor(&self) -> Result<BigInt> {
        self.require_real()?;
        // (p + s*sqrt(n)) / r with n = q^2 d not a square and m = isqrt(n):
        // k <= value  <=>  k r <= p + m        (s > 0)
        //             <=>  k r <= p - m - 1    (s < 0)
        let n = &self.q * &self.q * &self.d;
        let m = n.sqrt();
        let num = if self.q.is_positive() {
            &self.p + &m
        } else {
            &self.p - &m - 1
        };
        Ok(num.div_floor(&self.r))
    }

    fn require_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            Err(Error::NotReal)
        }
    }

    /// Exact order between two real quadratic irrationals (any radicands).
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        self.require_real()?;
        other.require_real()?;
        // r1 r2 (x - y) = (p1 r2 - p2 r1) + q1 r2 sqrt(d1) - q2 r1 sqrt(d2)
        let a = &self.p * &other.r - &other.p * &self.r;
        let b = &self.q * &other.r;
        let c = -(&other.q * &self.r);
        Ok(sign_of_two_surds(&a, &b, &self.d, &c, &other.d))
    }

    pub fn compare_rational(&self, other: &BigRational) -> Result<Ordering> {
        self.require_real()?;
        let (s, t) = (other.numer(), other.denom());
        let a = &self.p * t - s * &self.r;
        let b = &self.q * t;
        Ok(sign_of_surd(&a, &b, &self.d))
    }

    /// Approximate value; for display and sampling only.
    pub fn to_f64(&self) -> f64 {
        let sign = if self.is_real() { 1.0 } else { 0.0 };
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        (p + sign * q * d.sqrt()) / r
    }
}

impl IntPoly2 {
    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(a: BigInt, b: BigInt, c: BigInt) -> Self {
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = if g.is_zero() {
            (a, b, c)
        } else {
            (a / &g, b / &g, c / &g)
        };
        if a.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// Root `(-b + sign*sqrt(disc)) / 2a`; `plus` selects the `+` radical.
    pub fn root(&self, plus: bool) -> Result<QuadraticIrrational> {
        if self.a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let disc = self.discriminant();
        let q = if plus { BigInt::one() } else { -BigInt::one() };
        let r = BigInt::from(2) * &self.a;
        if disc.is_negative() {
            QuadraticIrrational::canonicalize_imaginary(-&self.b, q, r, -disc)
        } else {
            QuadraticIrrational::canonicalize(-&self.b, q, r, disc)
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        a * x * x + b * x + c
    }
}

impl fmt::Display for IntPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x^2 {:+}x {:+}", self.a, self.b, self.c)
    }
}

impl Serialize for QuadraticIrrational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadraticIrrational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qi(p: i64, q: i64, r: i64, d: i64) -> QuadraticIrrational {
        QuadraticIrrational::from_ints(p, q, r, d).unwrap()
    }

    fn parts(x: &QuadraticIrrational) -> (i64, i64, i64, i64) {
        (
            x.p().to_i64().unwrap(),
            x.q().to_i64().unwrap(),
            x.r().to_i64().unwrap(),
            x.radicand().to_i64().unwrap(),
        )
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(parts(&qi(0, 2, 1, 8)), (0, 4, 1, 2));
        assert_eq!(parts(&qi(1, 1, 2, 5)), (1, 1, 2, 5));
        assert_eq!(parts(&qi(2, -2, 4, 18)), (1, -3, 2, 2));
        assert_eq!(parts(&qi(3, 1, -2, 5)), (-3, -1, 2, 5));
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(
            QuadraticIrrational::from_ints(1, 2, 1, 9),
            Err(Error::RationalValue)
        );
        assert_eq!(
            QuadraticIrrational::from_ints(1, 0, 1, 2),
            Err(Error::RationalValue)
        );
        assert_eq!(
            QuadraticIrrational::from_ints(1, 1, 0, 2),
            Err(Error::DivisionByZero)
        );
        assert!(matches!(
            QuadraticIrrational::from_ints(1, 1, 1, -2),
            Err(Error::InvalidRadicand(_))
        ));
    }

    #[test]
    fn square_decompose_examples() {
        let (s, c) = square_decompose(&BigInt::from(72));
        assert_eq!((s, c), (BigInt::from(6), BigInt::from(2)));
        let (s, c) = square_decompose(&(BigInt::from(1u64 << 40) * 49u32 * 3u32));
        assert_eq!(s, BigInt::from(7u64 << 20));
        assert_eq!(c, BigInt::from(3));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(qi(1, 1, 2, 5).conjugate(), qi(1, -1, 2, 5));
        assert_eq!(qi(0, 1, 1, 2).conjugate(), qi(0, -1, 1, 2));
        let x = qi(3, 2, 5, 7);
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn minpoly_examples() {
        let mp = |x: &QuadraticIrrational| {
            let m = x.minpoly();
            (
                m.a.to_i64().unwrap(),
                m.b.to_i64().unwrap(),
                m.c.to_i64().unwrap(),
            )
        };
        assert_eq!(mp(&qi(1, 1, 2, 5)), (1, -1, -1));
        assert_eq!(mp(&qi(0, 1, 1, 2)), (1, 0, -2));
        assert_eq!(mp(&qi(1, 3, 2, 2)), (4, -4, -17));
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(qi(1, 1, 2, 5).trace_norm(), (rat(1, 1), rat(-1, 1)));
        assert_eq!(qi(0, 1, 1, 2).trace_norm(), (rat(0, 1), rat(-2, 1)));
        let i5 =
            QuadraticIrrational::canonicalize_imaginary(0.into(), 1.into(), 1.into(), 5.into())
                .unwrap();
        assert_eq!(i5.trace_norm(), (rat(0, 1), rat(5, 1)));
    }

    #[test]
    fn mobius_examples() {
        let phi = qi(1, 1, 2, 5);
        assert_eq!(phi.mobius_apply(&Matrix2Z::identity()).unwrap(), phi);
        assert_eq!(
            phi.mobius_apply(&Matrix2Z::from_i64(2, 1, 1, 1)).unwrap(),
            phi
        );
        let s2 = qi(0, 1, 1, 2);
        assert_eq!(
            s2.mobius_apply(&Matrix2Z::from_i64(1, 1, 0, 1)).unwrap(),
            qi(1, 1, 1, 2)
        );
        assert_eq!(
            s2.mobius_apply(&Matrix2Z::from_i64(1, 1, 0, 0)),
            Err(Error::DegenerateMatrix)
        );
        assert_eq!(
            s2.mobius_apply(&Matrix2Z::from_i64(2, 4, 1, 2)),
            Err(Error::RationalValue)
        );
    }

    #[test]
    fn compare_examples() {
        let s2 = qi(0, 1, 1, 2);
        let phi = qi(1, 1, 2, 5);
        assert_eq!(s2.compare_rational(&rat(1, 1)).unwrap(), Ordering::Greater);
        assert_eq!(phi.compare_rational(&rat(8, 5)).unwrap(), Ordering::Greater);
        assert_eq!(phi.compare(&phi).unwrap(), Ordering::Equal);
        assert_eq!(s2.compare(&qi(0, 1, 1, 3)).unwrap(), Ordering::Less);
        assert_eq!(
            qi(1, 1, 1, 2).compare(&qi(0, 1, 1, 3)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            qi(-1, 2, 1, 2).compare(&qi(0, 1, 1, 3)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn floor_examples() {
        assert_eq!(qi(1, 1, 2, 5).floor().unwrap(), BigInt::from(1));
        assert_eq!(qi(1, -1, 2, 5).floor().unwrap(), BigInt::from(-1));
        assert_eq!(qi(0, -1, 1, 2).floor().unwrap(), BigInt::from(-2));
        assert_eq!(qi(0, 1, 7, 2).floor().unwrap(), BigInt::from(0));
        assert_eq!(qi(0, 7, 1, 7).floor().unwrap(), BigInt::from(18));
    }

    #[test]
    fn imaginary_has_no_order() {
        let i = QuadraticIrrational::canonicalize_imaginary(0.into(), 1.into(), 1.into(), 1.into())
            .unwrap();
        assert_eq!(i.floor(), Err(Error::NotReal));
        assert_eq!(i.compare(&i), Err(Error::NotReal));
    }

    #[test]
    fn poly_root_recovers_value() {
        let x = qi(1, 3, 2, 2);
        let mp = x.minpoly();
        let roots = [mp.root(true).unwrap(), mp.root(false).unwrap()];
        assert!(roots.contains(&x) && roots.contains(&x.conjugate()));
    }

    fn arb_qi() -> impl Strategy<Value = QuadraticIrrational> {
        (-50i64..50, -20i64..20, 1i64..30, 2i64..60).prop_filter_map("rational", |(p, q, r, d)| {
            QuadraticIrrational::from_ints(p, q, r, d).ok()
        })
    }

    fn arb_unimodular() -> impl Strategy<Value = Matrix2Z> {
        proptest::collection::vec((0u8..3, -4i64..5), 1..6).prop_map(|steps| {
            steps.into_iter().fold(Matrix2Z::identity(), |acc, (g, k)| {
                let m = match g {
                    0 => Matrix2Z::from_i64(1, k, 0, 1),
                    1 => Matrix2Z::from_i64(1, 0, k, 1),
                    _ => Matrix2Z::from_i64(0, 1, 1, 0),
                };
                acc.mul(&m)
            })
        })
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(p in -100i64..100, q in -50i64..50, r in -40i64..40, d in 2i64..200) {
            if let Ok(x) = QuadraticIrrational::from_ints(p, q, r, d) {
                let again = QuadraticIrrational::canonicalize(
                    x.p().clone(), x.q().clone(), x.r().clone(), x.radicand().clone()).unwrap();
                prop_assert_eq!(again, x);
            }
        }

        #[test]
        fn trace_norm_matches_minpoly(x in arb_qi()) {
            let (t, n) = x.trace_norm();
            let mp = x.minpoly();
            prop_assert_eq!(t, BigRational::new(-mp.b.clone(), mp.a.clone()));
            prop_assert_eq!(n, BigRational::new(mp.c.clone(), mp.a.clone()));
            prop_assert!(mp.discriminant().is_positive());
            prop_assert_eq!(mp.a.gcd(&mp.b).gcd(&mp.c), BigInt::one());
        }

        #[test]
        fn conjugate_sum_and_product_are_rational(x in arb_qi()) {
            prop_assert_eq!(x.checked_add(&x.conjugate()).unwrap(), None);
            prop_assert_eq!(x.conjugate().conjugate(), x);
        }

        #[test]
        fn mobius_action_is_functorial(x in arb_qi(), m1 in arb_unimodular(), m2 in arb_unimodular()) {
            let lhs = x.mobius_apply(&m1.mul(&m2)).unwrap();
            let rhs = x.mobius_apply(&m2).unwrap().mobius_apply(&m1).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn floor_brackets_value(x in arb_qi()) {
            let k = x.floor().unwrap();
            let lo = BigRational::from_integer(k.clone());
            let hi = BigRational::from_integer(k + 1);
            prop_assert_eq!(x.compare_rational(&lo).unwrap(), Ordering::Greater);
            prop_assert_eq!(x.compare_rational(&hi).unwrap(), Ordering::Less);
        }
    }

    #[test]
    fn compare_agrees_with_floats() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let x = QuadraticIrrational::from_ints(
                rng.gen_range(-50..50),
                rng.gen_range(-9..10),
                rng.gen_range(1..20),
                rng.gen_range(2..40),
            );
            let y = QuadraticIrrational::from_ints(
                rng.gen_range(-50..50),
                rng.gen_range(-9..10),
                rng.gen_range(1..20),
                rng.gen_range(2..40),
            );
            let (Ok(x), Ok(y)) = (x, y) else { continue };
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() < 1e-9 {
                continue;
            }
            assert_eq!(
                x.compare(&y).unwrap(),
                fx.partial_cmp(&fy).unwrap(),
                "{x} vs {y}"
            );
            checked += 1;
        }
    }
}
