//! Pseudo-lattices `Z + Z theta`, quadratic orders `Z + f O_K` and their
//! `(D, f)` labels.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadnum::{is_squarefree, square_decompose, Kind, QuadraticIrrational};
use crate::serde_int;

pub type OrderSign = Kind;

/// The order of conductor `f` in `Q(sqrt(D))` (or `Q(sqrt(-D))`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticOrder {
    #[serde(rename = "D", with = "serde_int")]
    pub d: BigInt,
    #[serde(with = "serde_int")]
    pub f: BigInt,
    pub sign: OrderSign,
}

impl QuadraticOrder {
    pub fn new(d: impl Into<BigInt>, f: impl Into<BigInt>, sign: OrderSign) -> Result<Self> {
        let d = d.into();
        let f = f.into();
        require_radicand(&d)?;
        if f < BigInt::one() {
            return Err(Error::BoundExceeded {
                what: "f",
                value: f.to_string(),
                range: ">= 1".into(),
            });
        }
        Ok(Self { d, f, sign })
    }

    pub fn real(d: i64, f: i64) -> Result<Self> {
        Self::new(d, f, Kind::Real)
    }

    pub fn omega(&self) -> QuadraticIrrational {
        order_omega(&self.d, self.sign).expect("validated radicand")
    }

    /// `f * omega`, the generator of `Z + (f omega) Z`.
    pub fn generator(&self) -> QuadraticIrrational {
        self.omega()
            .scale(&BigRational::from_integer(self.f.clone()))
            .expect("nonzero multiple of an irrational")
    }

    /// Field discriminant: `D` when `D = 1 (mod 4)`, else `4D` (real orders).
    pub fn field_discriminant(&self) -> BigInt {
        if self.d.mod_floor(&BigInt::from(4)).is_one() {
            self.d.clone()
        } else {
            BigInt::from(4) * &self.d
        }
    }

    /// `f^2 d_K`.
    pub fn discriminant(&self) -> BigInt {
        &self.f * &self.f * self.field_discriminant()
    }
}

impl fmt::Display for QuadraticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Kind::Real => "real",
            Kind::Imaginary => "imaginary",
        };
        write!(f, "(D={}, f={}, {sign})", self.d, self.f)
    }
}

fn require_radicand(d: &BigInt) -> Result<()> {
    if d > &BigInt::one() && is_squarefree(d) {
        Ok(())
    } else {
        Err(Error::NonCanonicalRadicand(d.to_string()))
    }
}

/// `(1 + sqrt(D))/2` when `D = 1 (mod 4)`, `sqrt(D)` when `D = 2, 3 (mod 4)`;
/// the same formulas with `sqrt(-D)` for the imaginary sign.
pub fn order_omega(d: &BigInt, sign: OrderSign) -> Result<QuadraticIrrational> {
    require_radicand(d)?;
    let (p, r) = if d.mod_floor(&BigInt::from(4)).is_one() {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    match sign {
        Kind::Real => QuadraticIrrational::canonicalize(p, BigInt::one(), r, d.clone()),
        Kind::Imaginary => {
            QuadraticIrrational::canonicalize_imaginary(p, BigInt::one(), r, d.clone())
        }
    }
}

/// `End(Z + Z x)`: the order whose discriminant equals that of the primitive
/// minimal polynomial of `x`, written as `Delta = f^2 d_K`.
pub fn endomorphism_order(x: &QuadraticIrrational) -> Result<QuadraticOrder> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    let delta = x.minpoly().discriminant();
    let (s, d) = square_decompose(&delta);
    let f = if d.mod_floor(&BigInt::from(4)).is_one() {
        s
    } else {
        // Delta = 0, 1 (mod 4) forces s even here
        debug_assert!(s.is_even());
        s / 2
    };
    QuadraticOrder::new(d, f, Kind::Real)
}

/// `Z + Z theta` inside the real line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoLattice {
    pub generator: QuadraticIrrational,
}

impl PseudoLattice {
    pub fn new(generator: QuadraticIrrational) -> Self {
        Self { generator }
    }

    /// Integers `(z1, z2)` with `x = z1 + z2 theta`, if they exist.
    pub fn coordinates(&self, x: &QuadraticIrrational) -> Option<(BigInt, BigInt)> {
        let t = &self.generator;
        if x.radicand() != t.radicand() || x.kind() != t.kind() {
            return None;
        }
        // irrational parts: q_x / r_x = z2 q_t / r_t
        let z2 = BigRational::new(x.q() * t.r(), x.r() * t.q());
        let z1 = BigRational::new(x.p().clone(), x.r().clone())
            - &z2 * BigRational::new(t.p().clone(), t.r().clone());
        (z1.is_integer() && z2.is_integer()).then(|| (z1.to_integer(), z2.to_integer()))
    }

    pub fn contains(&self, x: &QuadraticIrrational) -> bool {
        self.coordinates(x).is_some()
    }

    /// Set equality, by mutual containment of generators.
    pub fn same_set(&self, other: &Self) -> bool {
        self.contains(&other.generator) && other.contains(&self.generator)
    }

    /// `z1 + z2 theta`; `None` when the result is an integer.
    pub fn element(&self, z1: &BigInt, z2: &BigInt) -> Option<QuadraticIrrational> {
        if z2.is_zero() {
            return None;
        }
        let scaled = self
            .generator
            .scale(&BigRational::from_integer(z2.clone()))
            .ok()?;
        Some(scaled.add_int(z1))
    }
}

/// `Z + (f omega(D)) Z`.
pub fn pseudo_lattice_of(d: &BigInt, f: &BigInt) -> Result<PseudoLattice> {
    let order = QuadraticOrder::new(d.clone(), f.clone(), Kind::Real)?;
    Ok(PseudoLattice::new(order.generator()))
}

/// Real multiplication holds exactly for real quadratic irrationals; returns
/// the endomorphism order as the witness.
pub fn is_real_multiplication(x: &QuadraticIrrational) -> Option<QuadraticOrder> {
    endomorphism_order(x).ok()
}

/// As [`is_real_multiplication`], for a value that may have failed to
/// construct; a rational value has no real multiplication.
pub fn classify(value: &Result<QuadraticIrrational>) -> Option<QuadraticOrder> {
    match value {
        Ok(x) => is_real_multiplication(x),
        Err(_) => None,
    }
}

/// Squarefree integers in `2..=max`.
pub fn squarefree_radicands(max: u64) -> Vec<u64> {
    (2..=max)
        .filter(|&d| is_squarefree(&BigInt::from(d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn q(s: &str) -> QuadraticIrrational {
        s.parse().unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(
            order_omega(&big(5), Kind::Real).unwrap(),
            q("(1+sqrt(5))/2")
        );
        assert_eq!(order_omega(&big(2), Kind::Real).unwrap(), q("sqrt(2)"));
        assert_eq!(order_omega(&big(3), Kind::Real).unwrap(), q("sqrt(3)"));
        assert_eq!(
            order_omega(&big(5), Kind::Imaginary).unwrap(),
            q("(1+sqrt(-5))/2")
        );
        for bad in [0, 1, 4, 12, -3] {
            assert!(matches!(
                order_omega(&big(bad), Kind::Real),
                Err(Error::NonCanonicalRadicand(_))
            ));
        }
    }

    #[test]
    fn endomorphism_order_examples() {
        assert_eq!(
            endomorphism_order(&q("(1+sqrt(5))/2")).unwrap(),
            QuadraticOrder::real(5, 1).unwrap()
        );
        assert_eq!(
            endomorphism_order(&q("sqrt(5)")).unwrap(),
            QuadraticOrder::real(5, 2).unwrap()
        );
        assert_eq!(
            endomorphism_order(&q("sqrt(2)")).unwrap(),
            QuadraticOrder::real(2, 1).unwrap()
        );
        assert_eq!(endomorphism_order(&q("sqrt(-2)")), Err(Error::NotReal));
    }

    #[test]
    fn pseudo_lattice_examples() {
        assert_eq!(
            pseudo_lattice_of(&big(5), &big(1)).unwrap().generator,
            q("(1+sqrt(5))/2")
        );
        assert_eq!(
            pseudo_lattice_of(&big(2), &big(2)).unwrap().generator,
            q("2*sqrt(2)")
        );
        let l52 = pseudo_lattice_of(&big(5), &big(2)).unwrap();
        assert_eq!(l52.generator, q("1+sqrt(5)"));
        assert!(l52.same_set(&PseudoLattice::new(q("sqrt(5)"))));
        assert!(!l52.same_set(&pseudo_lattice_of(&big(5), &big(1)).unwrap()));
    }

    #[test]
    fn contains_examples() {
        let l21 = pseudo_lattice_of(&big(2), &big(1)).unwrap();
        assert_eq!(l21.coordinates(&q("sqrt(2)")), Some((big(0), big(1))));
        assert!(l21.contains(&q("1+sqrt(2)")));
        let l51 = pseudo_lattice_of(&big(5), &big(1)).unwrap();
        assert!(!l51.contains(&q("(1+sqrt(5))/4")));
        assert!(!l51.contains(&q("sqrt(2)")));
    }

    #[test]
    fn real_multiplication_examples() {
        assert_eq!(
            is_real_multiplication(&q("sqrt(2)")),
            Some(QuadraticOrder::real(2, 1).unwrap())
        );
        assert_eq!(
            is_real_multiplication(&q("(1+sqrt(5))/2")),
            Some(QuadraticOrder::real(5, 1).unwrap())
        );
        assert_eq!(classify(&"7/3".parse::<QuadraticIrrational>()), None);
        assert_eq!(classify(&QuadraticIrrational::from_ints(1, 2, 3, 16)), None);
    }

    #[test]
    fn json_shape() {
        let order = QuadraticOrder::real(5, 2).unwrap();
        let json = serde_json::to_string(&order).unwrap();
        assert_eq!(json, r#"{"D":5,"f":2,"sign":"real"}"#);
        assert_eq!(
            serde_json::from_str::<QuadraticOrder>(&json).unwrap(),
            order
        );
    }

    #[test]
    fn order_round_trip_grid() {
        for d in squarefree_radicands(50) {
            for f in 1..=5 {
                let order = QuadraticOrder::real(d as i64, f).unwrap();
                assert_eq!(endomorphism_order(&order.generator()).unwrap(), order);
                assert_eq!(
                    order.generator().minpoly().discriminant(),
                    order.discriminant()
                );
            }
        }
    }

    #[test]
    fn omega_satisfies_defining_equation() {
        for d in squarefree_radicands(60) {
            let w = order_omega(&big(d as i64), Kind::Real).unwrap();
            let mp = w.minpoly();
            if d % 4 == 1 {
                assert_eq!(
                    (mp.a, mp.b, mp.c),
                    (big(1), big(-1), -big((d as i64 - 1) / 4))
                );
            } else {
                assert_eq!((mp.a, mp.b, mp.c), (big(1), big(0), -big(d as i64)));
            }
        }
    }

    #[test]
    fn order_is_gl2_invariant() {
        use crate::modgroup::Matrix2Z;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [2i64, 3, 5, 13, 21, 30] {
            for f in 1..=3 {
                let order = QuadraticOrder::real(d, f).unwrap();
                let theta = order.generator();
                for _ in 0..100 {
                    let mut m = Matrix2Z::identity();
                    for _ in 0..rng.gen_range(1..6) {
                        let k = rng.gen_range(-4..=4);
                        let step = match rng.gen_range(0..3) {
                            0 => Matrix2Z::from_i64(1, k, 0, 1),
                            1 => Matrix2Z::from_i64(1, 0, k, 1),
                            _ => Matrix2Z::from_i64(0, 1, 1, 0),
                        };
                        m = m.mul(&step);
                    }
                    let image = theta.mobius_apply(&m).unwrap();
                    assert_eq!(endomorphism_order(&image).unwrap(), order);
                }
            }
        }
    }

    #[test]
    fn lattice_membership_grid() {
        for (d, f) in [(2, 1), (5, 1), (5, 2), (13, 3), (7, 2)] {
            let lattice = pseudo_lattice_of(&big(d), &big(f)).unwrap();
            for z1 in -10..=10 {
                for z2 in -10..=10 {
                    if let Some(x) = lattice.element(&big(z1), &big(z2)) {
                        assert_eq!(lattice.coordinates(&x), Some((big(z1), big(z2))));
                    }
                }
            }
            let half = lattice
                .generator
                .scale(&BigRational::new(big(1), big(2)))
                .unwrap();
            assert!(!lattice.contains(&half));
        }
    }
}
