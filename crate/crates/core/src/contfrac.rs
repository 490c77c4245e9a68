//! Periodic continued fractions of real quadratic irrationals.
//!
//! The expansion of `x` is `[a0; a1, a2, ...]`, eventually periodic. Two
//! numbers are GL2(Z)-equivalent exactly when their expansions share a tail,
//! and the digit matrices `(a, 1; 1, 0)` over one period multiply to a matrix
//! fixing the purely periodic tail.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modgroup::Matrix2Z;
use crate::quadnum::{IntPoly2, QuadraticIrrational};

/// `[preperiod; (period)]` with the period minimal and the preperiod as short
/// as possible, so equal values have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    preperiod: Vec<BigInt>,
    period: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn new(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::RationalValue);
        }
        if let Some(bad) = preperiod
            .iter()
            .chain(&period)
            .skip(1)
            .find(|a| !a.is_positive())
        {
            return Err(Error::Parse(format!(
                "digit {bad} after the first must be >= 1"
            )));
        }
        let mut cf = Self { preperiod, period };
        cf.normalize();
        if cf.preperiod.is_empty() && !cf.period[0].is_positive() {
            // a purely periodic tail repeats its first digit after index 0
            return Err(Error::Parse("periodic digits must be >= 1".into()));
        }
        Ok(cf)
    }

    pub fn from_i64(preperiod: &[i64], period: &[i64]) -> Result<Self> {
        Self::new(
            preperiod.iter().map(|&a| a.into()).collect(),
            period.iter().map(|&a| a.into()).collect(),
        )
    }

    fn normalize(&mut self) {
        let len = self.period.len();
        if let Some(p) = (1..=len)
            .filter(|p| len.is_multiple_of(*p))
            .find(|&p| (p..len).all(|i| self.period[i] == self.period[i - p]))
        {
            self.period.truncate(p);
        }
        while let Some(last) = self.preperiod.last() {
            if last != self.period.last().expect("nonempty period") {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// `a0, a1, ...` without end.
    pub fn digits(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.preperiod.iter().chain(self.period.iter().cycle())
    }

    /// Product of digit matrices over the preperiod.
    pub fn preperiod_matrix(&self) -> Matrix2Z {
        digit_product(&self.preperiod)
    }

    /// Product of digit matrices over one period.
    pub fn period_matrix(&self) -> Matrix2Z {
        digit_product(&self.period)
    }

    /// The purely periodic tail `[(period)]`.
    pub fn tail(&self) -> Self {
        Self {
            preperiod: Vec::new(),
            period: self.period.clone(),
        }
    }

    /// Exact value: the tail solves its own period equation, then the
    /// preperiod matrix carries it back.
    pub fn value(&self) -> QuadraticIrrational {
        let p = self.period_matrix();
        // t = (p_k t + p_{k-1}) / (q_k t + q_{k-1}),  t > 1
        let poly = IntPoly2::primitive(p.c.clone(), &p.d - &p.a, -p.b.clone());
        let tail = poly
            .root(true)
            .expect("periodic tail is a real quadratic irrational");
        tail.mobius_apply(&self.preperiod_matrix())
            .expect("unimodular image of an irrational")
    }
}

fn digit_product(digits: &[BigInt]) -> Matrix2Z {
    digits
        .iter()
        .fold(Matrix2Z::identity(), |acc, a| acc.mul(&Matrix2Z::digit(a)))
}

/// Exact expansion through the `(P, Q)` recurrence
/// `x_i = (P_i + sqrt(D)) / Q_i`, `a_i = floor(x_i)`,
/// `P_{i+1} = a_i Q_i - P_i`, `Q_{i+1} = (D - P_{i+1}^2) / Q_i`.
pub fn cf_expand(x: &QuadraticIrrational) -> Result<ContinuedFraction> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    let sign = x.q().signum();
    let mut radicand = x.q() * x.q() * x.radicand();
    let mut p = x.p() * &sign;
    let mut q = x.r() * &sign;
    if !(&radicand - &p * &p).is_multiple_of(&q) {
        let scale = q.abs();
        p *= &scale;
        radicand *= &q * &q;
        q *= &scale;
    }
    let root = radicand.sqrt();

    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            let period = digits.split_off(start);
            return ContinuedFraction::new(digits, period);
        }
        seen.insert((p.clone(), q.clone()), digits.len());
        let a = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            (&p + &root + 1u32).div_floor(&q)
        };
        p = &a * &q - &p;
        q = (&radicand - &p * &p) / &q;
        digits.push(a);
    }
}

/// First `k` convergents `p_i / q_i`.
pub fn convergents(cf: &ContinuedFraction, k: usize) -> Vec<BigRational> {
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k_cur) = (BigInt::one(), BigInt::zero());
    cf.digits()
        .take(k)
        .map(|a| {
            let h_next = a * &h + &h_prev;
            let k_next = a * &k_cur + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k_cur, k_next);
            BigRational::new(h.clone(), k_cur.clone())
        })
        .collect()
}

/// Outcome of a GL2(Z) equivalence test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `M` with `M . y = x`, `|det M| = 1`.
    pub witness: Option<Matrix2Z>,
}

impl Equivalence {
    /// Determinant of the witness, `+1` or `-1`.
    pub fn witness_det(&self) -> Option<BigInt> {
        self.witness.as_ref().map(Matrix2Z::det)
    }
}

/// Serret's criterion: `x` and `y` are GL2(Z)-equivalent iff their expansions
/// have a common tail. Periods are aligned by rotation; no cutoff is involved.
pub fn gl2_equivalent(x: &QuadraticIrrational, y: &QuadraticIrrational) -> Result<Equivalence> {
    let cx = cf_expand(x)?;
    let cy = cf_expand(y)?;
    let (px, py) = (cx.period(), cy.period());
    let shift = (px.len() == py.len())
        .then(|| (0..px.len()).find(|&j| px[j..].iter().chain(&px[..j]).eq(py.iter())))
        .flatten();
    let Some(shift) = shift else {
        return Ok(Equivalence {
            equivalent: false,
            witness: None,
        });
    };
    // x = A_x t_x,  t_x = B t_y,  y = A_y t_y
    let b = digit_product(&px[..shift]);
    let witness = cx
        .preperiod_matrix()
        .mul(&b)
        .mul(&cy.preperiod_matrix().inverse()?);
    debug_assert_eq!(y.mobius_apply(&witness).as_ref(), Ok(x));
    Ok(Equivalence {
        equivalent: true,
        witness: Some(witness),
    })
}

/// Hyperbolic `M` in SL2(Z) fixing `x` and its conjugate: the period matrix of
/// the tail conjugated back through the preperiod, squared when its
/// determinant is -1.
pub fn stabilizer_matrix(x: &QuadraticIrrational) -> Result<Matrix2Z> {
    let cf = cf_expand(x)?;
    let mut period = cf.period_matrix();
    if period.det().is_negative() {
        period = period.mul(&period);
    }
    let a = cf.preperiod_matrix();
    Ok(a.mul(&period).mul(&a.inverse()?))
}

/// Partial multiplicity matrices `(a_i, 1; 1, 0)` of the Bratteli diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BratteliData {
    pub matrices: Vec<Matrix2Z>,
}

pub fn bratteli_data(cf: &ContinuedFraction, n: usize) -> BratteliData {
    BratteliData {
        matrices: cf.digits().take(n).map(Matrix2Z::digit).collect(),
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let block = format!("({})", join(&self.period));
        match self.preperiod.split_first() {
            None => write!(f, "[{block}]"),
            Some((a0, [])) => write!(f, "[{a0}; {block}]"),
            Some((a0, rest)) => write!(f, "[{a0}; {}, {block}]", join(rest)),
        }
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed continued fraction {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(")]"))
            .ok_or_else(bad)?;
        let (prefix, period) = inner.split_once('(').ok_or_else(bad)?;
        let prefix = prefix.strip_suffix([',', ';']).unwrap_or(prefix);
        if prefix.matches(';').count() > 1
            || prefix.split(';').next().is_some_and(|h| h.contains(','))
        {
            return Err(bad());
        }
        let digits = |t: &str| -> Result<Vec<BigInt>> {
            t.split([',', ';'])
                .filter(|d| !d.is_empty())
                .map(|d| d.parse().map_err(|_| bad()))
                .collect()
        };
        Self::new(digits(prefix)?, digits(period)?)
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ContinuedFraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn q(s: &str) -> QuadraticIrrational {
        s.parse().unwrap()
    }

    fn cf(pre: &[i64], per: &[i64]) -> ContinuedFraction {
        ContinuedFraction::from_i64(pre, per).unwrap()
    }

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(cf_expand(&q("(1+sqrt(5))/2")).unwrap(), cf(&[], &[1]));
        assert_eq!(cf_expand(&q("sqrt(2)")).unwrap(), cf(&[1], &[2]));
        assert_eq!(cf_expand(&q("sqrt(7)")).unwrap(), cf(&[2], &[1, 1, 1, 4]));
        assert_eq!(cf_expand(&q("-sqrt(2)")).unwrap(), cf(&[-2, 1, 1], &[2]));
        assert_eq!(cf_expand(&q("sqrt(-2)")), Err(Error::NotReal));
    }

    #[test]
    fn normalization() {
        assert_eq!(cf(&[1, 2, 2], &[2, 2]), cf(&[1], &[2]));
        assert_eq!(cf(&[3, 1, 4], &[1, 4]), cf(&[3], &[1, 4]));
        assert_eq!(cf(&[], &[1, 1, 1]), cf(&[], &[1]));
        assert!(ContinuedFraction::from_i64(&[1], &[]).is_err());
        assert!(ContinuedFraction::from_i64(&[1, 0], &[2]).is_err());
        assert!(ContinuedFraction::from_i64(&[], &[0, 1]).is_err());
    }

    #[test]
    fn text_form() {
        assert_eq!(cf(&[2], &[1, 1, 1, 4]).to_string(), "[2; (1, 1, 1, 4)]");
        assert_eq!(cf(&[], &[1]).to_string(), "[(1)]");
        assert_eq!(cf(&[-1, 2], &[3]).to_string(), "[-1; 2, (3)]");
        for text in [
            "[2; (1, 1, 1, 4)]",
            "[(1)]",
            "[-1; 2, (3)]",
            "[0; 1, 5, (2, 7)]",
        ] {
            assert_eq!(text.parse::<ContinuedFraction>().unwrap().to_string(), text);
        }
        assert!("[1, 2; (3)]".parse::<ContinuedFraction>().is_err());
        assert!("[1; 2]".parse::<ContinuedFraction>().is_err());
    }

    #[test]
    fn convergent_examples() {
        let phi = cf(&[], &[1]);
        assert_eq!(
            convergents(&phi, 5),
            vec![frac(1, 1), frac(2, 1), frac(3, 2), frac(5, 3), frac(8, 5)]
        );
        assert_eq!(
            convergents(&cf(&[1], &[2]), 3),
            vec![frac(1, 1), frac(3, 2), frac(7, 5)]
        );
        assert_eq!(convergents(&cf(&[7], &[3]), 1), vec![frac(7, 1)]);
    }

    #[test]
    fn convergents_are_unimodular_neighbours() {
        let c = convergents(&cf_expand(&q("(3+sqrt(19))/5")).unwrap(), 30);
        for w in c.windows(2) {
            let det = w[1].numer() * w[0].denom() - w[0].numer() * w[1].denom();
            assert_eq!(det.abs(), BigInt::one());
        }
    }

    #[test]
    fn equivalence_examples() {
        let e = gl2_equivalent(&q("sqrt(2)"), &q("1+sqrt(2)")).unwrap();
        assert!(e.equivalent);
        let w = e.witness.unwrap();
        assert_eq!(q("1+sqrt(2)").mobius_apply(&w).unwrap(), q("sqrt(2)"));
        assert_eq!(w.det().abs(), BigInt::one());

        // witnesses are unique only up to the stabilizer of x
        let rev = gl2_equivalent(&q("1+sqrt(2)"), &q("sqrt(2)")).unwrap();
        let w = rev.witness.unwrap();
        assert_eq!(q("sqrt(2)").mobius_apply(&w).unwrap(), q("1+sqrt(2)"));
        // (1,1;0,1) is one valid witness; it differs from ours by a stabilizer element
        let translation = Matrix2Z::from_i64(1, 1, 0, 1);
        let ratio = w.mul(&translation.inverse().unwrap());
        assert_eq!(q("1+sqrt(2)").mobius_apply(&ratio).unwrap(), q("1+sqrt(2)"));

        assert!(
            !gl2_equivalent(&q("(1+sqrt(5))/2"), &q("sqrt(5)"))
                .unwrap()
                .equivalent
        );
        assert!(
            !gl2_equivalent(&q("sqrt(2)"), &q("sqrt(3)"))
                .unwrap()
                .equivalent
        );
        assert!(gl2_equivalent(&q("sqrt(2)"), &q("sqrt(-2)")).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(
            stabilizer_matrix(&q("(1+sqrt(5))/2")).unwrap(),
            Matrix2Z::from_i64(2, 1, 1, 1)
        );
        assert_eq!(
            stabilizer_matrix(&q("sqrt(2)")).unwrap(),
            Matrix2Z::from_i64(3, 4, 2, 3)
        );
        assert_eq!(
            stabilizer_matrix(&q("sqrt(3)")).unwrap(),
            Matrix2Z::from_i64(2, 3, 1, 2)
        );
    }

    #[test]
    fn bratteli_examples() {
        let d = |a| Matrix2Z::from_i64(a, 1, 1, 0);
        assert_eq!(
            bratteli_data(&cf(&[], &[1]), 3).matrices,
            vec![d(1), d(1), d(1)]
        );
        assert_eq!(bratteli_data(&cf(&[1], &[2]), 2).matrices, vec![d(1), d(2)]);
        assert_eq!(bratteli_data(&cf(&[4], &[1, 3]), 1).matrices, vec![d(4)]);
        for m in bratteli_data(&cf(&[0], &[1, 2, 3]), 10).matrices {
            assert_eq!(m.det(), -BigInt::one());
        }
    }

    #[test]
    fn galois_criterion_on_grid() {
        let one = BigRational::one();
        let mut count = 0;
        'outer: for d in [2i64, 3, 5, 6, 7, 10, 13] {
            for p in -6..6 {
                for qq in [-2i64, -1, 1, 2] {
                    for r in 1..4 {
                        let Ok(x) = QuadraticIrrational::from_ints(p, qq, r, d) else {
                            continue;
                        };
                        let reduced = x.compare_rational(&one).unwrap() == Ordering::Greater
                            && x.conjugate().compare_rational(&-one.clone()).unwrap()
                                == Ordering::Greater
                            && x.conjugate()
                                .compare_rational(&BigRational::zero())
                                .unwrap()
                                == Ordering::Less;
                        assert_eq!(cf_expand(&x).unwrap().is_purely_periodic(), reduced, "{x}");
                        count += 1;
                        if count == 200 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 200);
    }

    #[test]
    fn value_round_trip() {
        for s in [
            "sqrt(7)",
            "(1+sqrt(5))/2",
            "(-17+3*sqrt(11))/4",
            "-5*sqrt(13)/7",
            "(2+sqrt(94))/3",
        ] {
            let x = q(s);
            let c = cf_expand(&x).unwrap();
            assert_eq!(c.value(), x, "{s} -> {c}");
            assert_eq!(c.to_string().parse::<ContinuedFraction>().unwrap(), c);
        }
    }
}
