//! The modular group: hyperbolic fixed points, congruence subgroups,
//! SL2(Z/N) enumeration and the stabilizer/congruence harness.

mod lemma1;
mod matrix;
mod sl2;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadnum::QuadraticIrrational;

pub use lemma1::{lemma1_harness, Lemma1Report, Membership, PowerRecord, DEFAULT_K_MAX};
pub use matrix::Matrix2Z;
pub use sl2::{sl2_mod_n, sl2_order_formula, verify_lemma4, IndexReport, Sl2ModN, MAX_LEVEL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CongruenceKind {
    /// Gamma(N): a, d = 1 and b, c = 0 mod N.
    Principal,
    /// Gamma_1(N): a, d = 1 and c = 0 mod N.
    Gamma1,
    /// Gamma_0(N): c = 0 mod N.
    Gamma0,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceSpec {
    pub kind: CongruenceKind,
    level: BigInt,
}

impl CongruenceSpec {
    pub fn new(kind: CongruenceKind, level: impl Into<BigInt>) -> Result<Self> {
        let level = level.into();
        if level < BigInt::one() {
            return Err(Error::BoundExceeded {
                what: "level",
                value: level.to_string(),
                range: ">= 1".into(),
            });
        }
        Ok(Self { kind, level })
    }

    pub fn level(&self) -> &BigInt {
        &self.level
    }
}

fn require_det_one(m: &Matrix2Z) -> Result<()> {
    let det = m.det();
    if det.is_one() {
        Ok(())
    } else {
        Err(Error::NotUnimodular(det.to_string()))
    }
}

fn congruent(x: &BigInt, y: &BigInt, n: &BigInt) -> bool {
    (x - y).mod_floor(n).is_zero()
}

pub fn is_hyperbolic(m: &Matrix2Z) -> Result<bool> {
    require_det_one(m)?;
    Ok(m.trace().abs() > BigInt::from(2))
}

/// The two real fixed points of a hyperbolic `m` with `c != 0`, the root with
/// the `+` radical first:
/// `x = (a - d)/(2c) +- sqrt((a + d)^2 - 4) / (2|c|)`.
pub fn fixed_points(m: &Matrix2Z) -> Result<(QuadraticIrrational, QuadraticIrrational)> {
    require_det_one(m)?;
    if m.c.is_zero() {
        return Err(Error::FixedPointAtInfinity);
    }
    if !is_hyperbolic(m)? {
        return Err(Error::NotHyperbolic);
    }
    let t = m.trace();
    let radicand = &t * &t - BigInt::from(4);
    let sign = m.c.signum();
    let p = (&m.a - &m.d) * &sign;
    let r = BigInt::from(2) * m.c.abs();
    let x = QuadraticIrrational::canonicalize(p, BigInt::one(), r, radicand)?;
    let xbar = x.conjugate();
    Ok((x, xbar))
}

/// Congruence predicate without the determinant check.
fn satisfies(m: &Matrix2Z, kind: CongruenceKind, n: &BigInt) -> bool {
    let one = BigInt::one();
    let zero = BigInt::zero();
    match kind {
        CongruenceKind::Gamma0 => congruent(&m.c, &zero, n),
        CongruenceKind::Gamma1 => {
            congruent(&m.c, &zero, n) && congruent(&m.a, &one, n) && congruent(&m.d, &one, n)
        }
        CongruenceKind::Principal => {
            satisfies(m, CongruenceKind::Gamma1, n) && congruent(&m.b, &zero, n)
        }
    }
}

pub fn in_congruence_group(m: &Matrix2Z, spec: &CongruenceSpec) -> Result<bool> {
    require_det_one(m)?;
    Ok(satisfies(m, spec.kind, &spec.level))
}

/// `a = 1, d = 1, c = 0 (mod modulus)`: the conclusion of the stabilizer
/// congruence argument, the same predicate as Gamma_1 membership.
pub fn check_eq4(m: &Matrix2Z, modulus: &BigInt) -> bool {
    satisfies(m, CongruenceKind::Gamma1, modulus)
}

/// Least `1 <= k <= k_max` with `m^k` in Gamma_1(n). Powers are formed modulo `n`.
pub fn minimal_power_in_gamma1(m: &Matrix2Z, n: &BigInt, k_max: u32) -> Option<u32> {
    first_power(m, n, k_max, false)
}

/// Least `k` with `m^k` or `-m^k` in Gamma_1(n).
pub fn minimal_signed_power_in_gamma1(m: &Matrix2Z, n: &BigInt, k_max: u32) -> Option<u32> {
    first_power(m, n, k_max, true)
}

fn first_power(m: &Matrix2Z, n: &BigInt, k_max: u32, signed: bool) -> Option<u32> {
    let base = m.reduce(n);
    let mut power = base.clone();
    for k in 1..=k_max {
        if check_eq4(&power, n) || (signed && check_eq4(&power.neg(), n)) {
            return Some(k);
        }
        power = power.mul_mod(&base, n);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn m(a: i64, b: i64, c: i64, d: i64) -> Matrix2Z {
        Matrix2Z::from_i64(a, b, c, d)
    }

    fn gamma1(n: i64) -> CongruenceSpec {
        CongruenceSpec::new(CongruenceKind::Gamma1, n).unwrap()
    }

    #[test]
    fn hyperbolic_examples() {
        assert!(is_hyperbolic(&m(2, 1, 1, 1)).unwrap());
        assert!(!is_hyperbolic(&m(1, 1, 0, 1)).unwrap());
        assert!(!is_hyperbolic(&m(0, -1, 1, 0)).unwrap());
        assert!(is_hyperbolic(&m(-3, 1, -1, 0)).unwrap());
        assert!(matches!(
            is_hyperbolic(&m(2, 0, 0, 1)),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn fixed_point_examples() {
        let q = |s: &str| s.parse::<QuadraticIrrational>().unwrap();
        assert_eq!(
            fixed_points(&m(2, 1, 1, 1)).unwrap(),
            (q("(1+sqrt(5))/2"), q("(1-sqrt(5))/2"))
        );
        assert_eq!(
            fixed_points(&m(5, 2, 2, 1)).unwrap(),
            (q("1+sqrt(2)"), q("1-sqrt(2)"))
        );
        assert_eq!(
            fixed_points(&m(3, 4, 2, 3)).unwrap(),
            (q("sqrt(2)"), q("-sqrt(2)"))
        );
        assert_eq!(fixed_points(&m(0, -1, 1, 0)), Err(Error::NotHyperbolic));
        assert_eq!(fixed_points(&m(1, 1, -1, 0)), Err(Error::NotHyperbolic));
        assert_eq!(
            fixed_points(&m(3, 1, 0, 1)).unwrap_err(),
            Error::NotUnimodular("3".into())
        );
        assert_eq!(
            fixed_points(&m(1, 1, 0, 1)),
            Err(Error::FixedPointAtInfinity)
        );
        assert_eq!(
            fixed_points(&m(-1, 5, 0, -1)),
            Err(Error::FixedPointAtInfinity)
        );
    }

    #[test]
    fn fixed_points_are_fixed_for_negative_c() {
        let g = m(-4, 3, -3, 2).mul(&m(2, 1, 1, 1));
        assert_eq!(g.det(), BigInt::one());
        let (x, xbar) = fixed_points(&g).unwrap();
        assert_eq!(x.mobius_apply(&g).unwrap(), x);
        assert_eq!(xbar.mobius_apply(&g).unwrap(), xbar);
        assert_eq!(x.compare(&xbar).unwrap(), std::cmp::Ordering::Greater);
    }

    #[test]
    fn congruence_examples() {
        assert!(in_congruence_group(&m(1, 1, 0, 1), &gamma1(5)).unwrap());
        assert!(!in_congruence_group(&m(2, 1, 1, 1), &gamma1(5)).unwrap());
        assert!(in_congruence_group(&m(6, 1, 5, 1), &gamma1(5)).unwrap());
        assert!(in_congruence_group(&m(2, 1, 1, 1), &gamma1(3)).is_ok());
        assert!(in_congruence_group(&m(2, 1, 1, 2), &gamma1(3)).is_err());
        assert!(CongruenceSpec::new(CongruenceKind::Gamma0, 0).is_err());
    }

    #[test]
    fn eq4_examples() {
        assert!(check_eq4(&m(3, 4, 2, 3), &BigInt::from(2)));
        assert!(!check_eq4(&m(2, 1, 1, 1), &BigInt::from(5)));
        for n in 1..20 {
            assert!(check_eq4(&Matrix2Z::identity(), &BigInt::from(n)));
        }
    }

    #[test]
    fn minimal_power_examples() {
        let n = BigInt::from;
        assert_eq!(minimal_power_in_gamma1(&m(3, 4, 2, 3), &n(2), 64), Some(1));
        assert_eq!(minimal_power_in_gamma1(&m(2, 1, 1, 1), &n(5), 64), Some(10));
        assert_eq!(minimal_power_in_gamma1(&m(2, 3, 1, 2), &n(3), 64), Some(6));
        assert_eq!(minimal_power_in_gamma1(&m(2, 1, 1, 1), &n(5), 9), None);
        assert_eq!(
            minimal_signed_power_in_gamma1(&m(2, 1, 1, 1), &n(5), 64),
            Some(5)
        );
        assert_eq!(
            minimal_signed_power_in_gamma1(&m(2, 3, 1, 2), &n(3), 64),
            Some(3)
        );
    }

    #[test]
    fn minimal_power_is_coherent() {
        let g = m(2, 1, 1, 1);
        for level in 2..40 {
            let level = BigInt::from(level);
            let spec = CongruenceSpec::new(CongruenceKind::Gamma1, level.clone()).unwrap();
            let k = minimal_power_in_gamma1(&g, &level, 256).expect("finite order mod n");
            assert!(in_congruence_group(&g.pow(k), &spec).unwrap());
            for j in 1..k {
                assert!(!in_congruence_group(&g.pow(j), &spec).unwrap());
            }
        }
    }

    fn random_unimodular(rng: &mut impl Rng) -> Matrix2Z {
        let mut acc = Matrix2Z::identity();
        for _ in 0..rng.gen_range(1..8) {
            let k = rng.gen_range(-5..=5);
            let step = if rng.gen_bool(0.5) {
                m(1, k, 0, 1)
            } else {
                m(1, 0, k, 1)
            };
            acc = acc.mul(&step);
        }
        acc
    }

    #[test]
    fn subgroup_chain_is_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = random_unimodular(&mut rng);
            let level = rng.gen_range(1..12);
            let member =
                |kind| in_congruence_group(&g, &CongruenceSpec::new(kind, level).unwrap()).unwrap();
            let (p, g1, g0) = (
                member(CongruenceKind::Principal),
                member(CongruenceKind::Gamma1),
                member(CongruenceKind::Gamma0),
            );
            assert!(!p || g1);
            assert!(!g1 || g0);
        }
    }
}
