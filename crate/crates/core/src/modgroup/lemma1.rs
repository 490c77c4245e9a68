//! Stabilizer harness for `theta = f omega(D)`: the hyperbolic matrix fixing
//! theta, membership of its fixed points in `Z + (f omega) Z`, and the
//! congruence behaviour of its powers modulo `fD`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{
    check_eq4, fixed_points, is_hyperbolic, minimal_power_in_gamma1,
    minimal_signed_power_in_gamma1, Matrix2Z,
};
use crate::contfrac::stabilizer_matrix;
use crate::error::Result;
use crate::lattices::{pseudo_lattice_of, PseudoLattice};
use crate::quadnum::QuadraticIrrational;
use crate::serde_int;

pub const DEFAULT_K_MAX: u32 = 64;

/// A fixed point and its coordinates in the pseudo-lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub point: QuadraticIrrational,
    pub contains: bool,
    #[serde(with = "serde_int::opt")]
    pub z1: Option<BigInt>,
    #[serde(with = "serde_int::opt")]
    pub z2: Option<BigInt>,
}

/// Congruence data of one power `M^k` modulo `fD`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerRecord {
    pub k: u32,
    pub eq4: bool,
    pub eq4_negated: bool,
    pub fixes_fixed_points: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    #[serde(rename = "D", with = "serde_int")]
    pub d: BigInt,
    #[serde(with = "serde_int")]
    pub f: BigInt,
    pub theta: QuadraticIrrational,
    #[serde(with = "serde_int")]
    pub modulus: BigInt,
    pub stabilizer: Matrix2Z,
    pub hyperbolic: bool,
    pub fixed_points: [QuadraticIrrational; 2],
    pub fixed_points_are_theta_pair: bool,
    pub memberships: Vec<Membership>,
    pub k_max: u32,
    /// Least `k` with `M^k` in Gamma_1(fD).
    pub minimal_power: Option<u32>,
    /// Least `k` with `M^k` or `-M^k` in Gamma_1(fD).
    pub minimal_signed_power: Option<u32>,
    pub powers: Vec<PowerRecord>,
}

impl Lemma1Report {
    /// Every membership fact the harness asserts.
    pub fn asserted_ok(&self) -> bool {
        self.hyperbolic
            && self.fixed_points_are_theta_pair
            && self
                .memberships
                .iter()
                .all(|m| m.contains && m.z1.is_some() && m.z2.is_some())
            && self.powers.iter().all(|p| p.fixes_fixed_points)
    }

    /// Re-derives every claim in the report from its own fields, without
    /// trusting the booleans it carries.
    pub fn recheck(&self) -> std::result::Result<(), String> {
        let m = &self.stabilizer;
        if m.det() != BigInt::from(1) {
            return Err(format!("stabilizer {m} has det {}", m.det()));
        }
        if is_hyperbolic(m) != Ok(self.hyperbolic) {
            return Err("hyperbolic flag disagrees".into());
        }
        let lattice = pseudo_lattice_of(&self.d, &self.f).map_err(|e| e.to_string())?;
        if lattice.generator != self.theta {
            return Err(format!("theta {} is not f*omega(D)", self.theta));
        }
        let pair = [self.theta.clone(), self.theta.conjugate()];
        let as_set = |v: &[QuadraticIrrational; 2]| pair.iter().all(|x| v.contains(x));
        if as_set(&self.fixed_points) != self.fixed_points_are_theta_pair {
            return Err("fixed-point pair flag disagrees".into());
        }
        for x in &self.fixed_points {
            if x.mobius_apply(m).as_ref() != Ok(x) {
                return Err(format!("{x} is not fixed by {m}"));
            }
        }
        for mem in &self.memberships {
            check_membership(&lattice, mem)?;
        }
        let power_ok = |k: u32| check_eq4(&m.pow(k), &self.modulus);
        let neg_ok = |k: u32| check_eq4(&m.pow(k).neg(), &self.modulus);
        if let Some(k) = self.minimal_power {
            if !power_ok(k) || (1..k).any(power_ok) {
                return Err(format!("minimal power {k} is not minimal or not a member"));
            }
        } else if (1..=self.k_max).any(power_ok) {
            return Err("a power within k_max is a member but none was reported".into());
        }
        if let Some(k) = self.minimal_signed_power {
            let either = |j| power_ok(j) || neg_ok(j);
            if !either(k) || (1..k).any(either) {
                return Err(format!("minimal signed power {k} is wrong"));
            }
        }
        for rec in &self.powers {
            let mk = m.pow(rec.k);
            let fixes = self
                .fixed_points
                .iter()
                .all(|x| x.mobius_apply(&mk).as_ref() == Ok(x));
            if rec.eq4 != power_ok(rec.k)
                || rec.eq4_negated != neg_ok(rec.k)
                || rec.fixes_fixed_points != fixes
            {
                return Err(format!("power record k={} disagrees", rec.k));
            }
        }
        Ok(())
    }
}

fn check_membership(lattice: &PseudoLattice, mem: &Membership) -> std::result::Result<(), String> {
    let coords = lattice.coordinates(&mem.point);
    if coords.is_some() != mem.contains {
        return Err(format!("membership flag for {} disagrees", mem.point));
    }
    if let (Some(z1), Some(z2)) = (&mem.z1, &mem.z2) {
        if lattice.element(z1, z2).as_ref() != Some(&mem.point) {
            return Err(format!("{z1} + {z2}*theta != {}", mem.point));
        }
    }
    Ok(())
}

pub fn lemma1_harness(d: &BigInt, f: &BigInt, k_max: u32) -> Result<Lemma1Report> {
    let lattice = pseudo_lattice_of(d, f)?;
    let theta = lattice.generator.clone();
    let stabilizer = stabilizer_matrix(&theta)?;
    let hyperbolic = is_hyperbolic(&stabilizer)?;
    let (x, xbar) = fixed_points(&stabilizer)?;
    let fixed = [x, xbar];
    let fixed_points_are_theta_pair = fixed.contains(&theta) && fixed.contains(&theta.conjugate());

    let memberships = fixed
        .iter()
        .map(|point| {
            let coords = lattice.coordinates(point);
            Membership {
                point: point.clone(),
                contains: coords.is_some(),
                z1: coords.as_ref().map(|c| c.0.clone()),
                z2: coords.map(|c| c.1),
            }
        })
        .collect();

    let modulus = f * d;
    let minimal_power = minimal_power_in_gamma1(&stabilizer, &modulus, k_max);
    let minimal_signed_power = minimal_signed_power_in_gamma1(&stabilizer, &modulus, k_max);

    let last = minimal_power.unwrap_or(k_max);
    let mut powers = Vec::with_capacity(last as usize);
    let mut mk = Matrix2Z::identity();
    for k in 1..=last {
        mk = mk.mul(&stabilizer);
        let fixes = fixed.iter().all(|p| p.mobius_apply(&mk).as_ref() == Ok(p));
        powers.push(PowerRecord {
            k,
            eq4: check_eq4(&mk, &modulus),
            eq4_negated: check_eq4(&mk.neg(), &modulus),
            fixes_fixed_points: fixes,
        });
    }

    Ok(Lemma1Report {
        d: d.clone(),
        f: f.clone(),
        theta,
        modulus,
        stabilizer,
        hyperbolic,
        fixed_points: fixed,
        fixed_points_are_theta_pair,
        memberships,
        k_max,
        minimal_power,
        minimal_signed_power,
        powers,
    })
}
