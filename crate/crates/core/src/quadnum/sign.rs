//! Exact signs of `a + b*sqrt(n)` and `a + b*sqrt(n1) + c*sqrt(n2)`.
//!
//! Only integer comparisons are used; a square is taken only when the two
//! sides have opposite signs.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

fn sign(x: &BigInt) -> Ordering {
    x.cmp(&BigInt::zero())
}

/// Sign of `a + b*sqrt(n)` for `n >= 0`.
pub fn sign_of_surd(a: &BigInt, b: &BigInt, n: &BigInt) -> Ordering {
    debug_assert!(!n.is_negative());
    let sa = sign(a);
    let sb = if n.is_zero() {
        Ordering::Equal
    } else {
        sign(b)
    };
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    match (a * a).cmp(&(b * b * n)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b*sqrt(n1) + c*sqrt(n2)` for `n1, n2 >= 0`.
pub fn sign_of_two_surds(a: &BigInt, b: &BigInt, n1: &BigInt, c: &BigInt, n2: &BigInt) -> Ordering {
    // sign of v = b sqrt(n1) + c sqrt(n2)
    let bb = b * b * n1;
    let cc = c * c * n2;
    let sb = if n1.is_zero() {
        Ordering::Equal
    } else {
        sign(b)
    };
    let sc = if n2.is_zero() {
        Ordering::Equal
    } else {
        sign(c)
    };
    let sv = match (sb, sc) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (x, y) if x == y => x,
        (x, y) => match bb.cmp(&cc) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => Ordering::Equal,
        },
    };
    let sa = sign(a);
    if sv == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sv {
        return sv;
    }
    // |a| vs |v|:  a^2 - v^2 = (a^2 - bb - cc) - 2bc sqrt(n1 n2)
    let rest = a * a - &bb - &cc;
    let cross = -(BigInt::from(2) * b * c);
    match sign_of_surd(&rest, &cross, &(n1 * n2)) {
        Ordering::Greater => sa,
        Ordering::Less => sv,
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(a: i64, b: i64, n: i64) -> Ordering {
        sign_of_surd(&a.into(), &b.into(), &n.into())
    }

    fn s2(a: i64, b: i64, n1: i64, c: i64, n2: i64) -> Ordering {
        sign_of_two_surds(&a.into(), &b.into(), &n1.into(), &c.into(), &n2.into())
    }

    #[test]
    fn single_surd() {
        assert_eq!(s1(-11, 5, 5), Ordering::Greater); // 5 sqrt5 = 11.18
        assert_eq!(s1(-12, 5, 5), Ordering::Less);
        assert_eq!(s1(-3, 1, 9), Ordering::Equal);
        assert_eq!(s1(0, -1, 2), Ordering::Less);
        assert_eq!(s1(4, 0, 2), Ordering::Greater);
    }

    #[test]
    fn two_surds() {
        // sqrt2 + sqrt3 - 3.146 > 0
        assert_eq!(s2(-3, 1, 2, 1, 3), Ordering::Greater);
        assert_eq!(s2(-4, 1, 2, 1, 3), Ordering::Less);
        // 1 + 3 sqrt2 - 3 sqrt3 = 0.047
        assert_eq!(s2(1, 3, 2, -3, 3), Ordering::Greater);
        assert_eq!(s2(-1, 3, 2, -3, 3), Ordering::Less);
        assert_eq!(s2(0, 1, 8, -2, 2), Ordering::Equal);
        assert_eq!(s2(-5, 1, 9, 1, 4), Ordering::Equal);
    }
}
