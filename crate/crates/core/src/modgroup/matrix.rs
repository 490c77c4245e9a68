use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::serde_int::Int;

/// Integer 2x2 matrix `(a, b; c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix2Z {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Matrix2Z {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    /// Digit matrix `(a, 1; 1, 0)` of a continued fraction.
    pub fn digit(a: &BigInt) -> Self {
        Self::new(a.clone(), BigInt::one(), BigInt::one(), BigInt::zero())
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// Integer inverse of a matrix with determinant +-1.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(Self {
            a: &self.d * &det,
            b: -(&self.b * &det),
            c: -(&self.c * &det),
            d: &self.a * &det,
        })
    }

    /// Entries reduced into `0..n`.
    pub fn reduce(&self, n: &BigInt) -> Self {
        Self {
            a: self.a.mod_floor(n),
            b: self.b.mod_floor(n),
            c: self.c.mod_floor(n),
            d: self.d.mod_floor(n),
        }
    }

    /// Product reduced modulo `n`.
    pub fn mul_mod(&self, o: &Self, n: &BigInt) -> Self {
        self.mul(o).reduce(n)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

impl fmt::Display for Matrix2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Parses `a,b,c,d` (row-major; brackets and whitespace optional).
impl FromStr for Matrix2Z {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && !"[]()".contains(*c))
            .collect();
        let entries = cleaned
            .split([',', ';'])
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match <[BigInt; 4]>::try_from(entries) {
            Ok([a, b, c, d]) => Ok(Self::new(a, b, c, d)),
            Err(v) => Err(Error::Parse(format!(
                "matrix needs 4 entries, got {}",
                v.len()
            ))),
        }
    }
}

impl Serialize for Matrix2Z {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let row: [Int; 4] = [
            Int(self.a.clone()),
            Int(self.b.clone()),
            Int(self.c.clone()),
            Int(self.d.clone()),
        ];
        row.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix2Z {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c, d] = <[Int; 4]>::deserialize(d)?;
        Ok(Self::new(a.0, b.0, c.0, d.0))
    }
}
