//! Dehn-Thurston coordinates of integral multicurves.
//!
//! `m[i]` is the number of crossings with cuff `i`; `t[i]` is the twist about
//! cuff `i` measured in strands. An uncrossed cuff with `t[i] = k > 0` stands
//! for `k` parallel copies of the cuff itself.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Invalid, Result};
use crate::surface::Surface;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DtCoords {
    pub m: Vec<u32>,
    pub t: Vec<i64>,
}

impl DtCoords {
    pub fn new(m: Vec<u32>, t: Vec<i64>) -> Result<Self> {
        if m.len() != t.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                got: t.len(),
            });
        }
        Ok(DtCoords { m, t })
    }

    pub fn zero(n: usize) -> Self {
        DtCoords {
            m: vec![0; n],
            t: vec![0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty_lamination(&self) -> bool {
        self.m.iter().all(|&x| x == 0) && self.t.iter().all(|&x| x == 0)
    }

    /// `sum m_i + sum |t_i|`.
    pub fn norm(&self) -> u64 {
        self.m.iter().map(|&x| x as u64).sum::<u64>()
            + self.t.iter().map(|x| x.unsigned_abs()).sum::<u64>()
    }

    pub fn scale(&self, k: u32) -> Self {
        DtCoords {
            m: self.m.iter().map(|&x| x * k).collect(),
            t: self.t.iter().map(|&x| x * k as i64).collect(),
        }
    }

    /// The coordinate vector `(m_1..m_n, t_1..t_n)` as 64-bit integers.
    pub fn to_vec(&self) -> Vec<i64> {
        self.m
            .iter()
            .map(|&x| x as i64)
            .chain(self.t.iter().copied())
            .collect()
    }

    /// Full Dehn twist about cuff `i`, applied `n` times.
    pub fn twist_about_cuff(&self, i: usize, n: i64) -> Result<Self> {
        if i >= self.dim() {
            return Err(Error::CuffOutOfRange {
                index: i,
                count: self.dim(),
            });
        }
        let mut out = self.clone();
        out.t[i] += n * self.m[i] as i64;
        Ok(out)
    }

    /// Componentwise sum. Only defined inside a common twist-sign orthant,
    /// where the sum is the train-track sum of the two multicurves.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        for i in 0..self.dim() {
            if self.t[i].signum() * other.t[i].signum() < 0 {
                return Err(Error::MixedOrthants { cuff: i + 1 });
            }
        }
        Ok(DtCoords {
            m: self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect(),
            t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect(),
        })
    }

    /// Checks the realizability conditions on `s`. The outer error reports a
    /// dimension mismatch; the inner one the first violated condition.
    pub fn validate(&self, s: &Surface) -> Result<std::result::Result<(), Invalid>> {
        if self.dim() != s.num_cuffs || self.t.len() != s.num_cuffs {
            return Err(Error::DimensionMismatch {
                expected: s.num_cuffs,
                got: self.dim(),
            });
        }
        for (p, cuffs) in s.decomposition.pants.iter().enumerate() {
            let sum: u64 = cuffs.iter().map(|&c| self.m[c] as u64).sum();
            if sum % 2 == 1 {
                return Ok(Err(Invalid::Parity { pants: p }));
            }
        }
        for i in 0..self.dim() {
            if self.m[i] == 0 && self.t[i] < 0 {
                return Ok(Err(Invalid::NegativeTwist { cuff: i }));
            }
        }
        Ok(Ok(()))
    }

    /// Like [`DtCoords::validate`] but folds invalidity into the error type.
    pub fn ensure_valid(&self, s: &Surface) -> Result<()> {
        self.validate(s)?.map_err(Error::InvalidCoordinates)
    }
}

impl fmt::Display for DtCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "{};{}",
            join(self.m.iter().map(|x| x.to_string()).collect()),
            join(self.t.iter().map(|x| x.to_string()).collect())
        )
    }
}

impl FromStr for DtCoords {
    type Err = Error;

    /// Parses `m1,...,mn;t1,...,tn`.
    fn from_str(s: &str) -> Result<Self> {
        let (ms, ts) = s
            .trim()
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected 'm1,..;t1,..', got {s:?}")))?;
        let m = ms
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("intersection entry {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let t = ts
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("twist entry {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DtCoords::new(m, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_surface;

    fn c(s: &str) -> DtCoords {
        s.parse().unwrap()
    }

    #[test]
    fn validate_examples() {
        let g2 = build_surface(2).unwrap();
        assert_eq!(c("0,0,0;0,0,0").validate(&g2).unwrap(), Ok(()));
        assert_eq!(
            c("1,1,1;0,0,0").validate(&g2).unwrap(),
            Err(Invalid::Parity { pants: 0 })
        );
        assert_eq!(
            c("0,2,2;-1,0,0").validate(&g2).unwrap(),
            Err(Invalid::NegativeTwist { cuff: 0 })
        );
        assert!(c("0,0;0,0").validate(&g2).is_err());
    }

    /// (1,1,1) fails parity because the arc system of a pants with those
    /// crossing numbers has no nonnegative integral solution.
    #[test]
    fn odd_pants_has_no_arc_solution() {
        let m = [1i64, 1, 1];
        let mut found = false;
        // unknowns: x_aa, x_bb, x_cc, x_ab, x_bc, x_ca
        for v in 0..(4i64.pow(6)) {
            let x: Vec<i64> = (0..6).map(|k| (v / 4i64.pow(k)) % 4).collect();
            let a = 2 * x[0] + x[3] + x[5];
            let b = 2 * x[1] + x[3] + x[4];
            let cc = 2 * x[2] + x[4] + x[5];
            if [a, b, cc] == m {
                found = true;
            }
        }
        assert!(!found);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(c("2,0,0;0,3,0").norm(), 5);
        assert_eq!(c("0,0,0;0,0,0").norm(), 0);
        assert_eq!(c("1,1,0;-2,0,0").norm(), 4);
    }

    #[test]
    fn twist_examples() {
        assert_eq!(c("2,0,0;0,0,0").twist_about_cuff(0, 3).unwrap(), c("2,0,0;6,0,0"));
        assert_eq!(c("0,2,2;4,0,0").twist_about_cuff(0, 5).unwrap(), c("0,2,2;4,0,0"));
        assert_eq!(c("2,0,0;1,0,0").twist_about_cuff(0, -1).unwrap(), c("2,0,0;-1,0,0"));
        assert!(c("2,0,0;1,0,0").twist_about_cuff(3, 1).is_err());
    }

    #[test]
    fn add_examples() {
        let x = c("1,1,0;2,0,-1");
        assert_eq!(x.add(&DtCoords::zero(3)).unwrap(), x);
        assert_eq!(c("1,1,0;0,0,0").add(&c("1,1,0;0,0,0")).unwrap(), c("2,2,0;0,0,0"));
        assert_eq!(
            c("0,0,0;1,0,0").add(&c("0,0,0;-1,0,0")),
            Err(Error::MixedOrthants { cuff: 1 })
        );
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let x = c("3,0,1;-2,5,0");
        assert_eq!(x.to_string(), "3,0,1;-2,5,0");
        assert!("1,2,3".parse::<DtCoords>().is_err());
        assert!("1,2;3".parse::<DtCoords>().is_err());
        assert!("-1,0;0,0".parse::<DtCoords>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn norm_is_homogeneous(m in proptest::collection::vec(0u32..50, 3),
                               t in proptest::collection::vec(-50i64..50, 3),
                               k in 0u32..6) {
            let x = DtCoords::new(m, t).unwrap();
            proptest::prop_assert_eq!(x.scale(k).norm(), k as u64 * x.norm());
        }

        #[test]
        fn sums_stay_valid(a in proptest::collection::vec(0u32..10, 3),
                           b in proptest::collection::vec(0u32..10, 3),
                           ta in proptest::collection::vec(0i64..10, 3),
                           tb in proptest::collection::vec(0i64..10, 3)) {
            let g2 = build_surface(2).unwrap();
            let mut x = DtCoords::new(a, ta).unwrap();
            let mut y = DtCoords::new(b, tb).unwrap();
            // force parity
            if x.m.iter().sum::<u32>() % 2 == 1 { x.m[0] += 1; }
            if y.m.iter().sum::<u32>() % 2 == 1 { y.m[0] += 1; }
            proptest::prop_assert_eq!(x.add(&y).unwrap().validate(&g2).unwrap(), Ok(()));
        }
    }
}
