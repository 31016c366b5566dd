//! Sectors: cones over boxes in the unit sphere of the coordinate norm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    /// `t >= 0`
    Plus,
    /// `t < 0`
    Minus,
}

impl Sign {
    pub fn admits(self, t: i64) -> bool {
        match self {
            Sign::Plus => t >= 0,
            Sign::Minus => t < 0,
        }
    }
}

/// Interval `[lo, hi)` on a normalized coordinate; `hi = 1` is closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && (x < self.hi || (self.hi >= 1.0 && x <= 1.0))
    }
}

/// The cone over a box in `{||x|| = 1}`.
///
/// Normalized coordinates are `|x_j| / ||x||` for the full coordinate vector
/// (`m` entries first, then `t`). The optional orthant fixes the sign of
/// each signed coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub orthant: Option<Vec<Sign>>,
    pub bounds: Vec<Interval>,
}

impl Sector {
    /// The whole space, in coordinates of dimension `dim`.
    pub fn full(dim: usize) -> Self {
        Sector {
            orthant: None,
            bounds: vec![Interval::FULL; dim],
        }
    }

    pub fn is_full(&self) -> bool {
        self.orthant.is_none() && self.bounds.iter().all(|b| *b == Interval::FULL)
    }

    pub fn validate(&self, dim: usize, signed: usize) -> Result<()> {
        if self.bounds.len() != dim {
            return Err(Error::Sector(format!(
                "expected {dim} coordinate bounds, got {}",
                self.bounds.len()
            )));
        }
        if let Some(o) = &self.orthant {
            if o.len() != signed {
                return Err(Error::Sector(format!(
                    "expected {signed} orthant signs, got {}",
                    o.len()
                )));
            }
        }
        for b in &self.bounds {
            if !(0.0 <= b.lo && b.lo <= b.hi && b.hi <= 1.0) {
                return Err(Error::Sector(format!("interval [{}, {}) not in [0,1]", b.lo, b.hi)));
            }
        }
        Ok(())
    }

    /// Membership of a nonzero point. `signed_from` is the index of the first
    /// signed coordinate.
    pub fn contains(&self, x: &[i64], norm: u64, signed_from: usize) -> bool {
        if let Some(o) = &self.orthant {
            if !o.iter().zip(&x[signed_from..]).all(|(s, &t)| s.admits(t)) {
                return false;
            }
        }
        let n = norm as f64;
        self.bounds
            .iter()
            .zip(x)
            .all(|(b, &v)| b.contains(v.unsigned_abs() as f64 / n))
    }

    /// Parses `orthant=+-+;m1=0:0.5;t2=0.25:1` for a surface with `cuffs`
    /// cuffs. Unlisted coordinates are unconstrained. An empty string is the
    /// full sector.
    pub fn parse(s: &str, cuffs: usize) -> Result<Self> {
        let mut sector = Sector::full(2 * cuffs);
        for clause in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (key, val) = clause
                .split_once('=')
                .ok_or_else(|| Error::Sector(format!("clause {clause:?} lacks '='")))?;
            if key == "orthant" {
                let signs = val
                    .chars()
                    .map(|ch| match ch {
                        '+' => Ok(Sign::Plus),
                        '-' => Ok(Sign::Minus),
                        _ => Err(Error::Sector(format!("bad sign {ch:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                sector.orthant = Some(signs);
                continue;
            }
            let (kind, idx) = key.split_at(1);
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Sector(format!("bad coordinate name {key:?}")))?;
            if idx == 0 || idx > cuffs {
                return Err(Error::Sector(format!("coordinate {key:?} out of range")));
            }
            let j = match kind {
                "m" => idx - 1,
                "t" => cuffs + idx - 1,
                _ => return Err(Error::Sector(format!("bad coordinate name {key:?}"))),
            };
            let (lo, hi) = val
                .split_once(':')
                .ok_or_else(|| Error::Sector(format!("interval {val:?} lacks ':'")))?;
            let p = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Sector(format!("bad bound {x:?}")))
            };
            sector.bounds[j] = Interval { lo: p(lo)?, hi: p(hi)? };
        }
        sector.validate(2 * cuffs, cuffs)?;
        Ok(sector)
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cuffs = self.bounds.len() / 2;
        let mut parts = Vec::new();
        if let Some(o) = &self.orthant {
            let s: String = o
                .iter()
                .map(|s| if *s == Sign::Plus { '+' } else { '-' })
                .collect();
            parts.push(format!("orthant={s}"));
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if *b != Interval::FULL {
                let name = if j < cuffs {
                    format!("m{}", j + 1)
                } else {
                    format!("t{}", j - cuffs + 1)
                };
                parts.push(format!("{name}={}:{}", b.lo, b.hi));
            }
        }
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => Err(Error::Sector(format!("bad sign {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s = Sector::parse("orthant=+-+;m1=0:0.5;t2=0.25:1", 3).unwrap();
        assert_eq!(s.orthant, Some(vec![Sign::Plus, Sign::Minus, Sign::Plus]));
        assert_eq!(s.bounds[0], Interval { lo: 0.0, hi: 0.5 });
        assert_eq!(s.bounds[4], Interval { lo: 0.25, hi: 1.0 });
        assert_eq!(Sector::parse(&s.to_string(), 3).unwrap(), s);
        assert!(Sector::parse("", 3).unwrap().is_full());
        assert!(Sector::parse("m4=0:1", 3).is_err());
        assert!(Sector::parse("m1=0.6:0.5", 3).is_err());
        assert!(Sector::parse("orthant=++", 3).is_err());
    }

    #[test]
    fn half_open_intervals_partition() {
        let a = Interval { lo: 0.0, hi: 0.5 };
        let b = Interval { lo: 0.5, hi: 1.0 };
        for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(a.contains(x) ^ b.contains(x));
        }
    }
}
