//! Train tracks with exact rational weights, the Thurston form, and the
//! standard tracks carrying a twist-sign orthant of DT coordinates.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coords::DtCoords;
use crate::error::{Error, Result};
use crate::linalg::{self, int, Matrix};
use crate::sector::Sign;
use crate::surface::Surface;

/// A trivalent switch: `e1` enters on the right of the common tangent, `e2`
/// on the left, `out` leaves on the other side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub e1: usize,
    pub e2: usize,
    pub out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainTrack {
    pub branches: Vec<String>,
    pub switches: Vec<Switch>,
    /// Number of sides of each complementary region.
    pub type_vector: Vec<u32>,
    pub orientable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(pub Vec<BigRational>);

impl WeightVector {
    pub fn from_ints(v: &[i64]) -> Self {
        WeightVector(v.iter().map(|&x| int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl std::str::FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<BigRational>()
                    .map_err(|e| Error::Parse(format!("weight {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(WeightVector)
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|x| x.parse::<BigRational>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(WeightVector)
    }
}

impl TrainTrack {
    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    /// Number of switch slots each branch occupies.
    fn attachments(&self) -> Vec<usize> {
        let mut a = vec![0; self.branches.len()];
        for s in &self.switches {
            for e in [s.e1, s.e2, s.out] {
                if e < a.len() {
                    a[e] += 1;
                }
            }
        }
        a
    }

    /// Every branch end sits in exactly one switch slot; branches without
    /// switches are closed loops.
    pub fn check(&self) -> Result<()> {
        let n = self.branches.len();
        for s in &self.switches {
            if s.e1 >= n || s.e2 >= n || s.out >= n {
                return Err(Error::Parse(format!("switch {s:?} names a missing branch")));
            }
        }
        for (e, &k) in self.attachments().iter().enumerate() {
            if k != 0 && k != 2 {
                return Err(Error::Parse(format!(
                    "branch {} has {k} attached ends",
                    self.branches[e]
                )));
            }
        }
        Ok(())
    }

    /// Every branch ends at switches (no free loops) and there is at least
    /// one switch.
    pub fn is_maximal(&self) -> bool {
        !self.switches.is_empty() && self.attachments().iter().all(|&k| k == 2)
    }

    fn check_len(&self, w: &WeightVector) -> Result<()> {
        if w.len() != self.branches.len() {
            return Err(Error::WeightLength {
                expected: self.branches.len(),
                got: w.len(),
            });
        }
        Ok(())
    }

    pub fn validate_switch_conditions(&self, w: &WeightVector) -> Result<bool> {
        self.check_len(w)?;
        Ok(self
            .switches
            .iter()
            .all(|s| &w.0[s.e1] + &w.0[s.e2] == w.0[s.out]))
    }

    fn switch_matrix(&self) -> Matrix {
        let n = self.branches.len();
        self.switches
            .iter()
            .map(|s| {
                let mut row = vec![BigRational::zero(); n];
                row[s.e1] += int(1);
                row[s.e2] += int(1);
                row[s.out] -= int(1);
                row
            })
            .collect()
    }

    /// Dimension of the solution space of the switch conditions.
    pub fn weight_space_dim(&self) -> usize {
        self.branches.len() - linalg::rank(&self.switch_matrix())
    }

    /// `2g + k - 1` (orientable) or `2g + k - 2`, with `k` the number of
    /// complementary regions.
    pub fn expected_dim(&self, genus: usize) -> usize {
        let k = self.type_vector.len();
        if self.orientable {
            2 * genus + k - 1
        } else {
            2 * genus + k - 2
        }
    }

    /// `sum a_i == 4g - 4 + 2k`.
    pub fn type_consistent(&self, genus: usize) -> bool {
        let k = self.type_vector.len();
        self.type_vector.iter().map(|&a| a as usize).sum::<usize>() == 4 * genus - 4 + 2 * k
    }

    /// Basis of the switch-condition space.
    pub fn weight_space_basis(&self) -> Vec<WeightVector> {
        linalg::nullspace(&self.switch_matrix(), self.branches.len())
            .into_iter()
            .map(WeightVector)
            .collect()
    }

    /// `omega(u, v) = 1/2 sum over switches of u(e1) v(e2) - u(e2) v(e1)`.
    pub fn thurston_form(&self, u: &WeightVector, v: &WeightVector) -> Result<BigRational> {
        if !self.is_maximal() {
            return Err(Error::NotMaximal(
                "incoming pairs are only ordered at trivalent switches".into(),
            ));
        }
        self.check_len(u)?;
        self.check_len(v)?;
        let mut acc = BigRational::zero();
        for s in &self.switches {
            acc += &u.0[s.e1] * &v.0[s.e2] - &u.0[s.e2] * &v.0[s.e1];
        }
        Ok(acc / int(2))
    }

    /// Gram matrix of the Thurston form on [`Self::weight_space_basis`].
    pub fn gram_matrix(&self) -> Result<Matrix> {
        let basis = self.weight_space_basis();
        basis
            .iter()
            .map(|u| basis.iter().map(|v| self.thurston_form(u, v)).collect())
            .collect()
    }

    pub fn gram_rank(&self) -> Result<usize> {
        Ok(linalg::rank(&self.gram_matrix()?))
    }

    /// A weight vector with every entry at least 1 satisfying the switch
    /// conditions, if one exists (exact phase-one simplex).
    pub fn positive_weights(&self) -> Option<WeightVector> {
        // w = 1 + x with x >= 0:  A x = -A 1
        let a = self.switch_matrix();
        let b: Vec<BigRational> = a
            .iter()
            .map(|row| -row.iter().cloned().sum::<BigRational>())
            .collect();
        let x = linalg::feasible_point(&a, &b)?;
        Some(WeightVector(x.into_iter().map(|v| v + BigRational::one()).collect()))
    }
}

/// A maximal track carrying one twist-sign orthant, with the linear map
/// from DT coordinates to branch weights.
#[derive(Clone, Debug)]
pub struct StandardTrack {
    pub track: TrainTrack,
    pub orthant: Vec<Sign>,
    /// Rows: branches; columns: `m_1..m_n, t_1..t_n`.
    pub map: Matrix,
    /// Branches whose weights sum to the DT norm.
    pub norm_branches: Vec<usize>,
}

/// Standard track of the orthant: four segments around each cuff and, in
/// each pants, one connector per pair of boundary slots.
pub fn standard_track(s: &Surface, orthant: &[Sign]) -> Result<StandardTrack> {
    let n = s.num_cuffs;
    if orthant.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: orthant.len(),
        });
    }
    let nb = 4 * n + 3 * s.num_pants;
    let seg = |i: usize, k: usize| 4 * i + k;
    let conn = |p: usize, k: usize| 4 * n + 3 * p + k;
    let mut branches = vec![String::new(); nb];
    let mut map: Matrix = vec![vec![BigRational::zero(); 2 * n]; nb];
    let half = BigRational::new(1.into(), 2.into());

    // connector k of pants p joins slots k and k+1
    for (p, cuffs) in s.decomposition.pants.iter().enumerate() {
        for k in 0..3 {
            branches[conn(p, k)] = format!("p{}c{}{}", p + 1, k + 1, (k + 1) % 3 + 1);
            let row = &mut map[conn(p, k)];
            row[cuffs[k]] += &half;
            row[cuffs[(k + 1) % 3]] += &half;
            row[cuffs[(k + 2) % 3]] -= &half;
        }
    }

    let mut switches = Vec::with_capacity(4 * n);
    let mut norm_branches = Vec::with_capacity(n);
    for (i, sign) in orthant.iter().enumerate() {
        let cuff = s.cuff(i);
        let plus_of = |sl: crate::surface::Slot| conn(sl.pants, sl.slot);
        let minus_of = |sl: crate::surface::Slot| conn(sl.pants, (sl.slot + 2) % 3);
        let (ap, am) = (plus_of(cuff.a), minus_of(cuff.a));
        let (bp, bm) = (plus_of(cuff.b), minus_of(cuff.b));
        let g = [seg(i, 0), seg(i, 1), seg(i, 2), seg(i, 3)];
        for (k, &b) in g.iter().enumerate() {
            branches[b] = format!("k{}s{}", i + 1, k);
        }
        let sigma = match sign {
            Sign::Plus => int(1),
            Sign::Minus => int(-1),
        };
        for &b in &g {
            map[b][n + i] = sigma.clone();
        }
        let add = |map: &mut Matrix, to: usize, from: usize| {
            let src = map[from].clone();
            for (x, y) in map[to].iter_mut().zip(src) {
                *x += y;
            }
        };
        match sign {
            Sign::Plus => {
                add(&mut map, g[0], ap);
                map[g[1]][i] += int(1);
                add(&mut map, g[2], bp);
                switches.extend([
                    Switch { e1: g[3], e2: ap, out: g[0] },
                    Switch { e1: g[0], e2: am, out: g[1] },
                    Switch { e1: g[2], e2: bm, out: g[1] },
                    Switch { e1: g[3], e2: bp, out: g[2] },
                ]);
                norm_branches.push(g[1]);
            }
            Sign::Minus => {
                add(&mut map, g[0], am);
                map[g[3]][i] += int(1);
                add(&mut map, g[2], bm);
                switches.extend([
                    Switch { e1: am, e2: g[1], out: g[0] },
                    Switch { e1: ap, e2: g[0], out: g[3] },
                    Switch { e1: bp, e2: g[2], out: g[3] },
                    Switch { e1: bm, e2: g[1], out: g[2] },
                ]);
                norm_branches.push(g[3]);
            }
        }
    }
    let track = TrainTrack {
        branches,
        switches,
        type_vector: vec![3; 4 * s.genus - 4],
        orientable: false,
    };
    track.check()?;
    Ok(StandardTrack {
        track,
        orthant: orthant.to_vec(),
        map,
        norm_branches,
    })
}

impl StandardTrack {
    /// Branch weights of the coordinates; twists must have the orthant's
    /// sign or vanish.
    pub fn weights(&self, c: &DtCoords) -> Result<WeightVector> {
        let n = self.orthant.len();
        if c.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.dim(),
            });
        }
        for (i, (&t, sign)) in c.t.iter().zip(&self.orthant).enumerate() {
            let ok = match sign {
                Sign::Plus => t >= 0,
                Sign::Minus => t <= 0,
            };
            if !ok {
                return Err(Error::Sector(format!(
                    "twist {t} on cuff {} is outside the orthant",
                    i + 1
                )));
            }
        }
        let x: Vec<BigRational> = c
            .m
            .iter()
            .map(|&m| int(m as i64))
            .chain(c.t.iter().map(|&t| int(t)))
            .collect();
        Ok(WeightVector(
            self.map
                .iter()
                .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn norm(&self, w: &WeightVector) -> BigRational {
        self.norm_branches.iter().map(|&b| w.0[b].clone()).sum()
    }

    /// Rank of the coordinate map (injective when equal to `2n`).
    pub fn map_rank(&self) -> usize {
        linalg::rank(&self.map)
    }
}
