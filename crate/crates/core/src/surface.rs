//! Closed genus-g surfaces with a fixed pants decomposition.
//!
//! Layout. Genus 2: two pants glued along all three cuffs, slot `s` of pants
//! 0 to slot `s` of pants 1. Genus g >= 3 is a linear chain:
//!
//! * pants 0 has slots `(x, x, s_1)`: slots 0 and 1 glued to each other;
//! * for `j = 1..g-2`, pants `2j-1 = (s_j, b_j, c_j)` and `2j = (b_j, c_j, s_{j+1})`;
//! * the last pants is `(s_{g-1}, y, y)` with slots 1 and 2 glued.
//!
//! Every gluing reverses boundary orientation. The boundary orientation of a
//! slot keeps its pants on the left.

use serde::Serialize;

use crate::error::{Error, Result};

/// Identifies one boundary slot of one pants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub pants: usize,
    pub slot: usize,
}

/// One cuff: the orbit `{a, b}` of the gluing involution.
///
/// `a` is the reference side of the cuff; twists are measured along the
/// boundary orientation of `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cuff {
    pub a: Slot,
    pub b: Slot,
    pub orientation_reversing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PantsDecomposition {
    /// `pants[p][s]` is the cuff attached at slot `s` of pants `p`.
    pub pants: Vec<[usize; 3]>,
    pub cuffs: Vec<Cuff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Surface {
    pub genus: usize,
    /// `6g - 6`, the real dimension of the space of measured laminations.
    pub h: usize,
    pub num_cuffs: usize,
    pub num_pants: usize,
    pub decomposition: PantsDecomposition,
}

/// Which side of its cuff a slot is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl PantsDecomposition {
    /// The slot glued to `slot`.
    pub fn partner(&self, slot: Slot) -> Slot {
        let c = &self.cuffs[self.pants[slot.pants][slot.slot]];
        if c.a == slot {
            c.b
        } else {
            c.a
        }
    }

    pub fn side(&self, slot: Slot) -> Side {
        let c = &self.cuffs[self.pants[slot.pants][slot.slot]];
        if c.a == slot {
            Side::A
        } else {
            Side::B
        }
    }

    /// Checks that gluing is a fixed-point-free involution whose orbits are
    /// exactly the listed cuffs.
    pub fn check_involution(&self) -> bool {
        let mut seen = vec![[false; 3]; self.pants.len()];
        for (i, c) in self.cuffs.iter().enumerate() {
            if c.a == c.b || !c.orientation_reversing {
                return false;
            }
            for s in [c.a, c.b] {
                if s.pants >= self.pants.len() || s.slot >= 3 {
                    return false;
                }
                if seen[s.pants][s.slot] || self.pants[s.pants][s.slot] != i {
                    return false;
                }
                seen[s.pants][s.slot] = true;
            }
            if self.partner(self.partner(c.a)) != c.a || self.partner(c.a) != c.b {
                return false;
            }
        }
        seen.iter().all(|p| p.iter().all(|&x| x))
    }

    /// Euler characteristic of the cell structure made of the two hexagons of
    /// every pants. Each slot carries two seam feet; on a glued cuff the feet
    /// of the two sides are distinct vertices (generic twist), so a cuff circle
    /// is cut into four edges.
    pub fn cell_euler_characteristic(&self) -> i64 {
        let vertices: i64 = self.cuffs.len() as i64 * 4;
        let cuff_edges = vertices;
        let seams = 3 * self.pants.len() as i64;
        let faces = 2 * self.pants.len() as i64;
        vertices - (cuff_edges + seams) + faces
    }
}

impl Surface {
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    pub fn cuff(&self, i: usize) -> &Cuff {
        &self.decomposition.cuffs[i]
    }
}

/// Builds the canonical surface of the given genus (see module docs for the layout).
pub fn build_surface(genus: usize) -> Result<Surface> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let num_pants = 2 * genus - 2;
    let num_cuffs = 3 * genus - 3;
    let mut pants = vec![[usize::MAX; 3]; num_pants];
    let mut cuffs = Vec::with_capacity(num_cuffs);
    let mut glue = |pants: &mut Vec<[usize; 3]>, a: Slot, b: Slot| {
        let idx = cuffs.len();
        pants[a.pants][a.slot] = idx;
        pants[b.pants][b.slot] = idx;
        cuffs.push(Cuff {
            a,
            b,
            orientation_reversing: true,
        });
    };
    let sl = |pants, slot| Slot { pants, slot };

    if genus == 2 {
        for s in 0..3 {
            glue(&mut pants, sl(0, s), sl(1, s));
        }
    } else {
        let last = num_pants - 1;
        glue(&mut pants, sl(0, 0), sl(0, 1));
        // s_1 joins pants 0 to pants 1
        glue(&mut pants, sl(0, 2), sl(1, 0));
        for j in 1..=genus - 2 {
            let p = 2 * j - 1;
            let q = 2 * j;
            glue(&mut pants, sl(p, 1), sl(q, 0));
            glue(&mut pants, sl(p, 2), sl(q, 1));
            // s_{j+1}
            glue(&mut pants, sl(q, 2), sl(q + 1, 0));
        }
        glue(&mut pants, sl(last, 1), sl(last, 2));
    }

    let decomposition = PantsDecomposition { pants, cuffs };
    debug_assert_eq!(decomposition.cuffs.len(), num_cuffs);
    Ok(Surface {
        genus,
        h: 6 * genus - 6,
        num_cuffs,
        num_pants,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let s = build_surface(2).unwrap();
        assert_eq!((s.h, s.num_cuffs, s.num_pants), (6, 3, 2));
        let s = build_surface(3).unwrap();
        assert_eq!((s.h, s.num_cuffs, s.num_pants), (12, 6, 4));
    }

    #[test]
    fn rejects_low_genus() {
        assert_eq!(build_surface(1), Err(Error::GenusTooSmall(1)));
        assert!(build_surface(0).is_err());
    }

    #[test]
    fn involution_and_euler_characteristic() {
        for g in 2..=6 {
            let s = build_surface(g).unwrap();
            assert!(s.decomposition.check_involution(), "genus {g}");
            assert_eq!(s.decomposition.cell_euler_characteristic(), s.euler_characteristic());
            assert_eq!(-(s.num_pants as i64), s.euler_characteristic());
        }
    }

    #[test]
    fn genus_two_pants_share_all_cuffs() {
        let s = build_surface(2).unwrap();
        assert_eq!(s.decomposition.pants, vec![[0, 1, 2], [0, 1, 2]]);
    }

    #[test]
    fn deterministic() {
        assert_eq!(build_surface(4).unwrap(), build_surface(4).unwrap());
    }
}
