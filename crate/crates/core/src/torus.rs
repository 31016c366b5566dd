//! The torus as a known-answer model: integral laminations are `(p, q)` in
//! `Z^2`, simple closed curves are the primitive vectors.

use num_integer::Integer;

use crate::enumeration::{Interner, LatticeModel};
use crate::error::{Error, Result};
use crate::topology::TypeInvariant;

/// Lattice `Z^2 \ 0` with norm `|p| + |q|`; the type of `(p, q)` records
/// `gcd(p, q)` parallel copies of a simple closed curve.
#[derive(Clone, Copy, Debug, Default)]
pub struct TorusModel;

impl TorusModel {
    /// Type of a simple closed curve on the torus (complement: one annulus).
    pub fn scc_type() -> TypeInvariant {
        Self::multiple(1)
    }

    fn multiple(k: u64) -> TypeInvariant {
        TypeInvariant::from_graph(vec![(0, 2)], vec![(0, 0, k)])
    }
}

impl LatticeModel for TorusModel {
    type Scratch = Interner;

    fn dim(&self) -> usize {
        2
    }

    fn signed_from(&self) -> usize {
        0
    }

    fn scratch(&self) -> Interner {
        Interner::default()
    }

    fn partitions(&self, max_norm: u64) -> Vec<Vec<i64>> {
        let l = max_norm as i64;
        (-l..=l).map(|p| vec![p]).collect()
    }

    fn visit(&self, prefix: &[i64], max_norm: u64, f: &mut dyn FnMut(&[i64], u64)) {
        let p = prefix[0];
        let Some(rest) = max_norm.checked_sub(p.unsigned_abs()) else {
            return;
        };
        let r = rest as i64;
        for q in -r..=r {
            if p != 0 || q != 0 {
                f(&[p, q], p.unsigned_abs() + q.unsigned_abs());
            }
        }
    }

    fn classify(&self, _: &mut Interner, point: &[i64]) -> TypeInvariant {
        Self::multiple(point[0].unsigned_abs().gcd(&point[1].unsigned_abs()))
    }

    fn classify_id(&self, scratch: &mut Interner, point: &[i64]) -> u32 {
        let t = self.classify(scratch, point);
        scratch.intern(t)
    }

    fn type_of<'a>(&self, scratch: &'a Interner, id: u32) -> &'a TypeInvariant {
        scratch.get(id)
    }

    fn describe(&self) -> String {
        "torus (p, q)".into()
    }
}

fn totients(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    phi
}

fn mobius(n: usize) -> Vec<i64> {
    let mut mu = vec![1i64; n + 1];
    let mut composite = vec![false; n + 1];
    for i in 2..=n {
        if !composite[i] {
            for j in (i..=n).step_by(i) {
                if j > i {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
            }
            let sq = i * i;
            for j in (sq..=n).step_by(sq) {
                mu[j] = 0;
            }
        }
    }
    mu
}

/// Primitive vectors with `|p| + |q| = s` number `4 phi(s)` for `s >= 2`.
pub fn primitive_count_sieve(l: u64) -> u64 {
    if l == 0 {
        return 0;
    }
    4 + 4 * totients(l as usize)[2..].iter().sum::<u64>()
}

/// `sum_d mu(d) A(floor(L / d))` with `A(n) = 2n(n + 1)` nonzero lattice
/// points in the ball.
pub fn primitive_count_mobius(l: u64) -> u64 {
    let mu = mobius(l as usize);
    let s: i128 = (1..=l)
        .map(|d| {
            let n = (l / d) as i128;
            mu[d as usize] as i128 * 2 * n * (n + 1)
        })
        .sum();
    s as u64
}

/// Number of primitive vectors with `|p| + |q| <= L`, computed two ways.
pub fn torus_primitive_count(l: u64) -> Result<u64> {
    let sieve = primitive_count_sieve(l);
    let mobius = primitive_count_mobius(l);
    if sieve != mobius {
        return Err(Error::TorusMismatch {
            norm: l,
            sieve,
            mobius,
        });
    }
    Ok(sieve)
}
