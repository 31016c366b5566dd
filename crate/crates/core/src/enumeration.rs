//! Streaming enumeration of integral points in norm balls and sectors, and
//! orbit counting.
//!
//! Work is split into partitions by the value of the first coordinates; each
//! partition is visited in a fixed order and results are merged with an
//! associative, commutative reduction, so counts do not depend on the worker
//! count.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coords::DtCoords;
use crate::decode::Decoder;
use crate::error::{Error, Result};
use crate::sector::Sector;
use crate::surface::Surface;
use crate::topology::TypeInvariant;

/// A lattice of integral laminations with a norm and a type classifier.
pub trait LatticeModel: Sync {
    type Scratch: Send;

    /// Length of the coordinate vector.
    fn dim(&self) -> usize;
    /// Index of the first coordinate constrained by a sector orthant.
    fn signed_from(&self) -> usize;
    fn scratch(&self) -> Self::Scratch;
    /// Work partitions for points of norm at most `max_norm`.
    fn partitions(&self, max_norm: u64) -> Vec<Vec<i64>>;
    /// Visits every valid nonzero point of norm at most `max_norm` in the
    /// partition, in a deterministic order.
    fn visit(&self, prefix: &[i64], max_norm: u64, f: &mut dyn FnMut(&[i64], u64));
    fn classify(&self, scratch: &mut Self::Scratch, point: &[i64]) -> TypeInvariant;
    /// Interned type id of `point`, stable for the lifetime of `scratch`.
    fn classify_id(&self, scratch: &mut Self::Scratch, point: &[i64]) -> u32;
    fn type_of<'a>(&self, scratch: &'a Self::Scratch, id: u32) -> &'a TypeInvariant;
    /// Short description for run metadata.
    fn describe(&self) -> String;
}

/// Integral multicurves on a closed surface in DT coordinates
/// `(m_1..m_n, t_1..t_n)` with norm `sum m + sum |t|`.
pub struct SurfaceModel<'s> {
    surface: &'s Surface,
    /// Pants whose last cuff (in enumeration order) is `i`.
    closes: Vec<Vec<[usize; 3]>>,
    /// Optional constraint `sum_i w_i m_i <= budget`.
    crossing_bound: Option<(Vec<f64>, f64)>,
}

pub struct SurfaceScratch<'s> {
    decoder: Decoder<'s>,
    coords: DtCoords,
    interner: Interner,
    // (m, t reduced mod m) -> type id; full twists preserve the type
    memo: HashMap<Vec<i64>, u32>,
    key: Vec<i64>,
}

const MEMO_CAP: usize = 1 << 20;

/// Assigns dense ids to types.
#[derive(Default)]
pub struct Interner {
    ids: HashMap<TypeInvariant, u32>,
    types: Vec<TypeInvariant>,
}

impl Interner {
    pub fn intern(&mut self, t: TypeInvariant) -> u32 {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.types.len() as u32;
        self.types.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    pub fn get(&self, id: u32) -> &TypeInvariant {
        &self.types[id as usize]
    }
}

impl<'s> SurfaceModel<'s> {
    pub fn new(surface: &'s Surface) -> Self {
        let mut closes = vec![Vec::new(); surface.num_cuffs];
        for p in &surface.decomposition.pants {
            let last = *p.iter().max().unwrap();
            closes[last].push(*p);
        }
        SurfaceModel {
            surface,
            closes,
            crossing_bound: None,
        }
    }

    /// Restricts to points with `sum_i weights[i] * m_i <= budget`.
    pub fn with_crossing_bound(mut self, weights: Vec<f64>, budget: f64) -> Self {
        assert_eq!(weights.len(), self.surface.num_cuffs);
        self.crossing_bound = Some((weights, budget));
        self
    }

    fn crossing_room(&self, i: usize, left: f64) -> u64 {
        match &self.crossing_bound {
            Some((w, _)) if w[i] > 0.0 => (left / w[i] + 1e-9).floor().max(0.0) as u64,
            _ => u64::MAX,
        }
    }

    fn crossing_budget(&self) -> f64 {
        self.crossing_bound.as_ref().map_or(f64::INFINITY, |b| b.1)
    }

    fn crossing_cost(&self, i: usize, m: i64) -> f64 {
        self.crossing_bound.as_ref().map_or(0.0, |(w, _)| w[i] * m as f64)
    }

    pub fn surface(&self) -> &'s Surface {
        self.surface
    }

    fn recurse(
        &self,
        i: usize,
        budget: u64,
        cross_left: f64,
        x: &mut [i64],
        max_norm: u64,
        f: &mut dyn FnMut(&[i64], u64),
    ) {
        let n = self.surface.num_cuffs;
        if i == n {
            let norm = max_norm - budget;
            if norm > 0 {
                f(x, norm);
            }
            return;
        }
        for m in 0..=budget.min(self.crossing_room(i, cross_left)) {
            x[i] = m as i64;
            if !self.closes[i]
                .iter()
                .all(|p| p.iter().map(|&c| x[c]).sum::<i64>() % 2 == 0)
            {
                continue;
            }
            let rest = budget - m;
            let lo = if m == 0 { 0 } else { -(rest as i64) };
            for t in lo..=rest as i64 {
                x[n + i] = t;
                let left = cross_left - self.crossing_cost(i, m as i64);
                self.recurse(i + 1, rest - t.unsigned_abs(), left, x, max_norm, f);
            }
        }
        x[i] = 0;
        x[n + i] = 0;
    }
}

impl<'s> LatticeModel for SurfaceModel<'s> {
    type Scratch = SurfaceScratch<'s>;

    fn dim(&self) -> usize {
        2 * self.surface.num_cuffs
    }

    fn signed_from(&self) -> usize {
        self.surface.num_cuffs
    }

    fn scratch(&self) -> Self::Scratch {
        SurfaceScratch {
            decoder: Decoder::new(self.surface),
            coords: DtCoords::zero(self.surface.num_cuffs),
            interner: Interner::default(),
            memo: HashMap::new(),
            key: Vec::with_capacity(2 * self.surface.num_cuffs),
        }
    }

    fn partitions(&self, max_norm: u64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let top = max_norm.min(self.crossing_room(0, self.crossing_budget()));
        for m in 0..=top as i64 {
            let rest = max_norm as i64 - m;
            let lo = if m == 0 { 0 } else { -rest };
            for t in lo..=rest {
                out.push(vec![m, t]);
            }
        }
        out
    }

    fn visit(&self, prefix: &[i64], max_norm: u64, f: &mut dyn FnMut(&[i64], u64)) {
        let n = self.surface.num_cuffs;
        let (m, t) = (prefix[0], prefix[1]);
        let used = m as u64 + t.unsigned_abs();
        if used > max_norm || m < 0 || (m == 0 && t < 0) {
            return;
        }
        let cross_left = self.crossing_budget() - self.crossing_cost(0, m);
        if cross_left < -1e-9 {
            return;
        }
        if !self.closes[0]
            .iter()
            .all(|p| p.iter().map(|&c| if c == 0 { m } else { 0 }).sum::<i64>() % 2 == 0)
        {
            return;
        }
        let mut x = vec![0i64; 2 * n];
        x[0] = m;
        x[n] = t;
        self.recurse(1, max_norm - used, cross_left, &mut x, max_norm, f);
    }

    fn classify(&self, scratch: &mut Self::Scratch, point: &[i64]) -> TypeInvariant {
        let n = self.surface.num_cuffs;
        for i in 0..n {
            scratch.coords.m[i] = point[i] as u32;
            scratch.coords.t[i] = point[n + i];
        }
        scratch.decoder.classify(&scratch.coords)
    }

    fn classify_id(&self, scratch: &mut Self::Scratch, point: &[i64]) -> u32 {
        let n = self.surface.num_cuffs;
        scratch.key.clear();
        scratch.key.extend_from_slice(&point[..n]);
        for i in 0..n {
            let (m, t) = (point[i], point[n + i]);
            scratch.key.push(if m > 0 { t.rem_euclid(m) } else { t });
        }
        if let Some(&id) = scratch.memo.get(&scratch.key[..]) {
            return id;
        }
        let t = self.classify(scratch, point);
        let id = scratch.interner.intern(t);
        if scratch.memo.len() >= MEMO_CAP {
            scratch.memo.clear();
        }
        scratch.memo.insert(scratch.key.clone(), id);
        id
    }

    fn type_of<'a>(&self, scratch: &'a Self::Scratch, id: u32) -> &'a TypeInvariant {
        scratch.interner.get(id)
    }

    fn describe(&self) -> String {
        format!("genus {} DT coordinates", self.surface.genus)
    }
}

/// Collects every valid nonzero point of norm at most `max_norm` (and in the
/// sector, if given), partition by partition.
pub fn enumerate<M: LatticeModel>(
    model: &M,
    max_norm: u64,
    sector: Option<&Sector>,
) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_point(model, max_norm, sector, |x, _| out.push(x.to_vec()));
    out
}

/// Sequential streaming visit of the points [`enumerate`] would return.
pub fn for_each_point<M: LatticeModel>(
    model: &M,
    max_norm: u64,
    sector: Option<&Sector>,
    mut f: impl FnMut(&[i64], u64),
) {
    let from = model.signed_from();
    for prefix in model.partitions(max_norm) {
        model.visit(&prefix, max_norm, &mut |x, norm| {
            if sector.is_none_or(|s| s.contains(x, norm, from)) {
                f(x, norm)
            }
        });
    }
}

/// Per-type histograms indexed by norm.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histograms {
    pub max_norm: u64,
    pub by_type: BTreeMap<TypeInvariant, Vec<u64>>,
}

impl Histograms {
    fn merge(mut self, other: Histograms) -> Histograms {
        for (k, v) in other.by_type {
            let e = self
                .by_type
                .entry(k)
                .or_insert_with(|| vec![0; v.len()]);
            for (a, b) in e.iter_mut().zip(v) {
                *a += b;
            }
        }
        self
    }

    /// Cumulative count of points of type `t` with norm at most `l`.
    pub fn cumulative(&self, t: &TypeInvariant, l: u64) -> u64 {
        self.by_type
            .get(t)
            .map_or(0, |h| h[..=(l.min(self.max_norm) as usize)].iter().sum())
    }

    pub fn total(&self, l: u64) -> u64 {
        self.by_type
            .values()
            .map(|h| h[..=(l.min(self.max_norm) as usize)].iter().sum::<u64>())
            .sum()
    }

    /// Rows `(L, type, count)` for every type and grid value.
    pub fn table(&self, grid: &[u64]) -> Vec<CountRow> {
        let mut rows = Vec::new();
        for &l in grid {
            for (k, h) in &self.by_type {
                let c: u64 = h[..=(l.min(self.max_norm) as usize)].iter().sum();
                if c > 0 {
                    rows.push(CountRow {
                        l: l as f64,
                        type_key: k.to_string(),
                        count: c,
                    });
                }
            }
        }
        rows
    }
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Classifies every point of norm at most `max_norm` in the sector.
pub fn histograms<M: LatticeModel>(
    model: &M,
    max_norm: u64,
    sector: Option<&Sector>,
) -> Histograms {
    let from = model.signed_from();
    let len = max_norm as usize + 1;
    let empty = || Histograms {
        max_norm,
        by_type: BTreeMap::new(),
    };
    model
        .partitions(max_norm)
        .into_par_iter()
        .map_init(
            || model.scratch(),
            |scratch, prefix| {
                let mut local: Vec<Vec<u64>> = Vec::new();
                model.visit(&prefix, max_norm, &mut |x, norm| {
                    if sector.is_none_or(|s| s.contains(x, norm, from)) {
                        let id = model.classify_id(scratch, x) as usize;
                        if id >= local.len() {
                            local.resize_with(id + 1, Vec::new);
                        }
                        if local[id].is_empty() {
                            local[id] = vec![0; len];
                        }
                        local[id][norm as usize] += 1;
                    }
                });
                let by_type = local
                    .into_iter()
                    .enumerate()
                    .filter(|(_, h)| !h.is_empty())
                    .map(|(id, h)| (model.type_of(scratch, id as u32).clone(), h))
                    .collect();
                Histograms { max_norm, by_type }
            },
        )
        .reduce(empty, Histograms::merge)
}

/// Number of points per norm value, without classification.
pub fn norm_histogram<M: LatticeModel>(
    model: &M,
    max_norm: u64,
    sector: Option<&Sector>,
) -> Vec<u64> {
    let from = model.signed_from();
    let len = max_norm as usize + 1;
    model
        .partitions(max_norm)
        .into_par_iter()
        .map(|prefix| {
            let mut h = vec![0u64; len];
            model.visit(&prefix, max_norm, &mut |x, norm| {
                if sector.is_none_or(|s| s.contains(x, norm, from)) {
                    h[norm as usize] += 1;
                }
            });
            h
        })
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub type_key: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl CountTable {
    /// `L,type_key,count` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,type_key,count\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", fmt_l(r.l), r.type_key, r.count));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", i + 1)));
            }
            let bad = |e: String| Error::Parse(format!("line {}: {e}", i + 1));
            rows.push(CountRow {
                l: f[0].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                type_key: f[1].to_string(),
                count: f[2].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            });
        }
        Ok(CountTable {
            rows,
            metadata: BTreeMap::new(),
        })
    }

    /// `(L, count)` series for one type, in grid order.
    pub fn series(&self, type_key: &str) -> Vec<(f64, u64)> {
        self.rows
            .iter()
            .filter(|r| r.type_key == type_key)
            .map(|r| (r.l, r.count))
            .collect()
    }

    /// Sum over types at each grid value.
    pub fn totals(&self) -> Vec<(f64, u64)> {
        let mut acc: Vec<(f64, u64)> = Vec::new();
        for r in &self.rows {
            match acc.iter_mut().find(|(l, _)| *l == r.l) {
                Some(e) => e.1 += r.count,
                None => acc.push((r.l, r.count)),
            }
        }
        acc
    }
}

fn fmt_l(l: f64) -> String {
    if l.fract() == 0.0 && l.abs() < 1e15 {
        format!("{}", l as i64)
    } else {
        format!("{l}")
    }
}

fn check_grid(grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("empty L grid".into()));
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("L grid must be positive and increasing".into()));
    }
    Ok(())
}

/// Orbit counts on the grid: for each `L` and type, the number of integral
/// multicurves of that type with norm at most `L`.
pub fn count_by_type<M: LatticeModel>(
    model: &M,
    grid: &[u64],
    sector: Option<&Sector>,
) -> Result<CountTable> {
    check_grid(grid)?;
    if let Some(s) = sector {
        s.validate(model.dim(), model.dim() - model.signed_from())?;
    }
    let h = histograms(model, *grid.last().unwrap(), sector);
    let mut metadata = BTreeMap::new();
    metadata.insert("model".into(), model.describe().into());
    metadata.insert("norm".into(), "sum m + sum |t|".into());
    metadata.insert(
        "sector".into(),
        sector.map_or("full".to_string(), |s| s.to_string()).into(),
    );
    Ok(CountTable {
        rows: h.table(grid),
        metadata,
    })
}

/// Counts of one type restricted to a sector.
pub fn count_in_sector<M: LatticeModel>(
    model: &M,
    t: &TypeInvariant,
    sector: &Sector,
    grid: &[u64],
) -> Result<CountTable> {
    let key = t.to_string();
    let mut table = count_by_type(model, grid, Some(sector))?;
    let mut rows = Vec::new();
    for &l in grid {
        let count = table
            .rows
            .iter()
            .find(|r| r.type_key == key && r.l == l as f64)
            .map_or(0, |r| r.count);
        rows.push(CountRow {
            l: l as f64,
            type_key: key.clone(),
            count,
        });
    }
    table.rows = rows;
    Ok(table)
}

/// Rank over GF(2) of the per-pants parity conditions.
pub fn parity_rank(s: &Surface) -> usize {
    let n = s.num_cuffs;
    let mut rows: Vec<Vec<u8>> = s
        .decomposition
        .pants
        .iter()
        .map(|p| {
            let mut r = vec![0u8; n];
            for &c in p {
                r[c] ^= 1;
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        if let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] == 1) {
            rows.swap(rank, piv);
            for i in 0..rows.len() {
                if i != rank && rows[i][col] == 1 {
                    let pivot = rows[rank].clone();
                    for (a, b) in rows[i].iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact leading coefficient `lim N(L) / L^(6g-6)` of the lattice count:
/// the volume `2^n / (2n)!` of `{m >= 0, sum m + sum |t| <= 1}` (with
/// `n = 3g - 3`) times the density `2^-r` of the parity sublattice.
pub fn leading_coefficient(s: &Surface) -> BigRational {
    let n = s.num_cuffs;
    let r = parity_rank(s);
    let two = BigInt::from(2);
    let num = num_traits::pow(two.clone(), n);
    let den = factorial(2 * n) * num_traits::pow(two, r);
    BigRational::new(num, den)
}

/// Leading coefficient for the torus lattice `{|p| + |q| <= L}`.
pub fn torus_leading_coefficient() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
