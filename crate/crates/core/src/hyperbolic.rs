//! Hyperbolic metrics from Fenchel-Nielsen data: holonomy of the surface
//! group and lengths of multicurves.
//!
//! Each pants is cut into two right-angled hexagons. Frames sit at a
//! basepoint on every boundary slot; `G[a][b]` carries the frame at slot `a`
//! to the frame at slot `b` along the seam. Crossing a cuff moves along it by
//! the twist plus whole turns and then flips to the other side.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coords::DtCoords;
use crate::decode::{Component, ComponentKind, Decoder, MultiCurve, Step};
use crate::error::{Error, Result};
use crate::surface::{Side, Surface};

pub type Mat = [[f64; 2]; 2];

pub const IDENTITY: Mat = [[1.0, 0.0], [0.0, 1.0]];

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Inverse of a determinant-one matrix.
pub fn inv(a: &Mat) -> Mat {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn trace(a: &Mat) -> f64 {
    a[0][0] + a[1][1]
}

pub fn det(a: &Mat) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Translation by `d` along the geodesic through the frame.
pub fn translate(d: f64) -> Mat {
    [[(d / 2.0).exp(), 0.0], [0.0, (-d / 2.0).exp()]]
}

/// Rotation by `phi` about the frame's basepoint.
pub fn rotate(phi: f64) -> Mat {
    let (s, c) = (phi / 2.0).sin_cos();
    [[c, -s], [s, c]]
}

fn chain(ms: &[Mat]) -> Mat {
    ms.iter().fold(IDENTITY, |acc, m| mul(&acc, m))
}

/// `arccosh(x)` for `x >= 1`, accurate near 1.
pub fn arccosh(x: f64) -> f64 {
    let y = x - 1.0;
    (y + (y * (x + 1.0)).sqrt()).ln_1p()
}

/// Translation length `2 arccosh(|tr| / 2)` of a hyperbolic element.
pub fn translation_length(m: &Mat) -> Result<f64> {
    let t = trace(m).abs();
    if t.is_nan() || t <= 2.0 {
        return Err(Error::NonHyperbolic { trace: t });
    }
    Ok(2.0 * arccosh(t / 2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FenchelNielsen {
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FenchelNielsen {
    pub fn new(lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self> {
        if lengths.len() != twists.len() {
            return Err(Error::InvalidMetric(format!(
                "{} lengths but {} twists",
                lengths.len(),
                twists.len()
            )));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidMetric(format!(
                    "length of cuff {} must be positive and finite, got {l}",
                    i + 1
                )));
            }
        }
        if let Some(i) = twists.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidMetric(format!("twist of cuff {} is not finite", i + 1)));
        }
        Ok(FenchelNielsen { lengths, twists })
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }
}

impl FromStr for FenchelNielsen {
    type Err = Error;

    /// `l1,...,ln;theta1,...,thetan`
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected `lengths;twists`, got {s:?}")))?;
        let nums = |part: &str| -> Result<Vec<f64>> {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
                })
                .collect()
        };
        FenchelNielsen::new(nums(a)?, nums(b)?)
    }
}

impl fmt::Display for FenchelNielsen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", j(&self.lengths), j(&self.twists))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// Loop around boundary slot `slot` of `pants`, based at the pants frame.
    Loop { pants: usize, slot: usize },
    /// Passage across a cuff that is not in the spanning tree of the dual
    /// graph.
    Edge { cuff: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    /// Free and cyclic reduction.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            match out.last() {
                Some(p) if p.generator == l.generator && p.inverse != l.inverse => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        let mut lo = 0;
        let mut hi = out.len();
        while hi - lo >= 2
            && out[lo].generator == out[hi - 1].generator
            && out[lo].inverse != out[hi - 1].inverse
        {
            lo += 1;
            hi -= 1;
        }
        Word(out[lo..hi].to_vec())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let w = &self.0;
        let cancels = |a: &Letter, b: &Letter| a.generator == b.generator && a.inverse != b.inverse;
        w.windows(2).all(|p| !cancels(&p[0], &p[1]))
            && (w.len() < 2 || !cancels(&w[0], &w[w.len() - 1]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn push_power(&mut self, generator: usize, k: i64) {
        let inverse = k < 0;
        for _ in 0..k.unsigned_abs() {
            self.0.push(Letter { generator, inverse });
        }
    }
}

/// Holonomy data for one metric.
#[derive(Clone, Debug)]
pub struct SurfaceGroupRep {
    pub generators: Vec<Generator>,
    pub matrices: Vec<Mat>,
    lengths: Vec<f64>,
    twists: Vec<f64>,
    /// Per pants, seam transport between slot frames.
    seam: Vec<[[Mat; 3]; 3]>,
    loop_gen: Vec<[usize; 3]>,
    edge_gen: Vec<Option<usize>>,
    /// Side-A slot of each cuff, as (pants, slot), and side B.
    sides: Vec<[(usize, usize); 2]>,
    pants_cuffs: Vec<[usize; 3]>,
}

/// Seam length between boundaries of lengths `la`, `lb` opposite `lc`.
fn seam_length(la: f64, lb: f64, lc: f64) -> f64 {
    let (ha, hb, hc) = (la / 2.0, lb / 2.0, lc / 2.0);
    arccosh((hc.cosh() + ha.cosh() * hb.cosh()) / (ha.sinh() * hb.sinh()))
}

fn pants_seams(l: [f64; 3]) -> [[Mat; 3]; 3] {
    let q = rotate(std::f64::consts::FRAC_PI_2);
    let mut g = [[IDENTITY; 3]; 3];
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        let dab = seam_length(l[a], l[b], l[c]);
        let dca = seam_length(l[c], l[a], l[b]);
        g[a][b] = chain(&[
            translate(l[a] / 4.0),
            q,
            translate(dab),
            q,
            translate(-3.0 * l[b] / 4.0),
        ]);
        g[a][c] = chain(&[
            translate(3.0 * l[a] / 4.0),
            q,
            translate(dca),
            q,
            translate(-l[c] / 4.0),
        ]);
    }
    g
}

fn dual_graph_center(num_pants: usize, sides: &[[(usize, usize); 2]]) -> usize {
    let eccentricity = |root: usize| {
        let mut depth = vec![usize::MAX; num_pants];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for &[(a, _), (b, _)] in sides {
                for (u, v) in [(a, b), (b, a)] {
                    if u == p && depth[v] == usize::MAX {
                        depth[v] = depth[p] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    };
    (0..num_pants).min_by_key(|&p| eccentricity(p)).unwrap_or(0)
}

/// Builds the holonomy representation for the metric.
pub fn build_rep(s: &Surface, fnc: &FenchelNielsen) -> Result<SurfaceGroupRep> {
    if fnc.dim() != s.num_cuffs {
        return Err(Error::DimensionMismatch {
            expected: s.num_cuffs,
            got: fnc.dim(),
        });
    }
    let fnc = FenchelNielsen::new(fnc.lengths.clone(), fnc.twists.clone())?;
    let pants = &s.decomposition.pants;
    let mut seam = Vec::with_capacity(s.num_pants);
    let mut frame = Vec::with_capacity(s.num_pants);
    for p in pants {
        let l = [fnc.lengths[p[0]], fnc.lengths[p[1]], fnc.lengths[p[2]]];
        let g = pants_seams(l);
        frame.push([IDENTITY, g[0][1], g[0][2]]);
        seam.push(g);
    }
    let sides: Vec<[(usize, usize); 2]> = (0..s.num_cuffs)
        .map(|i| {
            let c = s.cuff(i);
            [(c.a.pants, c.a.slot), (c.b.pants, c.b.slot)]
        })
        .collect();
    // cross[c]: pants frame of side A -> pants frame of side B
    let cross: Vec<Mat> = (0..s.num_cuffs)
        .map(|i| {
            let [(pa, sa), (pb, sb)] = sides[i];
            chain(&[
                frame[pa][sa],
                translate(fnc.twists[i]),
                rotate(std::f64::consts::PI),
                inv(&frame[pb][sb]),
            ])
        })
        .collect();

    // develop along a breadth-first spanning tree of the dual graph, rooted
    // at a center to keep matrix entries small
    let root = dual_graph_center(s.num_pants, &sides);
    let mut dev: Vec<Option<Mat>> = vec![None; s.num_pants];
    let mut tree = vec![false; s.num_cuffs];
    dev[root] = Some(IDENTITY);
    let mut queue = VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        let fp = dev[p].unwrap();
        for (i, &[(pa, _), (pb, _)]) in sides.iter().enumerate() {
            if pa == p && dev[pb].is_none() {
                dev[pb] = Some(mul(&fp, &cross[i]));
                tree[i] = true;
                queue.push_back(pb);
            } else if pb == p && dev[pa].is_none() {
                dev[pa] = Some(mul(&fp, &inv(&cross[i])));
                tree[i] = true;
                queue.push_back(pa);
            }
        }
    }
    let dev: Vec<Mat> = dev.into_iter().map(|d| d.expect("connected surface")).collect();

    let mut generators = Vec::new();
    let mut matrices = Vec::new();
    let mut loop_gen = Vec::with_capacity(s.num_pants);
    for (p, p_frames) in frame.iter().enumerate() {
        let mut ids = [0; 3];
        for (slot, h) in p_frames.iter().enumerate() {
            let x = chain(&[*h, translate(fnc.lengths[pants[p][slot]]), inv(h)]);
            ids[slot] = generators.len();
            generators.push(Generator::Loop { pants: p, slot });
            matrices.push(chain(&[dev[p], x, inv(&dev[p])]));
        }
        loop_gen.push(ids);
    }
    let mut edge_gen = vec![None; s.num_cuffs];
    for i in (0..s.num_cuffs).filter(|&i| !tree[i]) {
        let [(pa, _), (pb, _)] = sides[i];
        edge_gen[i] = Some(generators.len());
        generators.push(Generator::Edge { cuff: i });
        matrices.push(chain(&[dev[pa], cross[i], inv(&dev[pb])]));
    }
    Ok(SurfaceGroupRep {
        generators,
        matrices,
        lengths: fnc.lengths,
        twists: fnc.twists,
        seam,
        loop_gen,
        edge_gen,
        sides,
        pants_cuffs: pants.clone(),
    })
}

impl SurfaceGroupRep {
    /// Word of the pants curve `i`, seen from side A.
    pub fn cuff_word(&self, i: usize) -> Word {
        let (p, slot) = self.sides[i][0];
        Word(vec![Letter {
            generator: self.loop_gen[p][slot],
            inverse: false,
        }])
    }

    pub fn word_matrix(&self, w: &Word) -> Mat {
        w.0.iter().fold(IDENTITY, |acc, l| {
            let m = &self.matrices[l.generator];
            mul(&acc, &if l.inverse { inv(m) } else { *m })
        })
    }

    /// Word of a traced component, cyclically reduced.
    pub fn component_word(&self, c: &Component) -> Word {
        let mut w = Word::default();
        match &c.kind {
            ComponentKind::Cuff(i) => return self.cuff_word(*i),
            ComponentKind::Traced(steps) => {
                for step in steps {
                    match *step {
                        Step::Arc {
                            pants,
                            from,
                            to,
                            forward,
                        } => {
                            if from == to {
                                let g = self.loop_gen[pants][(from + 1) % 3];
                                w.push_power(g, if forward { 1 } else { -1 });
                            }
                        }
                        Step::Cross { cuff, from, turns } => {
                            let (pa, sa) = self.sides[cuff][0];
                            let x = self.loop_gen[pa][sa];
                            let e = self.edge_gen[cuff];
                            match from {
                                Side::A => {
                                    w.push_power(x, turns);
                                    if let Some(e) = e {
                                        w.push_power(e, 1);
                                    }
                                }
                                Side::B => {
                                    if let Some(e) = e {
                                        w.push_power(e, -1);
                                    }
                                    w.push_power(x, -turns);
                                }
                            }
                        }
                    }
                }
            }
        }
        w.reduced()
    }

    /// Holonomy of a traced component as a product of frame transports,
    /// without passing through the generators.
    pub fn component_holonomy(&self, c: &Component) -> Mat {
        match &c.kind {
            ComponentKind::Cuff(i) => translate(self.lengths[*i]),
            ComponentKind::Traced(steps) => self.steps_holonomy(steps),
        }
    }

    pub fn steps_holonomy(&self, steps: &[Step]) -> Mat {
        let mut acc = IDENTITY;
        for step in steps {
            let m = match *step {
                Step::Arc {
                    pants,
                    from,
                    to,
                    forward,
                } => {
                    let g = &self.seam[pants];
                    if from != to {
                        g[from][to]
                    } else {
                        let b = (from + 1) % 3;
                        let around = translate(if forward { 1.0 } else { -1.0 } * self.slot_length(pants, b));
                        chain(&[g[from][b], around, inv(&g[from][b])])
                    }
                }
                Step::Cross { cuff, from, turns } => {
                    let l = self.lengths[cuff];
                    let m = mul(
                        &translate(self.twists[cuff] + turns as f64 * l),
                        &rotate(std::f64::consts::PI),
                    );
                    match from {
                        Side::A => m,
                        Side::B => inv(&m),
                    }
                }
            };
            acc = mul(&acc, &m);
        }
        acc
    }

    fn slot_length(&self, pants: usize, slot: usize) -> f64 {
        self.lengths[self.pants_cuffs[pants][slot]]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }
}

/// Length of one copy of a component.
pub fn component_length(rep: &SurfaceGroupRep, c: &Component) -> Result<f64> {
    translation_length(&rep.component_holonomy(c))
}

/// `sum weight * 2 arccosh(|tr| / 2)` over components.
pub fn length(rep: &SurfaceGroupRep, mc: &MultiCurve) -> Result<f64> {
    if mc.is_empty() {
        return Err(Error::EmptyMultiCurve);
    }
    let mut total = 0.0;
    for c in &mc.components {
        total += c.weight as f64 * component_length(rep, c)?;
    }
    Ok(total)
}

/// Decoder and representation bundled for repeated length evaluation.
pub struct LengthFunction<'s> {
    decoder: Decoder<'s>,
    rep: SurfaceGroupRep,
}

impl<'s> LengthFunction<'s> {
    pub fn new(s: &'s Surface, fnc: &FenchelNielsen) -> Result<Self> {
        Ok(LengthFunction {
            decoder: Decoder::new(s),
            rep: build_rep(s, fnc)?,
        })
    }

    pub fn rep(&self) -> &SurfaceGroupRep {
        &self.rep
    }

    /// Sum of the lengths of all traced strands plus `|t_i| l_i` for each
    /// uncrossed cuff.
    pub fn length(&mut self, c: &DtCoords) -> Result<f64> {
        if c.is_empty_lamination() {
            return Err(Error::EmptyMultiCurve);
        }
        let mut total = 0.0;
        let mut err = None;
        let rep = &self.rep;
        self.decoder.for_each_traced(c, |steps| {
            match translation_length(&rep.steps_holonomy(steps)) {
                Ok(l) => total += l,
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        for (i, (&m, &t)) in c.m.iter().zip(&c.t).enumerate() {
            if m == 0 {
                total += t.unsigned_abs() as f64 * self.rep.lengths[i];
            }
        }
        Ok(total)
    }
}

/// Full widths `2 arcsinh(1 / sinh(l_i / 2))` of the standard collars.
pub fn collar_widths(fnc: &FenchelNielsen) -> Vec<f64> {
    fnc.lengths
        .iter()
        .map(|l| 2.0 * (1.0 / (l / 2.0).sinh()).asinh())
        .collect()
}

/// Norm bound of the exhaustive ratio scan behind [`pruning_constant`].
pub const PRUNING_SCAN_NORM: u64 = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruningConstant {
    /// Half the smallest ratio `length / norm` seen in the scan.
    pub c_hat: f64,
    pub min_ratio: f64,
    pub min_witness: String,
    /// Largest ratio seen; an empirical Lipschitz constant of the length.
    pub max_ratio: f64,
    pub max_witness: String,
    pub scan_norm: u64,
}

/// Scans every multicurve with norm at most [`PRUNING_SCAN_NORM`].
pub fn pruning_constant(s: &Surface, fnc: &FenchelNielsen) -> Result<PruningConstant> {
    use crate::enumeration::{for_each_point, SurfaceModel};
    let model = SurfaceModel::new(s);
    let mut lf = LengthFunction::new(s, fnc)?;
    let n = s.num_cuffs;
    let mut c = DtCoords::zero(n);
    let mut best = (f64::INFINITY, String::new(), 0.0f64, String::new());
    let mut err = None;
    for_each_point(&model, PRUNING_SCAN_NORM, None, |x, norm| {
        if err.is_some() {
            return;
        }
        for i in 0..n {
            c.m[i] = x[i] as u32;
            c.t[i] = x[n + i];
        }
        match lf.length(&c) {
            Ok(l) => {
                let r = l / norm as f64;
                if r < best.0 {
                    best.0 = r;
                    best.1 = c.to_string();
                }
                if r > best.2 {
                    best.2 = r;
                    best.3 = c.to_string();
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(PruningConstant {
        c_hat: best.0 / 2.0,
        min_ratio: best.0,
        min_witness: best.1,
        max_ratio: best.2,
        max_witness: best.3,
        scan_norm: PRUNING_SCAN_NORM,
    })
}

/// Post-hoc check that the norm cutoff did not truncate the count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruningAudit {
    pub c_hat: f64,
    pub norm_cutoff: u64,
    /// Counted points with norm within 5% of their cutoff `L / c_hat` and
    /// length within 5% of `L`.
    pub flagged: u64,
    /// Largest `norm / (L / c_hat)` over counted points.
    pub max_norm_fraction: f64,
    pub incomplete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthCount {
    pub grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub audit: PruningAudit,
}

#[derive(Clone)]
struct LengthTally {
    counts: Vec<u64>,
    flagged: u64,
    max_fraction: f64,
}

impl LengthTally {
    fn merge(mut self, o: LengthTally) -> LengthTally {
        for (a, b) in self.counts.iter_mut().zip(o.counts) {
            *a += b;
        }
        self.flagged += o.flagged;
        self.max_fraction = self.max_fraction.max(o.max_fraction);
        self
    }
}

/// Counts multicurves of type `ty` with length at most each `L` in `grid`,
/// enumerating coordinates of norm at most `max L / c_hat`.
pub fn count_by_length(
    s: &Surface,
    fnc: &FenchelNielsen,
    ty: &crate::topology::TypeInvariant,
    grid: &[f64],
    pruning: &PruningConstant,
) -> Result<LengthCount> {
    use crate::enumeration::{LatticeModel, SurfaceModel};
    use rayon::prelude::*;

    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] <= 0.0 {
        return Err(Error::Config("length grid must be positive and increasing".into()));
    }
    let rep = build_rep(s, fnc)?;
    let c_hat = pruning.c_hat;
    let cutoffs: Vec<f64> = grid.iter().map(|l| l / c_hat).collect();
    let norm_cutoff = cutoffs[cutoffs.len() - 1].floor() as u64;
    let lmax = grid[grid.len() - 1];
    // every crossing of a cuff traverses its whole embedded collar
    let model = SurfaceModel::new(s).with_crossing_bound(collar_widths(fnc), lmax * (1.0 + 1e-9));
    let n = s.num_cuffs;
    let empty = || LengthTally {
        counts: vec![0; grid.len()],
        flagged: 0,
        max_fraction: 0.0,
    };
    let tally = model
        .partitions(norm_cutoff)
        .into_par_iter()
        .map_init(
            || {
                let lf = LengthFunction {
                    decoder: Decoder::new(s),
                    rep: rep.clone(),
                };
                (model.scratch(), lf, Vec::<Option<bool>>::new(), DtCoords::zero(n))
            },
            |(scratch, lf, hit, c), prefix| {
                let mut t = empty();
                let mut failure = None;
                model.visit(&prefix, norm_cutoff, &mut |x, norm| {
                    let id = model.classify_id(scratch, x) as usize;
                    if id >= hit.len() {
                        hit.resize(id + 1, None);
                    }
                    let is_target = *hit[id].get_or_insert_with(|| model.type_of(scratch, id as u32) == ty);
                    if !is_target || failure.is_some() {
                        return;
                    }
                    for i in 0..n {
                        c.m[i] = x[i] as u32;
                        c.t[i] = x[n + i];
                    }
                    let l = match lf.length(c) {
                        Ok(l) => l,
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    };
                    if l > lmax {
                        return;
                    }
                    for (j, &lj) in grid.iter().enumerate() {
                        if l <= lj {
                            t.counts[j] += 1;
                            let frac = norm as f64 / cutoffs[j];
                            t.max_fraction = t.max_fraction.max(frac);
                            if frac >= 0.95 && l >= 0.95 * lj {
                                t.flagged += 1;
                            }
                        }
                    }
                });
                match failure {
                    Some(e) => Err(e),
                    None => Ok(t),
                }
            },
        )
        .try_reduce(empty, |a, b| Ok(a.merge(b)))?;
    Ok(LengthCount {
        grid: grid.to_vec(),
        counts: tally.counts,
        audit: PruningAudit {
            c_hat,
            norm_cutoff,
            flagged: tally.flagged,
            max_norm_fraction: tally.max_fraction,
            incomplete: tally.flagged > 0,
        },
    })
}
