//! Decoding Dehn-Thurston coordinates into multicurves.
//!
//! Each pants carries a standard arc system determined by its three crossing
//! numbers. Along a slot, endpoints are numbered in boundary orientation from
//! a basepoint: first the band to the next slot, then the band to the previous
//! slot. When one crossing number exceeds the sum of the other two, the
//! excess forms arcs returning to the same slot; they wrap around the band to
//! the next slot, half of their endpoints before it and half after.
//!
//! At a cuff with `m` crossings and twist `t`, endpoint `k` on side A is
//! joined to endpoint `m - 1 - ((k + t) mod m)` on side B.
//!
//! The complement of the decoded curve is assembled from pants regions and
//! annulus rectangles; its pieces give the topological type and identify
//! parallel copies (annular pieces between two components).

use crate::coords::DtCoords;
use crate::error::Result;
use crate::surface::{Side, Slot, Surface};
use crate::topology::TypeInvariant;

/// Arc system in one pants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcSystem {
    /// `between[s]`: arcs joining slot `s` and slot `s + 1 (mod 3)`.
    pub between: [u32; 3],
    /// Slot carrying returning arcs, with their number.
    pub returning: Option<(usize, u32)>,
}

impl ArcSystem {
    /// The unique disjoint arc system with crossing numbers `m` (sum even).
    pub fn solve(m: [u32; 3]) -> ArcSystem {
        for a in 0..3 {
            let b = (a + 1) % 3;
            let c = (a + 2) % 3;
            if m[a] > m[b] + m[c] {
                let mut between = [0; 3];
                between[a] = m[b];
                between[c] = m[c];
                return ArcSystem {
                    between,
                    returning: Some((a, (m[a] - m[b] - m[c]) / 2)),
                };
            }
        }
        let mut between = [0; 3];
        for s in 0..3 {
            between[s] = (m[s] + m[(s + 1) % 3] - m[(s + 2) % 3]) / 2;
        }
        ArcSystem {
            between,
            returning: None,
        }
    }

    fn returning_at(&self, s: usize) -> u32 {
        match self.returning {
            Some((a, x)) if a == s => x,
            _ => 0,
        }
    }

    /// Offset of the band towards slot `s + 1` along slot `s`.
    fn plus_offset(&self, s: usize) -> u32 {
        self.returning_at(s)
    }

    /// Offset of the band towards slot `s - 1` along slot `s`.
    fn minus_offset(&self, s: usize) -> u32 {
        2 * self.returning_at(s) + self.between[s]
    }

    /// The other endpoint of the arc at `(slot, pos)`.
    pub fn partner(&self, s: usize, pos: u32) -> (usize, u32) {
        let r = self.returning_at(s);
        let plus = self.plus_offset(s);
        let minus = self.minus_offset(s);
        if r > 0 && (pos < r || (pos >= r + self.between[s] && pos < minus)) {
            return (s, minus - 1 - pos);
        }
        if pos >= plus && pos < plus + self.between[s] {
            let j = pos - plus;
            let n = (s + 1) % 3;
            return (n, self.minus_offset(n) + self.between[s] - 1 - j);
        }
        let p = (s + 2) % 3;
        let x = self.between[p];
        debug_assert!(pos >= minus && pos < minus + x);
        let j = pos - minus;
        (p, self.plus_offset(p) + x - 1 - j)
    }

    /// Whether the returning arc at `pos` is traversed from its first endpoint.
    fn returning_forward(&self, pos: u32) -> bool {
        pos < self.returning.map_or(0, |r| r.1)
    }

    /// Segment (start position) whose region contains the untouched slot `u`.
    fn anchor_for_untouched(&self, u: usize, m: [u32; 3]) -> (usize, u32) {
        if let Some((a, x)) = self.returning {
            if u == (a + 1) % 3 && self.between[a] == 0 {
                return (a, x - 1);
            }
            return (a, m[a] - 1);
        }
        let s = (0..3).find(|&s| m[s] > 0).expect("pants has arcs");
        (s, m[s] - 1)
    }
}

/// One step of a traced component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Arc inside `pants` from slot `from` to slot `to`. For a returning arc
    /// (`from == to`), `forward` tells whether it loops around slot
    /// `from + 1` in its boundary orientation.
    Arc {
        pants: usize,
        from: usize,
        to: usize,
        forward: bool,
    },
    /// Crossing of `cuff`, leaving from side `from`. `turns` counts full
    /// turns around the cuff between the side basepoints, seen from side A.
    Cross { cuff: usize, from: Side, turns: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// A pants curve, not crossed by anything.
    Cuff(usize),
    /// A traced curve, as a cyclic sequence of steps.
    Traced(Vec<Step>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub kind: ComponentKind,
    pub weight: u64,
    /// Crossings of one copy with each cuff.
    pub crossings: Vec<u32>,
}

/// A decoded multicurve: disjoint pairwise non-parallel components with weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiCurve {
    pub coords: DtCoords,
    pub components: Vec<Component>,
    pub type_invariant: TypeInvariant,
}

impl MultiCurve {
    /// Re-measured crossing numbers of the weighted union.
    pub fn crossings(&self) -> Vec<u64> {
        let n = self.coords.dim();
        let mut out = vec![0u64; n];
        for c in &self.components {
            for i in 0..n {
                out[i] += c.weight * c.crossings[i] as u64;
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as u32);
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Reusable decoder bound to one surface. Holds scratch buffers so that
/// classification of many points does not allocate per point.
pub struct Decoder<'s> {
    surface: &'s Surface,
    /// Slot of side `2c` (A) and `2c + 1` (B).
    side_slot: Vec<Slot>,
    /// Side index of each (pants, slot).
    slot_side: Vec<[usize; 3]>,
    arcs: Vec<ArcSystem>,
    node_base: Vec<u32>,
    seg_base: Vec<u32>,
    arc_partner: Vec<u32>,
    strand_partner: Vec<u32>,
    node_side: Vec<u32>,
    visited: Vec<bool>,
    comp_nodes: Vec<u32>,
    comp_start: Vec<u32>,
    uf: UnionFind,
    chi: Vec<i64>,
    seg_visited: Vec<bool>,
}

/// Piece of the complement: Euler characteristic and boundary count.
#[derive(Clone, Copy, Debug, Default)]
struct Piece {
    chi: i64,
    boundary: u32,
}

/// Internal description of a raw component before merging parallel copies.
#[derive(Clone, Copy, Debug)]
struct RawComponent {
    /// `Some(cuff)` for a cuff component; `None` for a traced component.
    cuff: Option<usize>,
    weight: u64,
    sides: [u32; 2],
    index: usize,
}

impl<'s> Decoder<'s> {
    pub fn new(surface: &'s Surface) -> Self {
        let n = surface.num_cuffs;
        let mut side_slot = Vec::with_capacity(2 * n);
        for c in &surface.decomposition.cuffs {
            side_slot.push(c.a);
            side_slot.push(c.b);
        }
        let mut slot_side = vec![[0usize; 3]; surface.num_pants];
        for (i, s) in side_slot.iter().enumerate() {
            slot_side[s.pants][s.slot] = i;
        }
        Decoder {
            surface,
            side_slot,
            slot_side,
            arcs: Vec::new(),
            node_base: Vec::new(),
            seg_base: Vec::new(),
            arc_partner: Vec::new(),
            strand_partner: Vec::new(),
            node_side: Vec::new(),
            visited: Vec::new(),
            comp_nodes: Vec::new(),
            comp_start: Vec::new(),
            uf: UnionFind { parent: Vec::new() },
            chi: Vec::new(),
            seg_visited: Vec::new(),
        }
    }

    pub fn surface(&self) -> &'s Surface {
        self.surface
    }

    fn m_of_side(&self, c: &DtCoords, side: usize) -> u32 {
        c.m[side / 2]
    }

    /// Builds arc systems, gluings and traces the crossing components.
    fn trace(&mut self, c: &DtCoords) {
        let s = self.surface;
        let sides = 2 * s.num_cuffs;
        self.node_base.clear();
        self.seg_base.clear();
        let mut nb = 0u32;
        let mut sb = 0u32;
        for side in 0..sides {
            self.node_base.push(nb);
            self.seg_base.push(sb);
            let m = self.m_of_side(c, side);
            nb += m;
            sb += m.max(1);
        }
        self.node_base.push(nb);
        self.seg_base.push(sb);
        let total = nb as usize;

        self.arcs.clear();
        for p in 0..s.num_pants {
            let cuffs = s.decomposition.pants[p];
            self.arcs
                .push(ArcSystem::solve([c.m[cuffs[0]], c.m[cuffs[1]], c.m[cuffs[2]]]));
        }

        self.arc_partner.clear();
        self.arc_partner.resize(total, 0);
        self.node_side.clear();
        self.node_side.resize(total, 0);
        for side in 0..sides {
            let slot = self.side_slot[side];
            let m = self.m_of_side(c, side);
            let arcs = self.arcs[slot.pants];
            for pos in 0..m {
                let (s2, pos2) = arcs.partner(slot.slot, pos);
                let side2 = self.slot_side[slot.pants][s2];
                let node = self.node_base[side] + pos;
                self.arc_partner[node as usize] = self.node_base[side2] + pos2;
                self.node_side[node as usize] = side as u32;
            }
        }

        self.strand_partner.clear();
        self.strand_partner.resize(total, 0);
        for cuff in 0..s.num_cuffs {
            let m = c.m[cuff] as i64;
            if m == 0 {
                continue;
            }
            let a = self.node_base[2 * cuff];
            let b = self.node_base[2 * cuff + 1];
            for k in 0..m {
                let j = m - 1 - (k + c.t[cuff]).rem_euclid(m);
                self.strand_partner[(a + k as u32) as usize] = b + j as u32;
                self.strand_partner[(b + j as u32) as usize] = a + k as u32;
            }
        }

        self.visited.clear();
        self.visited.resize(total, false);
        self.comp_nodes.clear();
        self.comp_start.clear();
        for start in 0..total {
            if self.visited[start] {
                continue;
            }
            self.comp_start.push(self.comp_nodes.len() as u32);
            let mut u = start;
            loop {
                let v = self.arc_partner[u] as usize;
                self.visited[u] = true;
                self.visited[v] = true;
                self.comp_nodes.push(u as u32);
                u = self.strand_partner[v] as usize;
                if u == start {
                    break;
                }
            }
        }
        self.comp_start.push(self.comp_nodes.len() as u32);
    }

    fn seg(&self, side: usize, pos: u32) -> u32 {
        self.seg_base[side] + pos
    }

    /// Cuts along all components and returns the pieces and raw components.
    fn complement(&mut self, c: &DtCoords) -> (Vec<Piece>, Vec<RawComponent>, Vec<u32>) {
        let s = self.surface;
        let nsegs = *self.seg_base.last().unwrap() as usize;
        self.uf.reset(nsegs);
        self.chi.clear();
        self.chi.resize(nsegs, 0);
        self.seg_visited.clear();
        self.seg_visited.resize(nsegs, false);

        for p in 0..s.num_pants {
            let sides = self.slot_side[p];
            let cuffs = s.decomposition.pants[p];
            let m = [c.m[cuffs[0]], c.m[cuffs[1]], c.m[cuffs[2]]];
            if m == [0, 0, 0] {
                let s0 = self.seg(sides[0], 0);
                for &side in &sides[1..] {
                    let sg = self.seg(side, 0);
                    self.uf.union(s0, sg);
                }
                self.chi[s0 as usize] -= 1;
                continue;
            }
            let arcs = self.arcs[p];
            for sl in 0..3 {
                for pos in 0..m[sl] {
                    let first = self.seg(sides[sl], pos);
                    if self.seg_visited[first as usize] {
                        continue;
                    }
                    self.chi[first as usize] += 1;
                    let (mut cs, mut cp) = (sl, pos);
                    loop {
                        let cur = self.seg(sides[cs], cp);
                        if self.seg_visited[cur as usize] {
                            break;
                        }
                        self.seg_visited[cur as usize] = true;
                        self.uf.union(first, cur);
                        let (ns, np) = arcs.partner(cs, (cp + 1) % m[cs]);
                        cs = ns;
                        cp = np;
                    }
                }
            }
            for u in 0..3 {
                if m[u] == 0 {
                    let (a, pos) = arcs.anchor_for_untouched(u, m);
                    let anchor = self.seg(sides[a], pos);
                    let circle = self.seg(sides[u], 0);
                    self.uf.union(anchor, circle);
                    self.chi[circle as usize] -= 1;
                }
            }
        }

        let mut raw = Vec::new();
        for cuff in 0..s.num_cuffs {
            let m = c.m[cuff] as i64;
            let (a, b) = (2 * cuff, 2 * cuff + 1);
            if m == 0 {
                let sa = self.seg(a, 0);
                let sb = self.seg(b, 0);
                if c.t[cuff] > 0 {
                    raw.push(RawComponent {
                        cuff: Some(cuff),
                        weight: c.t[cuff] as u64,
                        sides: [sa, sb],
                        index: usize::MAX,
                    });
                } else {
                    self.uf.union(sa, sb);
                }
                continue;
            }
            for k in 0..m {
                let j = m - 1 - (k + c.t[cuff]).rem_euclid(m);
                let sa = self.seg(a, k as u32);
                let sb = self.seg(b, ((j + m - 1) % m) as u32);
                self.uf.union(sa, sb);
                self.chi[sa as usize] -= 1;
            }
        }

        for ci in 0..self.comp_start.len() - 1 {
            let u = self.comp_nodes[self.comp_start[ci] as usize] as usize;
            let side = self.node_side[u] as usize;
            let pos = u as u32 - self.node_base[side];
            let m = self.m_of_side(c, side);
            raw.push(RawComponent {
                cuff: None,
                weight: 1,
                sides: [self.seg(side, pos), self.seg(side, (pos + m - 1) % m)],
                index: ci,
            });
        }

        // Collapse union-find roots into piece indices.
        let mut piece_of_root = vec![u32::MAX; nsegs];
        let mut pieces: Vec<Piece> = Vec::new();
        let mut seg_piece = vec![0u32; nsegs];
        for sg in 0..nsegs as u32 {
            let r = self.uf.find(sg) as usize;
            if piece_of_root[r] == u32::MAX {
                piece_of_root[r] = pieces.len() as u32;
                pieces.push(Piece::default());
            }
            let pi = piece_of_root[r];
            seg_piece[sg as usize] = pi;
            pieces[pi as usize].chi += self.chi[sg as usize];
        }
        for rc in raw.iter_mut() {
            for sd in rc.sides.iter_mut() {
                *sd = seg_piece[*sd as usize];
                pieces[*sd as usize].boundary += 1;
            }
        }
        (pieces, raw, seg_piece)
    }

    /// Merges parallel copies and builds the type graph. Returns the type
    /// and, per class, (representative raw component index, total weight).
    fn classify_pieces(
        &self,
        pieces: &[Piece],
        raw: &[RawComponent],
    ) -> (TypeInvariant, Vec<(usize, u64)>) {
        let annulus = |p: u32| {
            let pc = pieces[p as usize];
            pc.chi == 0 && pc.boundary == 2
        };
        // components incident to each annular piece
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pieces.len()];
        for (i, rc) in raw.iter().enumerate() {
            for (k, &p) in rc.sides.iter().enumerate() {
                if annulus(p) {
                    incident[p as usize].push((i, k));
                }
            }
        }
        let mut class_of = vec![usize::MAX; raw.len()];
        let mut classes: Vec<(usize, u64)> = Vec::new();
        let mut edges: Vec<(u32, u32, u64)> = Vec::new();
        for start in 0..raw.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let cls = classes.len();
            let mut weight = 0u64;
            let mut ends = [u32::MAX; 2];
            // walk both directions from `start` through annular pieces
            class_of[start] = cls;
            weight += raw[start].weight;
            for dir in 0..2 {
                let mut cur = start;
                let mut out_side = dir;
                loop {
                    let p = raw[cur].sides[out_side];
                    if !annulus(p) {
                        ends[dir] = p;
                        break;
                    }
                    let next = incident[p as usize]
                        .iter()
                        .copied()
                        .find(|&(i, k)| !(i == cur && k == out_side))
                        .expect("annulus has two boundary sides");
                    if class_of[next.0] == cls {
                        // closed chain of annuli: only possible on a torus
                        ends[dir] = p;
                        break;
                    }
                    class_of[next.0] = cls;
                    weight += raw[next.0].weight;
                    cur = next.0;
                    out_side = 1 - next.1;
                }
            }
            classes.push((start, weight));
            edges.push((ends[0], ends[1], weight));
        }
        let keep: Vec<u32> = (0..pieces.len() as u32).filter(|&p| !annulus(p)).collect();
        let mut relabel = vec![u32::MAX; pieces.len()];
        for (i, &p) in keep.iter().enumerate() {
            relabel[p as usize] = i as u32;
        }
        let vertices: Vec<(u32, u32)> = keep
            .iter()
            .map(|&p| {
                let pc = pieces[p as usize];
                let genus = (2 - pc.chi - pc.boundary as i64) / 2;
                (genus as u32, pc.boundary)
            })
            .collect();
        let edges = edges
            .into_iter()
            .map(|(a, b, w)| (relabel[a as usize], relabel[b as usize], w))
            .collect();
        (TypeInvariant::from_graph(vertices, edges), classes)
    }

    /// Topological type of the multicurve with coordinates `c` (assumed valid).
    pub fn classify(&mut self, c: &DtCoords) -> TypeInvariant {
        self.trace(c);
        let (pieces, raw, _) = self.complement(c);
        self.classify_pieces(&pieces, &raw).0
    }

    /// Full decode: components with weights, steps and crossing counts.
    pub fn decode(&mut self, c: &DtCoords) -> Result<MultiCurve> {
        c.ensure_valid(self.surface)?;
        self.trace(c);
        let (pieces, raw, _) = self.complement(c);
        let (type_invariant, classes) = self.classify_pieces(&pieces, &raw);
        let n = self.surface.num_cuffs;
        let mut components = Vec::with_capacity(classes.len());
        for (rep, weight) in classes {
            let rc = raw[rep];
            let mut crossings = vec![0u32; n];
            let kind = match rc.cuff {
                Some(cuff) => ComponentKind::Cuff(cuff),
                None => {
                    let steps = self.steps(c, rc.index);
                    for st in &steps {
                        if let Step::Cross { cuff, .. } = st {
                            crossings[*cuff] += 1;
                        }
                    }
                    ComponentKind::Traced(steps)
                }
            };
            components.push(Component {
                kind,
                weight,
                crossings,
            });
        }
        Ok(MultiCurve {
            coords: c.clone(),
            components,
            type_invariant,
        })
    }

    /// Calls `f` with the steps of every traced curve, parallel copies
    /// included, skipping the complement analysis. Uncrossed cuffs are not
    /// reported.
    pub fn for_each_traced(&mut self, c: &DtCoords, mut f: impl FnMut(&[Step])) -> Result<()> {
        c.ensure_valid(self.surface)?;
        self.trace(c);
        let mut buf = Vec::new();
        for comp in 0..self.comp_start.len() - 1 {
            buf.clear();
            self.steps_into(c, comp, &mut buf);
            f(&buf);
        }
        Ok(())
    }

    fn steps(&self, c: &DtCoords, comp: usize) -> Vec<Step> {
        let mut out = Vec::new();
        self.steps_into(c, comp, &mut out);
        out
    }

    fn steps_into(&self, c: &DtCoords, comp: usize, out: &mut Vec<Step>) {
        let lo = self.comp_start[comp] as usize;
        let hi = self.comp_start[comp + 1] as usize;
        out.reserve(2 * (hi - lo));
        for &u in &self.comp_nodes[lo..hi] {
            let u = u as usize;
            let v = self.arc_partner[u] as usize;
            let su = self.node_side[u] as usize;
            let sv = self.node_side[v] as usize;
            let slot_u = self.side_slot[su];
            let slot_v = self.side_slot[sv];
            let pos_u = u as u32 - self.node_base[su];
            let forward = slot_u.slot != slot_v.slot
                || self.arcs[slot_u.pants].returning_forward(pos_u);
            out.push(Step::Arc {
                pants: slot_u.pants,
                from: slot_u.slot,
                to: slot_v.slot,
                forward,
            });
            let cuff = sv / 2;
            let m = c.m[cuff] as i64;
            let w = self.strand_partner[v] as usize;
            let (from, k) = if sv % 2 == 0 {
                (Side::A, (v as u32 - self.node_base[sv]) as i64)
            } else {
                (Side::B, (w as u32 - self.node_base[sv - 1]) as i64)
            };
            let turns = (k + c.t[cuff]).div_euclid(m) + 1;
            out.push(Step::Cross { cuff, from, turns });
        }
    }
}

/// Convenience wrapper around [`Decoder::decode`].
pub fn decode(s: &Surface, c: &DtCoords) -> Result<MultiCurve> {
    Decoder::new(s).decode(c)
}
