//! Separatrix diagrams: oriented ribbon graphs whose edge directions
//! alternate around every vertex, together with a pairing of positive and
//! negative boundary components.
//!
//! Edge `e` owns the half-edges `2e` (its start, "out") and `2e + 1` (its
//! end, "in"). Each vertex lists its half-edges counterclockwise; lists
//! are rotated to start at their smallest half-edge and vertices are
//! sorted by that half-edge.
//!
//! Boundary components are traced with the face on the left: the
//! positive component through `e` runs along edge orientations and leaves
//! every vertex by the out-slot clockwise-adjacent to the slot it arrived
//! at; the negative one runs against them. Components are numbered by
//! scanning edges in order, positive before negative. Sector `j` at a
//! vertex is the angle between slots `j` and `j + 1`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{minimize, LpOutcome};
use crate::surface::{SquareTiledSurface, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("half-edge {0} is missing, repeated or unknown")]
    BadHalfEdge(usize),
    #[error("edge {0} must run from an out-slot to an in-slot")]
    EdgeDirection(usize),
    #[error("directions do not alternate at vertex {0}")]
    NotAlternating(usize),
    #[error("pair {0} does not match a positive with a negative boundary component")]
    SignMismatchInPairing(usize),
    #[error("boundary components are not perfectly paired")]
    UnbalancedBoundary,
    #[error("diagram has no edges")]
    Empty,
    #[error("diagram has more than one vertex")]
    MultipleVertices,
    #[error("genus too small: diagram {kind} needs genus at least {min}")]
    GenusTooSmall { kind: DiagramKind, min: u32 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("sector {sector} out of range at vertex {vertex}")]
    SectorOutOfRange { vertex: usize, sector: usize },
    #[error("both loops would sit in the same sector")]
    SameSector,
    #[error("a handle needs one sector of each type")]
    SectorTypeMismatch,
    #[error("pair {0} is not two simple loops at one vertex")]
    NotSimplePair(usize),
    #[error("edge {0} is a loop")]
    LoopEdge(usize),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("pair {0} violates its length equation")]
    PairEquationViolated(usize),
    #[error("{0}")]
    BadData(&'static str),
    #[error("malformed diagram JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// The three one-vertex diagrams of the minimal stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagramKind {
    H,
    O,
    E,
}

impl DiagramKind {
    pub fn min_genus(self) -> u32 {
        match self {
            DiagramKind::H | DiagramKind::O => 2,
            DiagramKind::E => 3,
        }
    }
}

impl fmt::Display for DiagramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagramKind::H => "H",
            DiagramKind::O => "O",
            DiagramKind::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for DiagramKind {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "H" | "h" => Ok(DiagramKind::H),
            "O" | "o" => Ok(DiagramKind::O),
            "E" | "e" => Ok(DiagramKind::E),
            _ => Err(DiagramError::BadData("diagram type must be H, O or E")),
        }
    }
}

/// A boundary component: its edges in tracing order, starting from the
/// smallest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub positive: bool,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatrixDiagram {
    vertices: Vec<Vec<usize>>,
    /// `(positive, negative)` face ids, sorted.
    pairing: Vec<(usize, usize)>,
    slot: Vec<(usize, usize)>,
    faces: Vec<Face>,
    /// Positive and negative face of every edge.
    face_of: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizabilityCertificate {
    /// Positive lengths summing to one.
    Feasible { lengths: Vec<BigRational> },
    /// Weights `y` on the pairs with `Aᵀy ≥ 0`, `Aᵀy ≠ 0`, where row `i` of
    /// `A` is the equation of pair `i`; no positive solution can exist.
    Infeasible { functional: Vec<BigRational> },
}

impl RealizabilityCertificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self, RealizabilityCertificate::Feasible { .. })
    }

    /// The witness scaled to coprime positive integers.
    pub fn integer_lengths(&self) -> Option<Vec<u64>> {
        let RealizabilityCertificate::Feasible { lengths } = self else { return None };
        let denom = lengths.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = lengths.iter().map(|x| (x * &denom).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        ints.iter().map(|x| (x / &g).to_u64()).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Dir {
    In,
    Out,
}

#[derive(Serialize, Deserialize)]
struct SlotJson {
    half: usize,
    dir: Dir,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    vertices: Vec<Vec<SlotJson>>,
    edges: Vec<[usize; 2]>,
    pairing: Vec<[usize; 2]>,
}

impl SeparatrixDiagram {
    /// Validates a diagram given by counterclockwise half-edge lists and a
    /// pairing of face ids.
    pub fn new(vertices: Vec<Vec<usize>>, pairing: Vec<(usize, usize)>) -> Result<Self, DiagramError> {
        Self::ribbon(vertices)?.with_pairing(pairing)
    }

    /// One vertex with `rays` slots; `loops` gives the (out, in) slot of
    /// each edge and `sector_pairs` pairs boundary components through any
    /// sector they pass.
    pub fn one_vertex(
        rays: usize,
        loops: &[(usize, usize)],
        sector_pairs: &[(usize, usize)],
    ) -> Result<Self, DiagramError> {
        let mut list = vec![usize::MAX; rays];
        for (e, &(out, inn)) in loops.iter().enumerate() {
            for (slot, half) in [(out, 2 * e), (inn, 2 * e + 1)] {
                if slot >= rays || list[slot] != usize::MAX {
                    return Err(DiagramError::BadHalfEdge(half));
                }
                list[slot] = half;
            }
        }
        if list.contains(&usize::MAX) {
            return Err(DiagramError::BadData("every ray must carry a loop end"));
        }
        let d = Self::ribbon(vec![list.clone()])?;
        let face_at = |j: usize| -> Result<usize, DiagramError> {
            if j >= rays {
                return Err(DiagramError::SectorOutOfRange { vertex: 0, sector: j });
            }
            Ok(d.half_face(list[(j + 1) % rays]))
        };
        let mut pairs = BTreeSet::new();
        for &(a, b) in sector_pairs {
            let (fa, fb) = (face_at(a)?, face_at(b)?);
            pairs.insert((fa.min(fb), fa.max(fb)));
        }
        d.with_pairing(pairs.into_iter().collect())
    }

    fn ribbon(vertices: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        let total: usize = vertices.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(DiagramError::Empty);
        }
        if total % 2 == 1 {
            return Err(DiagramError::BadHalfEdge(total));
        }
        let mut seen = vec![false; total];
        for (v, list) in vertices.iter().enumerate() {
            for &h in list {
                if h >= total || seen[h] {
                    return Err(DiagramError::BadHalfEdge(h));
                }
                seen[h] = true;
            }
            let n = list.len();
            if n == 0 || (0..n).any(|i| list[i] % 2 == list[(i + 1) % n] % 2) {
                return Err(DiagramError::NotAlternating(v));
            }
        }
        let mut vertices: Vec<Vec<usize>> = vertices
            .into_iter()
            .map(|mut list| {
                let k = (0..list.len()).min_by_key(|&i| list[i]).expect("nonempty");
                list.rotate_left(k);
                list
            })
            .collect();
        vertices.sort_by_key(|list| list[0]);
        let mut slot = vec![(0, 0); total];
        for (v, list) in vertices.iter().enumerate() {
            for (i, &h) in list.iter().enumerate() {
                slot[h] = (v, i);
            }
        }
        let mut d = Self { vertices, pairing: Vec::new(), slot, faces: Vec::new(), face_of: Vec::new() };
        d.trace_faces();
        Ok(d)
    }

    fn trace_faces(&mut self) {
        let edges = self.edge_count();
        self.face_of = vec![[usize::MAX; 2]; edges];
        self.faces.clear();
        for e in 0..edges {
            for side in 0..2 {
                if self.face_of[e][side] != usize::MAX {
                    continue;
                }
                let id = self.faces.len();
                let mut list = Vec::new();
                let mut cur = e;
                loop {
                    self.face_of[cur][side] = id;
                    list.push(cur);
                    let arrive = if side == 0 { 2 * cur + 1 } else { 2 * cur };
                    cur = self.cw_neighbour(arrive) / 2;
                    if cur == e {
                        break;
                    }
                }
                self.faces.push(Face { positive: side == 0, edges: list });
            }
        }
    }

    fn with_pairing(mut self, pairs: Vec<(usize, usize)>) -> Result<Self, DiagramError> {
        let f = self.faces.len();
        let mut used = vec![false; f];
        let mut out = Vec::with_capacity(pairs.len());
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a >= f || b >= f {
                return Err(DiagramError::UnbalancedBoundary);
            }
            let (p, n) = match (self.faces[a].positive, self.faces[b].positive) {
                (true, false) => (a, b),
                (false, true) => (b, a),
                _ => return Err(DiagramError::SignMismatchInPairing(i)),
            };
            if used[p] || used[n] {
                return Err(DiagramError::UnbalancedBoundary);
            }
            used[p] = true;
            used[n] = true;
            out.push((p, n));
        }
        if used.contains(&false) {
            return Err(DiagramError::UnbalancedBoundary);
        }
        out.sort_unstable();
        self.pairing = out;
        Ok(self)
    }

    /// The half-edge clockwise-adjacent to `h` at its vertex.
    fn cw_neighbour(&self, h: usize) -> usize {
        let (v, i) = self.slot[h];
        let list = &self.vertices[v];
        list[(i + list.len() - 1) % list.len()]
    }

    /// Face entered through the sector just clockwise of slot `h`: leaving
    /// a vertex after arriving along `h`.
    fn half_face(&self, h: usize) -> usize {
        self.face_of[h / 2][if h % 2 == 1 { 0 } else { 1 }]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.slot.len() / 2
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn pairing(&self) -> &[(usize, usize)] {
        &self.pairing
    }

    pub fn cylinder_count(&self) -> usize {
        self.pairing.len()
    }

    /// Positive and negative face of an edge.
    pub fn edge_faces(&self, e: usize) -> (usize, usize) {
        (self.face_of[e][0], self.face_of[e][1])
    }

    /// Vertices at the start and end of an edge.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        (self.slot[2 * e].0, self.slot[2 * e + 1].0)
    }

    /// Zero degree `valence / 2 − 1` of every vertex.
    pub fn degrees(&self) -> Vec<u32> {
        self.vertices.iter().map(|l| (l.len() / 2 - 1) as u32).collect()
    }

    pub fn genus(&self) -> u32 {
        self.degrees().iter().sum::<u32>() / 2 + 1
    }

    /// Face through sector `j` (between slots `j` and `j + 1`) of a vertex.
    pub fn sector_face(&self, vertex: usize, sector: usize) -> Result<usize, DiagramError> {
        let list = self.vertices.get(vertex).ok_or(DiagramError::VertexOutOfRange(vertex))?;
        if sector >= list.len() {
            return Err(DiagramError::SectorOutOfRange { vertex, sector });
        }
        Ok(self.half_face(list[(sector + 1) % list.len()]))
    }

    /// Pair index of a face.
    pub fn pair_of_face(&self, f: usize) -> usize {
        self.pairing.iter().position(|&(p, n)| p == f || n == f).expect("every face is paired")
    }

    fn pair_matrix(&self) -> Vec<Vec<BigRational>> {
        let zero = BigRational::zero();
        self.pairing
            .iter()
            .map(|&(p, n)| {
                let mut row = vec![zero.clone(); self.edge_count()];
                for &e in &self.faces[p].edges {
                    row[e] += BigRational::one();
                }
                for &e in &self.faces[n].edges {
                    row[e] -= BigRational::one();
                }
                row
            })
            .collect()
    }

    /// Exact test for strictly positive edge lengths balancing every pair:
    /// maximize `t` over `p = t + s`, `s ≥ 0`, pair equations, `Σ p = 1`.
    pub fn realizability(&self) -> RealizabilityCertificate {
        let a = self.pair_matrix();
        let n = self.edge_count();
        let k = a.len();
        let zero = BigRational::zero();
        if a.iter().all(|row| row.iter().sum::<BigRational>().is_zero()) {
            let share = BigRational::new(BigInt::one(), BigInt::from(n));
            return RealizabilityCertificate::Feasible { lengths: vec![share; n] };
        }
        // columns: t, s_0..s_{n−1}
        let mut rows: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| {
                let mut r = vec![row.iter().sum::<BigRational>()];
                r.extend(row.iter().cloned());
                r
            })
            .collect();
        let mut norm = vec![BigRational::from_integer(BigInt::from(n))];
        norm.extend(std::iter::repeat_n(BigRational::one(), n));
        rows.push(norm);
        let mut b = vec![zero.clone(); k];
        b.push(BigRational::one());
        let mut cost = vec![zero.clone(); n + 1];
        cost[0] = -BigRational::one();
        if let LpOutcome::Optimal { x, .. } = minimize(&rows, &b, &cost) {
            if x[0].is_positive() {
                let lengths = x[1..].iter().map(|s| s + &x[0]).collect();
                return RealizabilityCertificate::Feasible { lengths };
            }
        }
        // y = y⁺ − y⁻ with Aᵀy = w ≥ 0, Σ w = 1
        let mut rows = Vec::with_capacity(n + 1);
        for e in 0..n {
            let mut r = vec![zero.clone(); 2 * k + n];
            for i in 0..k {
                r[i] = a[i][e].clone();
                r[k + i] = -a[i][e].clone();
            }
            r[2 * k + e] = -BigRational::one();
            rows.push(r);
        }
        let mut norm = vec![zero.clone(); 2 * k];
        norm.extend(std::iter::repeat_n(BigRational::one(), n));
        rows.push(norm);
        let mut b = vec![zero.clone(); n];
        b.push(BigRational::one());
        let LpOutcome::Optimal { x, .. } = minimize(&rows, &b, &vec![zero; 2 * k + n]) else {
            unreachable!("a system without positive solutions has a separating functional")
        };
        let functional = (0..k).map(|i| &x[i] - &x[k + i]).collect();
        RealizabilityCertificate::Infeasible { functional }
    }

    /// Checks that a certificate really proves what it claims.
    pub fn verify_certificate(&self, cert: &RealizabilityCertificate) -> bool {
        let a = self.pair_matrix();
        match cert {
            RealizabilityCertificate::Feasible { lengths } => {
                lengths.len() == self.edge_count()
                    && lengths.iter().all(|l| l.is_positive())
                    && a.iter().all(|row| row.iter().zip(lengths).map(|(c, l)| c * l).sum::<BigRational>().is_zero())
            }
            RealizabilityCertificate::Infeasible { functional } => {
                if functional.len() != a.len() {
                    return false;
                }
                let image: Vec<BigRational> = (0..self.edge_count())
                    .map(|e| a.iter().zip(functional).map(|(row, y)| &row[e] * y).sum())
                    .collect();
                image.iter().all(|w| !w.is_negative()) && image.iter().any(|w| w.is_positive())
            }
        }
    }

    /// Rebuilds the pairing on a new ribbon graph, carrying each face over
    /// through the first of its edge sides that `map` keeps.
    fn carry_pairing(
        &self,
        ribbon: &Self,
        skip: Option<usize>,
        map: impl Fn(usize, usize) -> Option<(usize, usize)>,
    ) -> Result<Vec<(usize, usize)>, DiagramError> {
        let carry = |f: usize, side: usize| {
            self.faces[f]
                .edges
                .iter()
                .find_map(|&e| map(e, side))
                .map(|(e, s)| ribbon.face_of[e][s])
                .ok_or(DiagramError::BadData("boundary component vanished"))
        };
        self.pairing
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .map(|(_, &(p, n))| Ok((carry(p, 0)?, carry(n, 1)?)))
            .collect()
    }

    pub fn reverse_arrows(&self) -> Self {
        let vertices = self.vertices.iter().map(|l| l.iter().map(|h| h ^ 1).collect()).collect();
        let ribbon = Self::ribbon(vertices).expect("reversal keeps alternation");
        let pairs = self.carry_pairing(&ribbon, None, |e, s| Some((e, 1 - s))).expect("faces persist");
        ribbon.with_pairing(pairs).expect("reversal swaps signs in every pair")
    }

    /// Single-edge face of a simple loop, if any.
    fn petal_side(&self, e: usize) -> Option<usize> {
        (0..2).find(|&s| self.faces[self.face_of[e][s]].edges == [e])
    }

    /// Edges (positive petal, negative petal) and their vertex.
    fn simple_pair(&self, pair: usize) -> Result<(usize, usize, usize), DiagramError> {
        let &(p, n) = self.pairing.get(pair).ok_or(DiagramError::NotSimplePair(pair))?;
        let (fp, fn_) = (&self.faces[p], &self.faces[n]);
        if fp.edges.len() != 1 || fn_.edges.len() != 1 || fp.edges[0] == fn_.edges[0] {
            return Err(DiagramError::NotSimplePair(pair));
        }
        let (e1, e2) = (fp.edges[0], fn_.edges[0]);
        let v = self.slot[2 * e1].0;
        if self.slot[2 * e2].0 != v {
            return Err(DiagramError::NotSimplePair(pair));
        }
        Ok((e1, e2, v))
    }

    /// Inserts a pair of simple loops into two sectors of one vertex; the
    /// new loops are edges `n` and `n + 1` and form a new pair.
    pub fn bubble_handle(&self, vertex: usize, sector_a: usize, sector_b: usize) -> Result<Self, DiagramError> {
        let list = self.vertices.get(vertex).ok_or(DiagramError::VertexOutOfRange(vertex))?;
        for s in [sector_a, sector_b] {
            if s >= list.len() {
                return Err(DiagramError::SectorOutOfRange { vertex, sector: s });
            }
        }
        if sector_a == sector_b {
            return Err(DiagramError::SameSector);
        }
        // an (in, out) sector holds a positive petal (out, in)
        let positive = |s: usize| list[s] % 2 == 1;
        if positive(sector_a) == positive(sector_b) {
            return Err(DiagramError::SectorTypeMismatch);
        }
        let n = self.edge_count();
        let petal = |e: usize, s: usize| if positive(s) { [2 * e, 2 * e + 1] } else { [2 * e + 1, 2 * e] };
        let mut new_list = Vec::with_capacity(list.len() + 4);
        for (i, &h) in list.iter().enumerate() {
            new_list.push(h);
            if i == sector_a {
                new_list.extend(petal(n, sector_a));
            }
            if i == sector_b {
                new_list.extend(petal(n + 1, sector_b));
            }
        }
        let mut vertices = self.vertices.clone();
        vertices[vertex] = new_list;
        let ribbon = Self::ribbon(vertices)?;
        let mut pairs = self.carry_pairing(&ribbon, None, |e, s| Some((e, s)))?;
        let face = |e: usize| ribbon.face_of[e][ribbon.petal_side(e).expect("fresh petal")];
        pairs.push((face(n), face(n + 1)));
        ribbon.with_pairing(pairs)
    }

    /// Removes a pair of simple loops. Also returns `m`, half the number of
    /// sectors swept counterclockwise from the negative loop to the
    /// positive one; the spin parity changes by `m + 1`.
    pub fn erase_handle(&self, pair: usize) -> Result<(Self, usize), DiagramError> {
        let (e1, e2, v) = self.simple_pair(pair)?;
        let len = self.vertices[v].len();
        // the negative petal starts with its in-slot, the positive with its out-slot
        let a = self.slot[2 * e2 + 1].1;
        let b = self.slot[2 * e1].1;
        let m = ((b + 2 * len - a - 1) % len) / 2;
        let renumber =
            |e: usize| -> Option<usize> { (e != e1 && e != e2).then(|| e - usize::from(e > e1) - usize::from(e > e2)) };
        let vertices = self
            .vertices
            .iter()
            .map(|l| l.iter().filter_map(|&h| renumber(h / 2).map(|e| 2 * e + h % 2)).collect())
            .collect();
        let ribbon = Self::ribbon(vertices)?;
        let pairs = self.carry_pairing(&ribbon, Some(pair), |e, s| renumber(e).map(|e| (e, s)))?;
        Ok((ribbon.with_pairing(pairs)?, m))
    }

    /// Moves a pair of simple loops by `steps` sectors of the rest of the
    /// vertex, keeping the angle between them. An odd shift reverses both
    /// loops, as the sector types alternate.
    pub fn rotate_handle(&self, pair: usize, steps: i64) -> Result<Self, DiagramError> {
        let (e1, e2, v) = self.simple_pair(pair)?;
        let list = &self.vertices[v];
        let len = list.len();
        let is_petal = |h: usize| h / 2 == e1 || h / 2 == e2;
        let base: Vec<usize> = list.iter().copied().filter(|&h| !is_petal(h)).collect();
        let nb = base.len();
        let flip = steps.rem_euclid(2) == 1;
        // gap of each petal (after base[g]) and its distance from base[g]
        // first slot of each petal in counterclockwise order
        let first = |e: usize| {
            let (o, i) = (self.slot[2 * e].1, self.slot[2 * e + 1].1);
            if (o + 1) % len == i {
                o
            } else {
                i
            }
        };
        // (new gap, offset from the base slot opening the gap, edge)
        let placed: Vec<(usize, usize, usize)> = [e1, e2]
            .iter()
            .map(|&e| {
                let start = first(e);
                let before = list[..start].iter().filter(|&&h| !is_petal(h)).count();
                let g = (before + nb - 1) % nb;
                let anchor = self.slot[base[g]].1;
                let shifted = (g as i64 + steps).rem_euclid(nb as i64) as usize;
                (shifted, (start + len - anchor) % len, e)
            })
            .collect();
        let mut new_list = Vec::with_capacity(len);
        for (g, &h) in base.iter().enumerate() {
            new_list.push(h);
            let mut here: Vec<&(usize, usize, usize)> = placed.iter().filter(|p| p.0 == g).collect();
            here.sort_by_key(|p| p.1);
            for &&(_, _, e) in &here {
                let out_first = first(e) == self.slot[2 * e].1;
                new_list.extend(if out_first != flip { [2 * e, 2 * e + 1] } else { [2 * e + 1, 2 * e] });
            }
        }
        let mut vertices = self.vertices.clone();
        vertices[v] = new_list;
        let ribbon = Self::ribbon(vertices)?;
        let mut pairs = self.carry_pairing(&ribbon, Some(pair), |e, s| (e != e1 && e != e2).then_some((e, s)))?;
        let face = |e: usize| ribbon.face_of[e][ribbon.petal_side(e).expect("rotated petal")];
        pairs.push((face(e1), face(e2)));
        ribbon.with_pairing(pairs)
    }

    /// Shrinks an edge between two distinct vertices to a point, splicing
    /// their cyclic orders.
    pub fn contract_saddle_connection(&self, edge: usize) -> Result<Self, DiagramError> {
        if edge >= self.edge_count() {
            return Err(DiagramError::EdgeOutOfRange(edge));
        }
        let (u, iu) = self.slot[2 * edge];
        let (w, iw) = self.slot[2 * edge + 1];
        if u == w {
            return Err(DiagramError::LoopEdge(edge));
        }
        let after = |v: usize, i: usize| -> Vec<usize> {
            let l = &self.vertices[v];
            (1..l.len()).map(|k| l[(i + k) % l.len()]).collect()
        };
        let mut merged = after(u, iu);
        merged.extend(after(w, iw));
        let renumber = |e: usize| (e != edge).then(|| e - usize::from(e > edge));
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != w)
            .map(|(v, l)| if v == u { &merged } else { l })
            .map(|l| l.iter().map(|&h| 2 * renumber(h / 2).expect("edge removed") + h % 2).collect())
            .collect();
        let ribbon = Self::ribbon(vertices)?;
        let pairs = self.carry_pairing(&ribbon, None, |e, s| renumber(e).map(|e| (e, s)))?;
        ribbon.with_pairing(pairs)
    }

    /// Rotation by half a turn at the single vertex is an arrow-reversing
    /// automorphism fixing every pair, and `n_c = n₂ + 1` where `n₂`
    /// counts two-element edge orbits.
    pub fn is_hyperelliptic_diagram(&self) -> Result<bool, DiagramError> {
        if self.vertices.len() != 1 {
            return Err(DiagramError::MultipleVertices);
        }
        let list = &self.vertices[0];
        let len = list.len();
        let half = len / 2;
        if half.is_multiple_of(2) {
            return Ok(false);
        }
        let rho = |h: usize| list[(self.slot[h].1 + half) % len];
        let mut two_orbits = 0;
        for e in 0..self.edge_count() {
            let (a, b) = (rho(2 * e), rho(2 * e + 1));
            if a / 2 != b / 2 || b % 2 != 0 {
                return Ok(false);
            }
            if b / 2 != e {
                two_orbits += 1;
            }
        }
        let mut face_image = vec![usize::MAX; self.faces.len()];
        for j in 0..len {
            let f = self.sector_face(0, j)?;
            let g = self.sector_face(0, (j + half) % len)?;
            if face_image[f] != usize::MAX && face_image[f] != g {
                return Ok(false);
            }
            face_image[f] = g;
        }
        if self.pairing.iter().any(|&(p, n)| face_image[p] != n || face_image[n] != p) {
            return Ok(false);
        }
        Ok(self.pairing.len() == two_orbits / 2 + 1)
    }

    /// The one-vertex diagrams `H`, `O`, `E` of genus `g`: rays
    /// `r₁ … r_{4g−2}` counterclockwise, loops `r₁ → r_{2g}`,
    /// `r_{2i+1} → r_{2i}` for `i < g` and `r_{2i−1} → r_{2i}` for `i > g`,
    /// faces paired by central symmetry (`H`), mirror symmetry (`O`), or
    /// mirror symmetry with two petal pairs exchanged (`E`).
    pub fn make_canonical(kind: DiagramKind, g: u32) -> Result<Self, DiagramError> {
        if g < kind.min_genus() {
            return Err(DiagramError::GenusTooSmall { kind, min: kind.min_genus() });
        }
        let g = g as usize;
        let rays = 4 * g - 2;
        let mut loops = vec![(0, 2 * g - 1)];
        loops.extend((1..g).map(|i| (2 * i, 2 * i - 1)));
        loops.extend((g + 1..2 * g).map(|i| (2 * i - 2, 2 * i - 1)));
        // sectors numbered from 1: sector s lies between r_s and r_{s+1}
        let wrap = |s: usize| (s + rays - 1) % rays + 1;
        let partner = |s: usize| -> usize {
            match kind {
                DiagramKind::H => wrap(s + 2 * g - 1),
                DiagramKind::O => wrap(4 * g - 1 - s),
                DiagramKind::E => match s {
                    2 => 4 * g - 5,
                    4 => 4 * g - 3,
                    s if s == 4 * g - 5 => 2,
                    s if s == 4 * g - 3 => 4,
                    s => wrap(4 * g - 1 - s),
                },
            }
        };
        let pairs: Vec<(usize, usize)> = (1..=rays).map(|s| (s - 1, partner(s) - 1)).collect();
        Self::one_vertex(rays, &loops, &pairs)
    }

    /// Glues one cylinder per pair. Squares of pair `c` are numbered row by
    /// row from its bottom; column `x` of the bottom row sits over
    /// position `x + twist` of the positive boundary.
    pub fn diagram_to_surface(
        &self,
        lengths: &[u64],
        heights: &[u64],
        twists: &[i64],
    ) -> Result<SquareTiledSurface, DiagramError> {
        let n = self.edge_count();
        let k = self.pairing.len();
        if lengths.len() != n || lengths.contains(&0) {
            return Err(DiagramError::BadData("one positive length per edge"));
        }
        if heights.len() != k || heights.contains(&0) || twists.len() != k {
            return Err(DiagramError::BadData("one positive height and one twist per pair"));
        }
        let total = |f: usize| self.faces[f].edges.iter().map(|&e| lengths[e]).sum::<u64>();
        let mut circ = Vec::with_capacity(k);
        for (i, &(p, neg)) in self.pairing.iter().enumerate() {
            if total(p) != total(neg) {
                return Err(DiagramError::PairEquationViolated(i));
            }
            circ.push(total(p));
        }
        let mut offset = vec![0u64; k + 1];
        for c in 0..k {
            offset[c + 1] = offset[c] + circ[c] * heights[c];
        }
        if offset[k] > u32::MAX as u64 {
            return Err(DiagramError::BadData("too many squares"));
        }
        let mut bottom = vec![(0usize, 0u64); n];
        let mut top = vec![(0usize, 0u64); n];
        for (c, &(p, neg)) in self.pairing.iter().enumerate() {
            let mut x = 0;
            for &e in &self.faces[p].edges {
                bottom[e] = (c, x);
                x += lengths[e];
            }
            let mut x = 0;
            for &e in self.faces[neg].edges.iter().rev() {
                top[e] = (c, x);
                x += lengths[e];
            }
        }
        let id = |c: usize, row: u64, x: u64| (offset[c] + row * circ[c] + x) as u32;
        let squares = offset[k] as usize;
        let mut h = vec![0u32; squares];
        let mut v = vec![0u32; squares];
        for c in 0..k {
            for row in 0..heights[c] {
                for x in 0..circ[c] {
                    h[id(c, row, x) as usize] = id(c, row, (x + 1) % circ[c]);
                    if row + 1 < heights[c] {
                        v[id(c, row, x) as usize] = id(c, row + 1, x);
                    }
                }
            }
        }
        for e in 0..n {
            let (c, xt) = top[e];
            let (c2, xb) = bottom[e];
            let twist = twists[c2].rem_euclid(circ[c2] as i64) as u64;
            for u in 0..lengths[e] {
                let col = (xb + u + circ[c2] - twist) % circ[c2];
                v[id(c, heights[c] - 1, xt + u) as usize] = id(c2, 0, col);
            }
        }
        Ok(SquareTiledSurface::new(h, v)?)
    }

    /// Horizontal separatrix diagram of a square-tiled surface, with the
    /// length of every saddle connection. Vertices are the zeros; a
    /// surface without zeros uses the corner of square 0 as a marked point.
    pub fn horizontal_diagram(surface: &SquareTiledSurface) -> Result<(Self, Vec<u64>), DiagramError> {
        let n = surface.n_squares();
        let (vertex, sizes) = surface.corner_classes();
        let mut is_zero: Vec<bool> = sizes.iter().map(|&c| c > 1).collect();
        if !is_zero.contains(&true) {
            is_zero[vertex[0]] = true;
        }
        let at_zero = |s: usize| is_zero[vertex[s]];
        let starts: Vec<usize> = (0..n).filter(|&s| at_zero(s)).collect();
        let mut edge_from = vec![usize::MAX; n];
        let mut edge_into = vec![usize::MAX; n];
        let mut edge_of_square = vec![usize::MAX; n];
        let mut lengths = Vec::with_capacity(starts.len());
        for (e, &s) in starts.iter().enumerate() {
            edge_from[s] = e;
            let mut t = s;
            let mut len = 0;
            loop {
                edge_of_square[t] = e;
                len += 1;
                t = surface.h(t);
                if at_zero(t) {
                    break;
                }
            }
            edge_into[t] = e;
            lengths.push(len);
        }
        let mut vertices = Vec::new();
        let mut done = vec![false; sizes.len()];
        for &s0 in &starts {
            if done[vertex[s0]] {
                continue;
            }
            done[vertex[s0]] = true;
            let mut list = Vec::new();
            let mut s = s0;
            loop {
                list.push(2 * edge_from[s]);
                list.push(2 * edge_into[s] + 1);
                s = surface.v(surface.h(surface.v_inv(surface.h_inv(s))));
                if s == s0 {
                    break;
                }
            }
            vertices.push(list);
        }
        let ribbon = Self::ribbon(vertices)?;
        let mut pairs = Vec::new();
        for (e, &s) in starts.iter().enumerate() {
            if ribbon.faces[ribbon.face_of[e][0]].edges[0] != e {
                continue;
            }
            let mut t = surface.v(s);
            while edge_of_square[t] == usize::MAX {
                t = surface.v(t);
            }
            pairs.push((ribbon.face_of[e][0], ribbon.face_of[edge_of_square[t]][1]));
        }
        Ok((ribbon.with_pairing(pairs)?, lengths))
    }

    /// Isomorphism of diagrams preserving arrows, cyclic orders and pairs.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        let mut a = self.degrees();
        let mut b = other.degrees();
        a.sort_unstable();
        b.sort_unstable();
        if a != b || self.edge_count() != other.edge_count() || self.pairing.len() != other.pairing.len() {
            return false;
        }
        let halves = self.slot.len();
        let mut starts = Vec::new();
        let mut reached = vec![false; halves];
        for h in 0..halves {
            if !reached[h] {
                starts.push(h);
                self.component_of(h, &mut reached);
            }
        }
        let mut map = vec![usize::MAX; halves];
        let mut inv = vec![usize::MAX; halves];
        self.extend_iso(other, &starts, &mut map, &mut inv)
    }

    /// Isomorphism after possibly reversing every arrow of `self`.
    pub fn is_isomorphic_up_to_reversal(&self, other: &Self) -> bool {
        self.is_isomorphic(other) || self.reverse_arrows().is_isomorphic(other)
    }

    fn ccw_neighbour(&self, h: usize) -> usize {
        let (v, i) = self.slot[h];
        let list = &self.vertices[v];
        list[(i + 1) % list.len()]
    }

    fn component_of(&self, h: usize, reached: &mut [bool]) {
        let mut stack = vec![h];
        reached[h] = true;
        while let Some(x) = stack.pop() {
            for y in [x ^ 1, self.ccw_neighbour(x)] {
                if !reached[y] {
                    reached[y] = true;
                    stack.push(y);
                }
            }
        }
    }

    fn extend_iso(&self, other: &Self, starts: &[usize], map: &mut [usize], inv: &mut [usize]) -> bool {
        let Some((&h1, rest)) = starts.split_first() else {
            let pairs: HashSet<(usize, usize)> = other.pairing.iter().copied().collect();
            let image = |f: usize, side: usize| {
                let e = self.faces[f].edges[0];
                other.face_of[map[2 * e] / 2][side]
            };
            return self.pairing.iter().all(|&(p, n)| pairs.contains(&(image(p, 0), image(n, 1))));
        };
        for h2 in (h1 % 2..other.slot.len()).step_by(2) {
            if inv[h2] != usize::MAX {
                continue;
            }
            let mut assigned = Vec::new();
            let ok = self.propagate(other, h1, h2, map, inv, &mut assigned);
            if ok && self.extend_iso(other, rest, map, inv) {
                return true;
            }
            for x in assigned {
                inv[map[x]] = usize::MAX;
                map[x] = usize::MAX;
            }
        }
        false
    }

    fn propagate(
        &self,
        other: &Self,
        h1: usize,
        h2: usize,
        map: &mut [usize],
        inv: &mut [usize],
        assigned: &mut Vec<usize>,
    ) -> bool {
        let mut stack = vec![(h1, h2)];
        while let Some((x, y)) = stack.pop() {
            if map[x] == y {
                continue;
            }
            if map[x] != usize::MAX || inv[y] != usize::MAX || x % 2 != y % 2 {
                return false;
            }
            map[x] = y;
            inv[y] = x;
            assigned.push(x);
            stack.push((x ^ 1, y ^ 1));
            stack.push((self.ccw_neighbour(x), other.ccw_neighbour(y)));
        }
        true
    }

    pub fn to_json(&self) -> String {
        let vertices = self
            .vertices
            .iter()
            .map(|l| {
                l.iter().map(|&h| SlotJson { half: h, dir: if h % 2 == 0 { Dir::Out } else { Dir::In } }).collect()
            })
            .collect();
        let j = DiagramJson {
            vertices,
            edges: (0..self.edge_count()).map(|e| [2 * e, 2 * e + 1]).collect(),
            pairing: self.pairing.iter().map(|&(p, n)| [p, n]).collect(),
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    /// Reads the JSON form. Edge `i` of the `edges` list becomes edge `i`,
    /// so face ids in `pairing` follow the numbering described above.
    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let j: DiagramJson = serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
        let mut index = std::collections::HashMap::new();
        for (i, &[out, inn]) in j.edges.iter().enumerate() {
            for (h, internal) in [(out, 2 * i), (inn, 2 * i + 1)] {
                if index.insert(h, internal).is_some() {
                    return Err(DiagramError::BadHalfEdge(h));
                }
            }
        }
        let mut vertices = Vec::with_capacity(j.vertices.len());
        for list in &j.vertices {
            let mut out = Vec::with_capacity(list.len());
            for s in list {
                let &internal = index.get(&s.half).ok_or(DiagramError::BadHalfEdge(s.half))?;
                let is_out = matches!(s.dir, Dir::Out);
                if is_out != (internal % 2 == 0) {
                    return Err(DiagramError::EdgeDirection(internal / 2));
                }
                out.push(internal);
            }
            vertices.push(out);
        }
        Self::new(vertices, j.pairing.iter().map(|&[p, n]| (p, n)).collect())
    }

    /// Graphviz rendering; edges are labelled `e: +c/−c'` with the pairs of
    /// their positive and negative faces.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph separatrix_diagram {\n");
        for v in 0..self.vertices.len() {
            let _ = writeln!(out, "  v{v} [label=\"{v} (deg {})\"];", self.vertices[v].len() / 2 - 1);
        }
        for e in 0..self.edge_count() {
            let (u, w) = self.edge_ends(e);
            let (p, n) = self.edge_faces(e);
            let _ =
                writeln!(out, "  v{u} -> v{w} [label=\"e{e}: +{}/-{}\"];", self.pair_of_face(p), self.pair_of_face(n));
        }
        out.push_str("}\n");
        out
    }
}
