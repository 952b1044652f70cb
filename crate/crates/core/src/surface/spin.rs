//! Parity of the spin structure.
//!
//! Both routes end in the same computation: a quadratic form `q` over
//! GF(2) refining an alternating form, reduced to its Arf invariant.

use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use super::{SquareTiledSurface, Step, SurfaceError};
use crate::perm::{PermError, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArfError {
    #[error("quadratic form does not vanish on the radical")]
    RadicalObstruction,
    #[error("dimension {0} exceeds 64")]
    TooLarge(usize),
    #[error("bilinear form is not alternating")]
    NotAlternating,
}

/// Arf invariant of `q` with polar form given by `rows` (row `i` has bit
/// `j` set when `e_i · e_j = 1`); bit `i` of `q` is `q(e_i)`.
///
/// Repeatedly split off a hyperbolic pair `a, b` with `a · b = 1`,
/// accumulating `q(a) q(b)`, and project the remaining vectors onto the
/// orthogonal complement. What is left spans the radical, where `q` must
/// vanish.
pub fn arf(rows: &[u64], q: u64) -> Result<u8, ArfError> {
    let n = rows.len();
    if n > 64 {
        return Err(ArfError::TooLarge(n));
    }
    for (i, &r) in rows.iter().enumerate() {
        if r >> i & 1 == 1 || (0..n).any(|j| (rows[j] >> i & 1) != (r >> j & 1)) {
            return Err(ArfError::NotAlternating);
        }
    }
    let dot = |x: u64, y: u64| -> u8 {
        let mut image = 0u64;
        for (j, &r) in rows.iter().enumerate() {
            if y >> j & 1 == 1 {
                image ^= r;
            }
        }
        ((x & image).count_ones() & 1) as u8
    };
    let mut vectors: Vec<(u64, u8)> = (0..n).map(|i| (1u64 << i, (q >> i & 1) as u8)).collect();
    let mut total = 0u8;
    loop {
        let pair = (0..vectors.len())
            .flat_map(|i| (i + 1..vectors.len()).map(move |j| (i, j)))
            .find(|&(i, j)| dot(vectors[i].0, vectors[j].0) == 1);
        let Some((i, j)) = pair else { break };
        let (b, qb) = vectors.remove(j);
        let (a, qa) = vectors.remove(i);
        total ^= qa & qb;
        for (w, qw) in vectors.iter_mut() {
            let (wa, wb) = (dot(*w, a), dot(*w, b));
            if wb == 1 {
                *qw ^= qa ^ dot(*w, a);
                *w ^= a;
            }
            if wa == 1 {
                *qw ^= qb ^ dot(*w, b);
                *w ^= b;
            }
        }
    }
    if vectors.iter().any(|&(_, qw)| qw == 1) {
        return Err(ArfError::RadicalObstruction);
    }
    Ok(total)
}

/// Spin parity from the permutation: the form `Ω(π)` mod 2 with `q = 1`
/// on every basis vector.
pub fn spin_parity_perm(pi: &Permutation) -> Result<u8, SurfaceError> {
    pi.require_admissible()?;
    if !super::perm_profile(pi)?.all_even() {
        return Err(SurfaceError::OddDegreePresent);
    }
    let m = pi.len();
    if m > 64 {
        return Err(PermError::OutOfRange { k: m, m: 64 }.into());
    }
    let q = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    Ok(arf(&pi.omega().mod2_rows(), q)?)
}

/// A closed path through square centres.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualLoop {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl SquareTiledSurface {
    /// `2g` simple closed curves through square centres forming a basis of
    /// first homology, from a tree–cotree decomposition.
    ///
    /// Dual edges: `2s` runs east from `s`, `2s + 1` north. Primal edges:
    /// `2t` is the bottom side of `t`, `2t + 1` its left side.
    pub fn homology_basis(&self) -> Vec<DualLoop> {
        let n = self.n_squares();
        let (vertex, sizes) = self.corner_classes();
        let mut parent: Vec<Option<(usize, Step)>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut in_tree = vec![false; 2 * n];
        depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            for dir in [Step::East, Step::North, Step::West, Step::South] {
                let t = self.step(s, dir);
                if depth[t] == usize::MAX {
                    depth[t] = depth[s] + 1;
                    parent[t] = Some((s, dir));
                    in_tree[self.dual_edge(s, dir)] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut primal = UnionFind::<usize>::new(sizes.len());
        let mut in_cotree = vec![false; 2 * n];
        for e in 0..2 * n {
            let (dual_from, dual_dir) = (e / 2, if e % 2 == 0 { Step::East } else { Step::North });
            if in_tree[e] {
                continue;
            }
            let (a, b) = self.primal_ends(self.crossed_edge(dual_from, dual_dir), &vertex);
            if primal.union(a, b) {
                in_cotree[e] = true;
            }
        }
        let mut loops = Vec::new();
        for e in 0..2 * n {
            if in_tree[e] || in_cotree[e] {
                continue;
            }
            let s = e / 2;
            let dir = if e % 2 == 0 { Step::East } else { Step::North };
            let t = self.step(s, dir);
            // climb from t to the common ancestor, then descend to s
            let (mut x, mut y) = (t, s);
            let mut up = Vec::new();
            let mut down = Vec::new();
            while x != y {
                if depth[x] >= depth[y] {
                    let (px, d) = parent[x].expect("non-root has a parent");
                    up.push(d.reverse());
                    x = px;
                } else {
                    let (py, d) = parent[y].expect("non-root has a parent");
                    down.push(d);
                    y = py;
                }
            }
            let mut steps = vec![dir];
            steps.extend(up);
            steps.extend(down.into_iter().rev());
            loops.push(DualLoop { start: s, steps });
        }
        loops
    }

    fn dual_edge(&self, s: usize, dir: Step) -> usize {
        match dir {
            Step::East => 2 * s,
            Step::North => 2 * s + 1,
            Step::West => 2 * self.h_inv(s),
            Step::South => 2 * self.v_inv(s) + 1,
        }
    }

    /// Primal edge crossed by a dual step.
    fn crossed_edge(&self, s: usize, dir: Step) -> usize {
        match dir {
            Step::East => 2 * self.h(s) + 1,
            Step::North => 2 * self.v(s),
            Step::West => 2 * s + 1,
            Step::South => 2 * s,
        }
    }

    /// Primal edge traversed by a dual step pushed by `(1/2, 1/2)`.
    fn pushed_edge(&self, s: usize, dir: Step) -> usize {
        match dir {
            Step::East => 2 * self.v(self.h(s)),
            Step::North => 2 * self.h(self.v(s)) + 1,
            Step::West => 2 * self.v(s),
            Step::South => 2 * self.h(s) + 1,
        }
    }

    fn primal_ends(&self, edge: usize, vertex: &[usize]) -> (usize, usize) {
        let t = edge / 2;
        let other = if edge.is_multiple_of(2) { self.h(t) } else { self.v(t) };
        (vertex[t], vertex[other])
    }

    fn edge_indicator(&self, l: &DualLoop, f: impl Fn(usize, Step) -> usize) -> Vec<bool> {
        let mut out = vec![false; 2 * self.n_squares()];
        let mut s = l.start;
        for &d in &l.steps {
            out[f(s, d)] ^= true;
            s = self.step(s, d);
        }
        out
    }

    /// Mod 2 intersection numbers of dual loops: `a` crosses the primal
    /// edges that the pushed copy of `b` runs along.
    pub fn intersection_mod2(&self, a: &DualLoop, b: &DualLoop) -> u8 {
        let cross = self.edge_indicator(a, |s, d| self.crossed_edge(s, d));
        let used = self.edge_indicator(b, |s, d| self.pushed_edge(s, d));
        (cross.iter().zip(&used).filter(|(x, y)| **x && **y).count() % 2) as u8
    }
}

/// Spin parity of a surface with even zero degrees: `q(γ) = ind(γ) + 1`
/// on a homology basis of dual loops, then the Arf invariant.
pub fn spin_parity_surface(surface: &SquareTiledSurface) -> Result<u8, SurfaceError> {
    let profile = surface.singularity_profile();
    if !profile.all_even() {
        return Err(SurfaceError::OddDegreePresent);
    }
    let basis = surface.homology_basis();
    debug_assert_eq!(basis.len(), 2 * profile.genus() as usize);
    if basis.len() > 64 {
        return Err(ArfError::TooLarge(basis.len()).into());
    }
    let mut rows = vec![0u64; basis.len()];
    let mut q = 0u64;
    for (i, a) in basis.iter().enumerate() {
        let index = surface.winding_number(a.start, &a.steps)?;
        if (index + 1).rem_euclid(2) == 1 {
            q |= 1 << i;
        }
        for (j, b) in basis.iter().enumerate() {
            if i != j && surface.intersection_mod2(a, b) == 1 {
                rows[i] |= 1 << j;
            }
        }
    }
    let parity = arf(&rows, q)?;
    Ok(parity)
}
