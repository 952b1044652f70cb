//! Square-tiled surfaces and their invariants.
//!
//! A surface on `N` unit squares is a pair of permutations of `0..N`:
//! `h(s)` is the square to the right of `s`, `v(s)` the square above it.
//! Public interfaces (JSON) are 1-based.

mod spin;
mod suspend;

use std::collections::VecDeque;
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{PermError, Permutation};

pub use spin::{arf, spin_parity_perm, spin_parity_surface, ArfError};
pub use suspend::{one_cylinder_suspension, suspend, suspend_with_heights};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("surface has no squares")]
    Empty,
    #[error("{0} is not a permutation of 1..n")]
    NotAPermutation(&'static str),
    #[error("h and v have different lengths")]
    LengthMismatch,
    #[error("surface is disconnected")]
    Disconnected,
    #[error("profile has an odd degree; spin structure undefined")]
    OddDegreePresent,
    #[error(transparent)]
    Arf(#[from] ArfError),
    #[error("path does not close up")]
    NotClosed,
    #[error("path reverses direction at step {0}")]
    Backtrack(usize),
    #[error("empty path")]
    EmptyPath,
    #[error("square {0} out of range")]
    SquareOutOfRange(usize),
    #[error("invalid suspension data: {0}")]
    BadSuspension(&'static str),
    #[error("malformed origami JSON: {0}")]
    Json(String),
}

/// Multiset of zero degrees, sorted in decreasing order.
///
/// Degree-0 entries are regular marked points; they are kept here and
/// dropped by [`StratumProfile::stratum`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumProfile {
    degrees: Vec<u32>,
}

impl StratumProfile {
    /// Fails unless the degree sum is even.
    pub fn new(mut degrees: Vec<u32>) -> Option<Self> {
        if degrees.is_empty() || degrees.iter().sum::<u32>() % 2 == 1 {
            return None;
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Some(Self { degrees })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn genus(&self) -> u32 {
        self.degrees.iter().sum::<u32>() / 2 + 1
    }

    /// Degrees with marked points removed.
    pub fn stratum(&self) -> Vec<u32> {
        self.degrees.iter().copied().filter(|&k| k > 0).collect()
    }

    pub fn has_marked_points(&self) -> bool {
        self.degrees.contains(&0)
    }

    pub fn without_marked_points(&self) -> Self {
        let stratum = self.stratum();
        if stratum.is_empty() {
            // the torus keeps a single marked point
            return Self { degrees: vec![0] };
        }
        Self { degrees: stratum }
    }

    pub fn all_even(&self) -> bool {
        self.degrees.iter().all(|k| k % 2 == 0)
    }

    /// The stratum in bracket notation, e.g. `[2,1,1]`.
    pub fn stratum_string(&self) -> String {
        bracket(&self.without_marked_points().degrees)
    }
}

fn bracket(xs: &[u32]) -> String {
    format!("[{}]", xs.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
}

impl fmt::Display for StratumProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bracket(&self.degrees))
    }
}

#[derive(Serialize, Deserialize)]
struct OrigamiJson {
    n: usize,
    h: Vec<usize>,
    v: Vec<usize>,
}

/// A connected translation surface tiled by unit squares.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SquareTiledSurface {
    h: Vec<u32>,
    v: Vec<u32>,
    h_inv: Vec<u32>,
    v_inv: Vec<u32>,
}

fn invert(p: &[u32], name: &'static str) -> Result<Vec<u32>, SurfaceError> {
    let mut inv = vec![u32::MAX; p.len()];
    for (i, &x) in p.iter().enumerate() {
        let slot = inv.get_mut(x as usize).ok_or(SurfaceError::NotAPermutation(name))?;
        if *slot != u32::MAX {
            return Err(SurfaceError::NotAPermutation(name));
        }
        *slot = i as u32;
    }
    Ok(inv)
}

/// Elementary moves between adjacent squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    East,
    North,
    West,
    South,
}

impl Step {
    fn quarter(self) -> i64 {
        match self {
            Step::East => 0,
            Step::North => 1,
            Step::West => 2,
            Step::South => 3,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Step::East => Step::West,
            Step::North => Step::South,
            Step::West => Step::East,
            Step::South => Step::North,
        }
    }
}

impl SquareTiledSurface {
    /// Builds a surface from 0-based permutations.
    pub fn new(h: Vec<u32>, v: Vec<u32>) -> Result<Self, SurfaceError> {
        if h.is_empty() {
            return Err(SurfaceError::Empty);
        }
        if h.len() != v.len() {
            return Err(SurfaceError::LengthMismatch);
        }
        let h_inv = invert(&h, "h")?;
        let v_inv = invert(&v, "v")?;
        let s = Self { h, v, h_inv, v_inv };
        if !s.is_connected() {
            return Err(SurfaceError::Disconnected);
        }
        Ok(s)
    }

    pub fn torus() -> Self {
        Self::new(vec![0], vec![0]).expect("one square is a surface")
    }

    pub fn n_squares(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self, s: usize) -> usize {
        self.h[s] as usize
    }

    pub fn v(&self, s: usize) -> usize {
        self.v[s] as usize
    }

    pub fn h_inv(&self, s: usize) -> usize {
        self.h_inv[s] as usize
    }

    pub fn v_inv(&self, s: usize) -> usize {
        self.v_inv[s] as usize
    }

    pub fn step(&self, s: usize, dir: Step) -> usize {
        match dir {
            Step::East => self.h(s),
            Step::North => self.v(s),
            Step::West => self.h_inv(s),
            Step::South => self.v_inv(s),
        }
    }

    fn is_connected(&self) -> bool {
        let n = self.n_squares();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(s) = queue.pop_front() {
            for t in [self.h(s), self.v(s), self.h_inv(s), self.v_inv(s)] {
                if !seen[t] {
                    seen[t] = true;
                    count += 1;
                    queue.push_back(t);
                }
            }
        }
        count == n
    }

    /// Vertex id of the bottom-left corner of every square, and the
    /// number of squares whose bottom-left corner is each vertex.
    ///
    /// Turning counterclockwise around the bottom-left corner of `s`
    /// passes through the squares `h⁻¹ s`, `v⁻¹ h⁻¹ s`, `h v⁻¹ h⁻¹ s`
    /// and back to `v h v⁻¹ h⁻¹ s`, so vertices are the cycles of that
    /// commutator.
    pub fn corner_classes(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_squares();
        let mut vertex = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if vertex[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut len = 0;
            let mut s = start;
            while vertex[s] == usize::MAX {
                vertex[s] = id;
                len += 1;
                s = self.v(self.h(self.v_inv(self.h_inv(s))));
            }
            sizes.push(len);
        }
        (vertex, sizes)
    }

    /// Cone angle `2πc` at a vertex meeting `c` bottom-left corners gives a
    /// zero of degree `c − 1`.
    pub fn singularity_profile(&self) -> StratumProfile {
        let (_, sizes) = self.corner_classes();
        let profile = StratumProfile::new(sizes.iter().map(|&c| c as u32 - 1).collect())
            .expect("degree sum of a closed surface is even");
        debug_assert_eq!(
            sizes.len() as i64 - self.n_squares() as i64,
            2 - 2 * profile.genus() as i64,
            "Euler characteristic disagrees with the degree sum"
        );
        profile
    }

    pub fn genus(&self) -> u32 {
        self.singularity_profile().genus()
    }

    /// Euler characteristic `V − E + F` of the square complex.
    pub fn euler_characteristic(&self) -> i64 {
        let (_, sizes) = self.corner_classes();
        sizes.len() as i64 - self.n_squares() as i64
    }

    /// Index of a closed path through square centres: the signed number of
    /// quarter turns divided by four.
    pub fn winding_number(&self, start: usize, steps: &[Step]) -> Result<i64, SurfaceError> {
        if start >= self.n_squares() {
            return Err(SurfaceError::SquareOutOfRange(start));
        }
        if steps.is_empty() {
            return Err(SurfaceError::EmptyPath);
        }
        let end = steps.iter().fold(start, |s, &d| self.step(s, d));
        if end != start {
            return Err(SurfaceError::NotClosed);
        }
        let mut quarters = 0;
        for i in 0..steps.len() {
            let next = steps[(i + 1) % steps.len()];
            match (next.quarter() - steps[i].quarter()).rem_euclid(4) {
                0 => {}
                1 => quarters += 1,
                3 => quarters -= 1,
                _ => return Err(SurfaceError::Backtrack((i + 1) % steps.len())),
            }
        }
        debug_assert_eq!(quarters % 4, 0);
        Ok(quarters / 4)
    }

    /// Looks for the rotation by π: a square map φ with `φh = h⁻¹φ`,
    /// `φv = v⁻¹φ` and `φ² = id`. Returns it with its number of fixed
    /// points on the surface (square centres, edge midpoints, vertices).
    pub fn involutions(&self) -> Vec<(Vec<usize>, usize)> {
        let n = self.n_squares();
        let (vertex, sizes) = self.corner_classes();
        let mut found = Vec::new();
        'candidate: for target in 0..n {
            let mut phi = vec![usize::MAX; n];
            phi[0] = target;
            let mut queue = VecDeque::from([0usize]);
            while let Some(s) = queue.pop_front() {
                let image = phi[s];
                let moves = [
                    (self.h(s), self.h_inv(image)),
                    (self.v(s), self.v_inv(image)),
                    (self.h_inv(s), self.h(image)),
                    (self.v_inv(s), self.v(image)),
                ];
                for (t, ti) in moves {
                    if phi[t] == usize::MAX {
                        phi[t] = ti;
                        queue.push_back(t);
                    } else if phi[t] != ti {
                        continue 'candidate;
                    }
                }
            }
            if (0..n).any(|s| phi[phi[s]] != s) {
                continue;
            }
            let centres = (0..n).filter(|&s| phi[s] == s).count();
            let right_edges = (0..n).filter(|&s| phi[s] == self.h(s)).count();
            let top_edges = (0..n).filter(|&s| phi[s] == self.v(s)).count();
            let mut representative = vec![usize::MAX; sizes.len()];
            for s in 0..n {
                if representative[vertex[s]] == usize::MAX {
                    representative[vertex[s]] = s;
                }
            }
            // bottom-left of s goes to the top-right of φ(s)
            let vertices =
                representative.iter().enumerate().filter(|&(p, &s)| vertex[self.v(self.h(phi[s]))] == p).count();
            found.push((phi, centres + right_edges + top_edges + vertices));
        }
        found
    }

    /// Image of each vertex under a square involution from [`Self::involutions`].
    pub fn vertex_action(&self, phi: &[usize]) -> Vec<usize> {
        let (vertex, sizes) = self.corner_classes();
        let mut image = vec![usize::MAX; sizes.len()];
        for s in 0..self.n_squares() {
            image[vertex[s]] = vertex[self.v(self.h(phi[s]))];
        }
        image
    }

    pub fn to_json(&self) -> String {
        let j = OrigamiJson {
            n: self.n_squares(),
            h: self.h.iter().map(|&x| x as usize + 1).collect(),
            v: self.v.iter().map(|&x| x as usize + 1).collect(),
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        let j: OrigamiJson = serde_json::from_str(text).map_err(|e| SurfaceError::Json(e.to_string()))?;
        if j.h.len() != j.n || j.v.len() != j.n {
            return Err(SurfaceError::LengthMismatch);
        }
        let lower = |xs: Vec<usize>, name| {
            xs.into_iter()
                .map(|x| x.checked_sub(1).map(|y| y as u32).ok_or(SurfaceError::NotAPermutation(name)))
                .collect::<Result<Vec<_>, _>>()
        };
        Self::new(lower(j.h, "h")?, lower(j.v, "v")?)
    }
}

/// Profile of the suspension of `π`, read off the polygon directly.
///
/// Label the top vertices of the suspension polygon `P₀..P_m` and the
/// bottom ones `Q₀..Q_m` (bottom sides in image order). Gluing side `j`
/// identifies `P_{j−1} ~ Q_{π(j)−1}` and `P_j ~ Q_{π(j)}`; the end points
/// are shared. A class containing `c` interior top vertices has cone angle
/// `2πc`.
pub fn perm_profile(pi: &Permutation) -> Result<StratumProfile, PermError> {
    let degrees = breakpoint_degrees(pi)?;
    let mut seen = std::collections::BTreeMap::new();
    for (class, degree) in degrees {
        seen.insert(class, degree);
    }
    Ok(StratumProfile::new(seen.into_values().collect()).expect("suspension profiles have even degree sum"))
}

/// For each interior top vertex `P_1..P_{m−1}`: its vertex class and the
/// degree of the zero there (0 for a regular marked point).
pub fn breakpoint_degrees(pi: &Permutation) -> Result<Vec<(usize, u32)>, PermError> {
    if !pi.is_irreducible() {
        return Err(PermError::Reducible);
    }
    let m = pi.len();
    // P_k is k, Q_k is m + 1 + k
    let q = |k: usize| m + 1 + k;
    let mut uf = UnionFind::<usize>::new(2 * m + 2);
    uf.union(0, q(0));
    uf.union(m, q(m));
    for j in 1..=m {
        uf.union(j - 1, q(pi.at(j) - 1));
        uf.union(j, q(pi.at(j)));
    }
    let mut counts = std::collections::HashMap::new();
    for k in 1..m {
        *counts.entry(uf.find(k)).or_insert(0u32) += 1;
    }
    Ok((1..m).map(|k| (uf.find(k), counts[&uf.find(k)] - 1)).collect())
}
