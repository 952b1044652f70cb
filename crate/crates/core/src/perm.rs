//! Exchange permutations and the Rauzy moves.
//!
//! A permutation is stored in one-line image notation: `images[k - 1]` is
//! π(k), the place the k-th interval is sent to. Under this convention the
//! other reading ("the intervals appear in the image in the order π(1), …,
//! π(m)") corresponds to the inverse permutation, i.e. transposed data.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("empty permutation")]
    Empty,
    #[error("not a bijection of 1..{0}")]
    NotABijection(usize),
    #[error("invalid token {0:?}")]
    BadToken(String),
    #[error("permutation is reducible")]
    Reducible,
    #[error("permutation is degenerate")]
    Degenerate,
    #[error("index {k} out of range for {m} letters")]
    OutOfRange { k: usize, m: usize },
    #[error("permutation is not standard (needs π(1)=m and π(m)=1)")]
    NotStandard,
    #[error("permutation needs at least {0} letters")]
    TooShort(usize),
    #[error("letter counts differ: {0} vs {1}")]
    LetterCountMismatch(usize, usize),
}

/// A permutation of `{1, …, m}` in one-line image notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation from 1-based images.
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let m = images.len();
        if m == 0 {
            return Err(PermError::Empty);
        }
        if m > u8::MAX as usize {
            return Err(PermError::NotABijection(m));
        }
        let mut seen = vec![false; m + 1];
        for &x in &images {
            if x == 0 || x > m || seen[x] {
                return Err(PermError::NotABijection(m));
            }
            seen[x] = true;
        }
        Ok(Self { images: images.into_iter().map(|x| x as u8).collect() })
    }

    pub(crate) fn from_raw(images: Vec<u8>) -> Self {
        debug_assert!(Self::new(images.iter().map(|&x| x as usize).collect()).is_ok());
        Self { images }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_raw((1..=m as u8).collect())
    }

    /// The order-reversing permutation π₀ = (m, m−1, …, 1).
    pub fn reversal(m: usize) -> Self {
        Self::from_raw((1..=m as u8).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// π(k), 1-based.
    #[inline]
    pub fn at(&self, k: usize) -> usize {
        self.images[k - 1] as usize
    }

    /// π⁻¹(v), 1-based.
    pub fn preimage(&self, v: usize) -> usize {
        self.images.iter().position(|&x| x as usize == v).expect("value in range") + 1
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.len()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v as usize - 1] = (k + 1) as u8;
        }
        Self::from_raw(inv)
    }

    /// Composition as operators, right to left: `(self · other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self::from_raw(other.images.iter().map(|&j| self.images[j as usize - 1]).collect())
    }

    /// True iff no prefix `{1..k}`, `k < m`, is invariant.
    pub fn is_irreducible(&self) -> bool {
        let mut max = 0;
        for (k, &v) in self.images[..self.len() - 1].iter().enumerate() {
            max = max.max(v as usize);
            if max == k + 1 {
                return false;
            }
        }
        true
    }

    fn require_irreducible(&self) -> Result<(), PermError> {
        if self.len() < 2 {
            return Err(PermError::TooShort(2));
        }
        if !self.is_irreducible() {
            return Err(PermError::Reducible);
        }
        Ok(())
    }

    /// Checks the three degeneracy patterns; reducible input is an error.
    pub fn is_degenerate(&self) -> Result<bool, PermError> {
        self.require_irreducible()?;
        Ok(self.degenerate_unchecked())
    }

    fn degenerate_unchecked(&self) -> bool {
        let m = self.len();
        let p = |k: usize| self.at(k);
        (1..m).any(|j| {
            let first = p(j) == m && p(j + 1) == 1 && p(1) == p(m) + 1;
            let second = p(j + 1) == 1 && p(1) == p(j) + 1;
            let third = p(j + 1) == p(m) + 1 && p(j) == m;
            first || second || third
        })
    }

    /// Irreducible and nondegenerate: the permutations that label components.
    pub fn require_admissible(&self) -> Result<(), PermError> {
        self.require_irreducible()?;
        if self.degenerate_unchecked() {
            return Err(PermError::Degenerate);
        }
        Ok(())
    }

    pub fn is_standard(&self) -> bool {
        let m = self.len();
        m >= 2 && self.at(1) == m && self.at(m) == 1
    }

    /// The skew-symmetric intersection matrix Ω(π).
    #[allow(clippy::needless_range_loop)]
    pub fn omega(&self) -> IntersectionMatrix {
        let m = self.len();
        let mut entries = vec![vec![0i8; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                if self.images[i] > self.images[j] {
                    entries[i][j] = 1;
                    entries[j][i] = -1;
                }
            }
        }
        IntersectionMatrix { entries }
    }

    /// Map a: cyclically shifts the domain letters after π⁻¹(m).
    pub fn rauzy_a(&self) -> Result<Self, PermError> {
        self.require_irreducible()?;
        let m = self.len();
        let k = self.preimage(m);
        let mut out = Vec::with_capacity(m);
        for j in 1..=m {
            let v = if j <= k {
                self.at(j)
            } else if j == k + 1 {
                self.at(m)
            } else {
                self.at(j - 1)
            };
            out.push(v as u8);
        }
        Ok(Self::from_raw(out))
    }

    /// Map b: cyclically shifts the image places after π(m).
    pub fn rauzy_b(&self) -> Result<Self, PermError> {
        self.require_irreducible()?;
        let m = self.len();
        let last = self.at(m);
        let out = self
            .images
            .iter()
            .map(|&v| {
                let v = v as usize;
                let w = if v <= last {
                    v
                } else if v < m {
                    v + 1
                } else {
                    last + 1
                };
                w as u8
            })
            .collect();
        Ok(Self::from_raw(out))
    }

    /// Inverse of [`Permutation::rauzy_a`].
    pub fn rauzy_a_inverse(&self) -> Result<Self, PermError> {
        self.require_irreducible()?;
        let m = self.len();
        let k = self.preimage(m);
        let mut out = Vec::with_capacity(m);
        for j in 1..m {
            out.push(if j <= k { self.at(j) } else { self.at(j + 1) } as u8);
        }
        out.push(self.at(k + 1) as u8);
        Ok(Self::from_raw(out))
    }

    /// Inverse of [`Permutation::rauzy_b`], via `(a(π))⁻¹ = b(π⁻¹)`.
    pub fn rauzy_b_inverse(&self) -> Result<Self, PermError> {
        Ok(self.inverse().rauzy_a_inverse()?.inverse())
    }

    /// Conjugation by π₀: `j ↦ m + 1 − π(m + 1 − j)`.
    pub fn ad_pi0(&self) -> Self {
        let m = self.len();
        Self::from_raw((1..=m).map(|j| (m + 1 - self.at(m + 1 - j)) as u8).collect())
    }

    /// Left-side counterpart of a: `Ad ∘ a ∘ Ad`.
    pub fn rauzy_a_left(&self) -> Result<Self, PermError> {
        Ok(self.ad_pi0().rauzy_a()?.ad_pi0())
    }

    /// Left-side counterpart of b: `Ad ∘ b ∘ Ad`.
    pub fn rauzy_b_left(&self) -> Result<Self, PermError> {
        Ok(self.ad_pi0().rauzy_b()?.ad_pi0())
    }

    /// Rank of Ω(π) over ℚ; equals 2g for admissible permutations.
    pub fn omega_rank(&self) -> usize {
        self.omega().rank()
    }

    /// Moves within the Rauzy class (a and b only) to a permutation with
    /// π(1) = m and π(m) = 1.
    ///
    /// Each round compares x = π(m) and y = π⁻¹(m). While min(x, y) > 1 the
    /// larger of the two is cycled (x by a, y by b; ties go to a) until it
    /// drops below the other; if a full cycle never does, the other map is
    /// cycled instead. Once the minimum is 1 the remaining number is cycled
    /// down to 1.
    pub fn standardize(&self) -> Result<Self, PermError> {
        self.require_irreducible()?;
        let m = self.len();
        let mut p = self.clone();
        loop {
            let x = p.at(m);
            let y = p.preimage(m);
            if x == 1 && y == 1 {
                return Ok(p);
            }
            if x.min(y) == 1 {
                p = if y == 1 {
                    cycle_until(&p, Move::A, |q| q.at(m) == 1)
                } else {
                    cycle_until(&p, Move::B, |q| q.preimage(m) == 1)
                }
                .expect("the remaining coordinate reaches 1 within one cycle");
                continue;
            }
            let shrink_x = |q: &Self| q.at(m) < y;
            let shrink_y = |q: &Self| q.preimage(m) < x;
            let next = if x >= y {
                cycle_until(&p, Move::A, shrink_x).or_else(|| cycle_until(&p, Move::B, shrink_y))
            } else {
                cycle_until(&p, Move::B, shrink_y).or_else(|| cycle_until(&p, Move::A, shrink_x))
            };
            p = next.expect("irreducible permutations always admit a decreasing move");
        }
    }

    /// Restriction of a standard permutation to the interior letters `2..m−1`,
    /// relabelled to `1..m−2`.
    pub fn interior_restriction(&self) -> Result<Self, PermError> {
        if self.len() < 4 {
            return Err(PermError::TooShort(4));
        }
        if !self.is_standard() {
            return Err(PermError::NotStandard);
        }
        let m = self.len();
        Ok(Self::from_raw(self.images[1..m - 1].iter().map(|&v| v - 1).collect()))
    }

    /// Finds, inside the extended Rauzy class, a standard permutation whose
    /// interior restriction is irreducible.
    ///
    /// Write π as the word `π(1) … π(m)` over the word `1 … m`. While the
    /// interior splits, let `A = {2..a}` be the rightmost invariant block and
    /// `B₂ = {π(m−1), …, m−1}`. The move `a` cycles the top letters after `m`
    /// one step forward; then the bottom letters before `m` are cycled
    /// `card(B₂)` steps forward, which is `π(m−1) − 1` left moves `b`. The
    /// result is standard again and its interior can only split further right.
    pub fn reduce_interior(&self) -> Result<Self, PermError> {
        self.require_admissible()?;
        if self.len() < 4 {
            return Err(PermError::TooShort(4));
        }
        let mut p = self.standardize()?;
        let mut last_split = 0;
        loop {
            let interior = p.interior_restriction()?;
            let Some(split) = rightmost_split(&interior) else {
                return Ok(p);
            };
            debug_assert!(split > last_split, "split position must advance");
            last_split = split;
            let steps = p.at(p.len() - 1) - 1;
            let mut q = p.rauzy_a()?;
            for _ in 0..steps {
                q = q.rauzy_b_left()?;
            }
            debug_assert!(q.is_standard());
            p = q;
        }
    }

    /// Enumerates all permutations of `m` letters in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = Self> {
        let mut current: Option<Vec<u8>> = Some((1..=m as u8).collect());
        std::iter::from_fn(move || {
            let out = current.clone()?;
            current = next_lex(out.clone());
            Some(Self::from_raw(out))
        })
    }
}

#[derive(Clone, Copy)]
enum Move {
    A,
    B,
}

fn cycle_until(p: &Permutation, mv: Move, done: impl Fn(&Permutation) -> bool) -> Option<Permutation> {
    let mut q = p.clone();
    for _ in 0..p.len() {
        q = match mv {
            Move::A => q.rauzy_a(),
            Move::B => q.rauzy_b(),
        }
        .ok()?;
        if done(&q) {
            return Some(q);
        }
    }
    None
}

/// Largest `k < n` such that `{1..k}` is invariant, if any.
fn rightmost_split(p: &Permutation) -> Option<usize> {
    let mut max = 0;
    let mut found = None;
    for (k, &v) in p.images[..p.len() - 1].iter().enumerate() {
        max = max.max(v as usize);
        if max == k + 1 {
            found = Some(k + 1);
        }
    }
    found
}

fn next_lex(mut v: Vec<u8>) -> Option<Vec<u8>> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    Some(v)
}

/// τ_k on m letters: fixes `1..k`, shifts `k+1..m−1` up by one, sends m to k+1.
pub fn tau(k: usize, m: usize) -> Result<Permutation, PermError> {
    if k == 0 || k >= m {
        return Err(PermError::OutOfRange { k, m });
    }
    let images = (1..=m)
        .map(|j| {
            if j <= k {
                j
            } else if j < m {
                j + 1
            } else {
                k + 1
            }
        })
        .map(|x| x as u8)
        .collect();
    Ok(Permutation::from_raw(images))
}

/// Parses whitespace-separated 1-based images.
pub fn parse_permutation(text: &str) -> Result<Permutation, PermError> {
    let images = text
        .split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|_| PermError::BadToken(tok.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Permutation::new(images)
}

impl FromStr for Permutation {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_permutation(s)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Ω(π): `Ω[i][j] = 1` iff `i < j` and `π(i) > π(j)`, skew-symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionMatrix {
    entries: Vec<Vec<i8>>,
}

impl IntersectionMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == -self.entries[j][i]))
    }

    /// Rank over ℚ by fraction-free elimination on i64.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<i64>> = self.entries.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        integer_rank(&mut a)
    }

    /// Reduction mod 2, one bit-row per line.
    pub fn mod2_rows(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (j, &x)| if x != 0 { acc | (1 << j) } else { acc }))
            .collect()
    }
}

/// Bareiss-style rank; entries stay small for the matrix sizes used here.
#[allow(clippy::needless_range_loop)]
pub(crate) fn integer_rank(a: &mut [Vec<i64>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                let p = a[rank][col];
                let g = gcd(f.abs(), p.abs());
                let (fr, pr) = (f / g, p / g);
                for c in 0..cols {
                    a[r][c] = a[r][c] * pr - a[rank][c] * fr;
                }
                let row_gcd = a[r].iter().fold(0, |acc, &x| gcd(acc, x.abs()));
                if row_gcd > 1 {
                    a[r].iter_mut().for_each(|x| *x /= row_gcd);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
