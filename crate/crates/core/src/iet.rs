//! Exact interval exchange transformations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{PermError, Permutation};
use crate::surface::breakpoint_degrees;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IetError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("expected {expected} lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("length {0} is not positive")]
    NonPositiveLength(usize),
    #[error("image intervals do not partition the domain")]
    PartitionAuditFailed,
    #[error("{0} lies outside the domain")]
    OutOfDomain(BigRational),
    #[error("orbit hits a discontinuity at step {0}")]
    HitSingularOrbit(usize),
    #[error("λ_m equals λ at π⁻¹(m); the Rauzy step is undefined")]
    TieAtStep,
    #[error("malformed exchange JSON: {0}")]
    Json(String),
}

/// An exchange of `m` half-open intervals `[β_{i−1}, β_i)` translated by
/// `δ = Ω(π)·λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalExchange {
    pi: Permutation,
    lengths: Vec<BigRational>,
    breaks: Vec<BigRational>,
    shifts: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct IetJson {
    pi: Vec<usize>,
    lambda: Vec<String>,
}

impl IntervalExchange {
    pub fn new(pi: Permutation, lengths: Vec<BigRational>) -> Result<Self, IetError> {
        if !pi.is_irreducible() {
            return Err(PermError::Reducible.into());
        }
        let m = pi.len();
        if lengths.len() != m {
            return Err(IetError::LengthCount { expected: m, got: lengths.len() });
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(IetError::NonPositiveLength(i + 1));
        }
        let mut breaks = vec![BigRational::zero()];
        for l in &lengths {
            let next = breaks.last().unwrap() + l;
            breaks.push(next);
        }
        let omega = pi.omega();
        let shifts = (0..m)
            .map(|i| {
                (0..m).fold(BigRational::zero(), |acc, j| match omega.get(i, j) {
                    1 => acc + &lengths[j],
                    -1 => acc - &lengths[j],
                    _ => acc,
                })
            })
            .collect();
        let t = Self { pi, lengths, breaks, shifts };
        t.audit()?;
        Ok(t)
    }

    /// Image intervals, sorted by start, must tile `[0, |I|)`.
    fn audit(&self) -> Result<(), IetError> {
        let m = self.pi.len();
        let mut images: Vec<(BigRational, BigRational, usize)> =
            (0..m).map(|i| (&self.breaks[i] + &self.shifts[i], &self.breaks[i + 1] + &self.shifts[i], i)).collect();
        images.sort();
        let mut cursor = BigRational::zero();
        for (rank, (start, end, i)) in images.iter().enumerate() {
            if *start != cursor || self.pi.at(i + 1) != rank + 1 {
                return Err(IetError::PartitionAuditFailed);
            }
            cursor = end.clone();
        }
        if cursor != self.total_length() {
            return Err(IetError::PartitionAuditFailed);
        }
        Ok(())
    }

    pub fn permutation(&self) -> &Permutation {
        &self.pi
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breaks
    }

    pub fn translations(&self) -> &[BigRational] {
        &self.shifts
    }

    pub fn total_length(&self) -> BigRational {
        self.breaks.last().cloned().unwrap_or_else(BigRational::zero)
    }

    fn interval_of(&self, x: &BigRational) -> Result<usize, IetError> {
        if x.is_negative() || *x >= self.total_length() {
            return Err(IetError::OutOfDomain(x.clone()));
        }
        // last breakpoint β_i with β_i <= x
        Ok(self.breaks.partition_point(|b| b <= x) - 1)
    }

    pub fn apply(&self, x: &BigRational) -> Result<BigRational, IetError> {
        let i = self.interval_of(x)?;
        Ok(x + &self.shifts[i])
    }

    /// `[x, T(x), …, Tⁿ(x)]`; fails when an iterate before the last lands
    /// on a breakpoint that is a zero of the suspension. Breakpoints at
    /// regular marked points are removable and are stepped over.
    pub fn orbit(&self, x: &BigRational, n: usize) -> Result<Vec<BigRational>, IetError> {
        self.interval_of(x)?;
        let singular: Vec<&BigRational> = breakpoint_degrees(&self.pi)?
            .iter()
            .enumerate()
            .filter(|(_, &(_, d))| d > 0)
            .map(|(i, _)| &self.breaks[i + 1])
            .collect();
        let mut out = vec![x.clone()];
        for step in 0..n {
            let cur = out.last().unwrap();
            if singular.contains(&cur) {
                return Err(IetError::HitSingularOrbit(step));
            }
            out.push(self.apply(cur)?);
        }
        Ok(out)
    }

    /// One step of Rauzy–Veech induction: the first-return map to
    /// `[0, |I| − min(λ_m, λ_k))` with `k = π⁻¹(m)`.
    ///
    /// If the last domain interval is longer it is shortened and the image
    /// order changes (`b`); otherwise the interval `k` is cut and its right
    /// piece becomes the new domain position `k + 1` (`a`).
    pub fn rauzy_step(&self) -> Result<Self, IetError> {
        let m = self.pi.len();
        let last = m - 1;
        let k = self.pi.preimage(m) - 1;
        let mut lengths = self.lengths.clone();
        match self.lengths[last].cmp(&self.lengths[k]) {
            std::cmp::Ordering::Equal => Err(IetError::TieAtStep),
            std::cmp::Ordering::Greater => {
                lengths[last] -= &self.lengths[k];
                Self::new(self.pi.rauzy_b()?, lengths)
            }
            std::cmp::Ordering::Less => {
                lengths[k] -= &self.lengths[last];
                Self::new(self.pi.rauzy_a()?, reorder_a(&lengths, k))
            }
        }
    }

    pub fn to_json(&self) -> String {
        let j = IetJson { pi: self.pi.images(), lambda: self.lengths.iter().map(format_rational).collect() };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IetError> {
        let j: IetJson = serde_json::from_str(text).map_err(|e| IetError::Json(e.to_string()))?;
        let pi = Permutation::new(j.pi)?;
        let lengths = j
            .lambda
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| IetError::Json(format!("bad rational {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pi, lengths)
    }
}

/// Under `a`, the interval in domain position `m` moves to position
/// `k + 1` where `k = π⁻¹(m)`.
fn reorder_a(lengths: &[BigRational], k: usize) -> Vec<BigRational> {
    let m = lengths.len();
    let mut out = lengths[..=k].to_vec();
    out.push(lengths[m - 1].clone());
    out.extend_from_slice(&lengths[k + 1..m - 1]);
    out
}

/// `p/q` with `q > 0`, or a plain integer.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
