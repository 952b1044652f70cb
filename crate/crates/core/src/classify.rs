//! Connected components of strata: the classification tables, parity
//! formulas for hyperelliptic components, and the classifier.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::perm::{PermError, Permutation};
use crate::rauzy::{same_component_capped, RauzyError, DEFAULT_MEMBER_CAP};
use crate::surface::{
    perm_profile, spin_parity_perm, spin_parity_surface, SquareTiledSurface, StratumProfile, SurfaceError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Rauzy(#[from] RauzyError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("bad profile: {0}")]
    BadProfile(String),
    #[error("bad orders: {0}")]
    BadOrders(String),
    #[error("spin parity of H(g-1,g-1) is undefined for even g = {0}")]
    PairParityUndefinedForEvenG(u32),
    #[error("divisor does not describe a curve of genus at least 2")]
    DivisorMismatch,
    #[error("suspension has a regular marked point; profile {0}")]
    MarkedPoint(StratumProfile),
    #[error("invariants contradict each other: {0}")]
    InternalContradiction(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentTag {
    Hyperelliptic,
    Even,
    Odd,
    Nonhyperelliptic,
    Connected,
}

impl ComponentTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentTag::Hyperelliptic => "hyperelliptic",
            ComponentTag::Even => "even",
            ComponentTag::Odd => "odd",
            ComponentTag::Nonhyperelliptic => "nonhyperelliptic",
            ComponentTag::Connected => "connected",
        }
    }
}

impl fmt::Display for ComponentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentLabel {
    pub profile: StratumProfile,
    pub tag: ComponentTag,
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{} {}", self.profile.stratum_string(), self.tag)
    }
}

/// A component label together with the spin parity when it is defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub label: ComponentLabel,
    pub spin_parity: Option<u8>,
}

#[derive(Serialize)]
struct ClassificationJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<usize>>,
    profile: &'a [u32],
    genus: u32,
    component: ComponentTag,
    spin_parity: Option<u8>,
}

impl Classification {
    /// `{"pi", "profile", "genus", "component", "spin_parity"}`; `pi` is
    /// omitted for surfaces.
    pub fn to_json(&self, pi: Option<&Permutation>) -> String {
        let j = ClassificationJson {
            pi: pi.map(Permutation::images),
            profile: self.label.profile.degrees(),
            genus: self.label.profile.genus(),
            component: self.label.tag,
            spin_parity: self.spin_parity,
        };
        serde_json::to_string(&j).expect("plain data serializes")
    }
}

/// Degrees `k_i ≥ 1` with even sum, sorted descending.
fn checked_profile(profile: &[u32]) -> Result<StratumProfile, ClassifyError> {
    if profile.is_empty() || profile.contains(&0) {
        return Err(ClassifyError::BadProfile(format!("{profile:?}: degrees must be positive")));
    }
    StratumProfile::new(profile.to_vec())
        .ok_or_else(|| ClassifyError::BadProfile(format!("{profile:?}: degree sum must be even")))
}

/// Complex dimension `2g + n − 1` of `H(k₁, …, k_n)`.
pub fn stratum_dim(profile: &[u32]) -> Result<u32, ClassifyError> {
    let p = checked_profile(profile)?;
    Ok(2 * p.genus() + p.degrees().len() as u32 - 1)
}

/// Dimension `2g + n − 2` of a stratum of quadratic differentials with
/// zero orders `l_j ≥ −1`, `l_j ≠ 0`, summing to `4g − 4`.
pub fn quadratic_stratum_dim(orders: &[i32], g: u32) -> Result<u32, ClassifyError> {
    if let Some(l) = orders.iter().find(|&&l| l == 0 || l < -1) {
        return Err(ClassifyError::BadOrders(format!("order {l} is not allowed")));
    }
    let sum: i64 = orders.iter().map(|&l| l as i64).sum();
    if sum != 4 * g as i64 - 4 {
        return Err(ClassifyError::BadOrders(format!("orders sum to {sum}, expected {}", 4 * g as i64 - 4)));
    }
    Ok(2 * g + orders.len() as u32 - 2)
}

/// The components of `H(profile)`.
pub fn components_of_stratum(profile: &[u32]) -> Result<Vec<ComponentLabel>, ClassifyError> {
    use ComponentTag::*;
    let p = checked_profile(profile)?;
    let g = p.genus();
    let d = p.degrees();
    let tags: Vec<ComponentTag> = match g {
        1 => unreachable!("positive degrees give genus at least 2"),
        2 => vec![Hyperelliptic],
        3 => match d {
            [4] | [2, 2] => vec![Hyperelliptic, Odd],
            _ => vec![Connected],
        },
        _ => {
            let pair = d.len() == 2 && d[0] == d[1];
            if d.len() == 1 || (pair && d[0] % 2 == 0) {
                vec![Hyperelliptic, Even, Odd]
            } else if p.all_even() {
                vec![Even, Odd]
            } else if pair {
                vec![Hyperelliptic, Nonhyperelliptic]
            } else {
                vec![Connected]
            }
        }
    };
    Ok(tags.into_iter().map(|tag| ComponentLabel { profile: p.clone(), tag }).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HyperellipticKind {
    /// `H^hyp(2g − 2)`
    Single,
    /// `H^hyp(g − 1, g − 1)`
    Pair,
}

/// Spin parity of a hyperelliptic component.
pub fn hyperelliptic_parity(g: u32, kind: HyperellipticKind) -> Result<u8, ClassifyError> {
    match kind {
        HyperellipticKind::Single => Ok((g.div_ceil(2) % 2) as u8),
        HyperellipticKind::Pair if g.is_multiple_of(2) => Err(ClassifyError::PairParityUndefinedForEvenG(g)),
        HyperellipticKind::Pair => Ok((g.div_ceil(2) % 2) as u8),
    }
}

/// Parity `Σ ⌊k_i / 2⌋ + Σ l_j + 1` of a hyperelliptic surface, read off
/// the half-canonical divisor: `k_i` are its multiplicities at points fixed
/// by the involution, `l_j` at swapped pairs, and `Σ k_i + 2 Σ l_j = g − 1`.
pub fn hyperelliptic_spin_from_divisor(fixed: &[u32], pairs: &[u32]) -> Result<u8, ClassifyError> {
    let degree: u32 = fixed.iter().sum::<u32>() + 2 * pairs.iter().sum::<u32>();
    if degree == 0 || fixed.iter().chain(pairs).any(|&k| k == 0) {
        return Err(ClassifyError::DivisorMismatch);
    }
    let s: u32 = fixed.iter().map(|k| k / 2).sum::<u32>() + pairs.iter().sum::<u32>() + 1;
    Ok((s % 2) as u8)
}

fn hyperelliptic_kind(p: &StratumProfile) -> Option<HyperellipticKind> {
    match p.degrees() {
        [_] => Some(HyperellipticKind::Single),
        [a, b] if a == b => Some(HyperellipticKind::Pair),
        _ => None,
    }
}

/// Whether `π` lies in the extended Rauzy class of `(m, m − 1, …, 1)`.
pub fn is_hyperelliptic_component(pi: &Permutation) -> Result<bool, ClassifyError> {
    is_hyperelliptic_component_capped(pi, DEFAULT_MEMBER_CAP)
}

pub fn is_hyperelliptic_component_capped(pi: &Permutation, cap: usize) -> Result<bool, ClassifyError> {
    pi.require_admissible()?;
    let profile = perm_profile(pi)?;
    if profile.has_marked_points() || hyperelliptic_kind(&profile).is_none() {
        return Ok(false);
    }
    Ok(same_component_capped(pi, &Permutation::reversal(pi.len()), cap)?)
}

/// Picks the unique table entry consistent with the computed invariants.
fn resolve(
    profile: StratumProfile,
    parity: Option<u8>,
    hyperelliptic: Option<bool>,
) -> Result<Classification, ClassifyError> {
    use ComponentTag::*;
    let candidates = components_of_stratum(profile.degrees())?;
    let fits = |tag: ComponentTag| match tag {
        Hyperelliptic => hyperelliptic == Some(true),
        Even => hyperelliptic != Some(true) && parity == Some(0),
        Odd => hyperelliptic != Some(true) && parity == Some(1),
        Nonhyperelliptic => hyperelliptic == Some(false),
        Connected => true,
    };
    let mut matching = candidates.into_iter().filter(|c| fits(c.tag));
    let (Some(label), None) = (matching.next(), matching.next()) else {
        return Err(ClassifyError::InternalContradiction(format!(
            "profile {profile}, parity {parity:?}, hyperelliptic {hyperelliptic:?}"
        )));
    };
    if label.tag == Hyperelliptic {
        if let (Some(kind), Some(par)) = (hyperelliptic_kind(&profile), parity) {
            if hyperelliptic_parity(profile.genus(), kind).ok() != Some(par) {
                return Err(ClassifyError::InternalContradiction(format!("hyperelliptic {profile} with parity {par}")));
            }
        }
    }
    Ok(Classification { label, spin_parity: parity })
}

/// The component of the stratum containing the suspensions of `π`.
pub fn classify_permutation(pi: &Permutation) -> Result<Classification, ClassifyError> {
    classify_permutation_capped(pi, DEFAULT_MEMBER_CAP)
}

pub fn classify_permutation_capped(pi: &Permutation, cap: usize) -> Result<Classification, ClassifyError> {
    pi.require_admissible()?;
    let profile = perm_profile(pi)?;
    if profile.has_marked_points() {
        return Err(ClassifyError::MarkedPoint(profile));
    }
    let candidates = components_of_stratum(profile.degrees())?;
    let parity = if profile.all_even() { Some(spin_parity_perm(pi)?) } else { None };
    let hyperelliptic = if candidates.iter().any(|c| c.tag == ComponentTag::Hyperelliptic) {
        Some(is_hyperelliptic_component_capped(pi, cap)?)
    } else {
        None
    };
    resolve(profile, parity, hyperelliptic)
}

/// The component of a square-tiled surface. Hyperellipticity is decided
/// by a rotation by π with `2g + 2` fixed points that swaps the zeros of
/// a two-zero profile.
pub fn classify_surface(surface: &SquareTiledSurface) -> Result<Classification, ClassifyError> {
    let full = surface.singularity_profile();
    let profile = StratumProfile::new(full.stratum())
        .filter(|p| !p.degrees().is_empty())
        .ok_or_else(|| ClassifyError::BadProfile("a torus has no zeros".into()))?;
    let candidates = components_of_stratum(profile.degrees())?;
    let parity = if profile.all_even() { Some(spin_parity_surface(surface)?) } else { None };
    let hyperelliptic = if candidates.iter().any(|c| c.tag == ComponentTag::Hyperelliptic) {
        Some(has_hyperelliptic_involution(surface, &full))
    } else {
        None
    };
    resolve(profile, parity, hyperelliptic)
}

fn has_hyperelliptic_involution(surface: &SquareTiledSurface, full: &StratumProfile) -> bool {
    let g = full.genus() as usize;
    let (_, sizes) = surface.corner_classes();
    let zeros: Vec<usize> = (0..sizes.len()).filter(|&p| sizes[p] > 1).collect();
    surface.involutions().into_iter().any(|(phi, fixed)| {
        if fixed != 2 * g + 2 {
            return false;
        }
        match zeros.as_slice() {
            [a, b] => {
                let image = surface.vertex_action(&phi);
                image[*a] == *b
            }
            _ => true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ComponentTag::*;

    fn tags(profile: &[u32]) -> Vec<ComponentTag> {
        components_of_stratum(profile).unwrap().into_iter().map(|c| c.tag).collect()
    }

    #[test]
    fn dimensions() {
        assert_eq!(stratum_dim(&[2]), Ok(4));
        assert_eq!(stratum_dim(&[1, 1]), Ok(5));
        assert_eq!(stratum_dim(&[8]), Ok(10));
        assert!(matches!(stratum_dim(&[1]), Err(ClassifyError::BadProfile(_))));
        assert!(matches!(stratum_dim(&[2, 0]), Err(ClassifyError::BadProfile(_))));
        assert_eq!(quadratic_stratum_dim(&[-1, -1, -1, -1, -1, 1], 0), Ok(4));
        assert_eq!(quadratic_stratum_dim(&[-1, -1, -1, -1, -1, -1, 2], 0), Ok(5));
        assert!(matches!(quadratic_stratum_dim(&[-1, 1], 0), Err(ClassifyError::BadOrders(_))));
        assert!(matches!(quadratic_stratum_dim(&[-2, 2, -4], 0), Err(ClassifyError::BadOrders(_))));
    }

    #[test]
    fn tables() {
        assert_eq!(tags(&[6]), vec![Hyperelliptic, Even, Odd]);
        assert_eq!(tags(&[4, 4]), vec![Hyperelliptic, Even, Odd]);
        assert_eq!(tags(&[4, 2]), vec![Even, Odd]);
        assert_eq!(tags(&[3, 3]), vec![Hyperelliptic, Nonhyperelliptic]);
        assert_eq!(tags(&[5, 1]), vec![Connected]);
        assert_eq!(tags(&[4]), vec![Hyperelliptic, Odd]);
        assert_eq!(tags(&[2, 2]), vec![Hyperelliptic, Odd]);
        assert_eq!(tags(&[2, 1, 1]), vec![Connected]);
        assert_eq!(tags(&[3, 1]), vec![Connected]);
        assert_eq!(tags(&[2]), vec![Hyperelliptic]);
        assert_eq!(tags(&[1, 1]), vec![Hyperelliptic]);
    }

    #[test]
    fn parity_formulas() {
        assert_eq!(hyperelliptic_parity(2, HyperellipticKind::Single), Ok(1));
        assert_eq!(hyperelliptic_parity(4, HyperellipticKind::Single), Ok(0));
        assert_eq!(hyperelliptic_parity(3, HyperellipticKind::Pair), Ok(0));
        assert_eq!(
            hyperelliptic_parity(4, HyperellipticKind::Pair),
            Err(ClassifyError::PairParityUndefinedForEvenG(4))
        );
        assert_eq!(hyperelliptic_spin_from_divisor(&[1], &[]), Ok(1));
        assert_eq!(hyperelliptic_spin_from_divisor(&[], &[]), Err(ClassifyError::DivisorMismatch));
    }

    #[test]
    fn small_permutations() {
        let c = classify_permutation(&"4 3 2 1".parse().unwrap()).unwrap();
        assert_eq!((c.label.tag, c.spin_parity), (Hyperelliptic, Some(1)));
        let c = classify_permutation(&"6 5 4 3 2 1".parse().unwrap()).unwrap();
        assert_eq!((c.label.tag, c.spin_parity), (Hyperelliptic, Some(0)));
        assert_eq!(
            c.to_json(Some(&"6 5 4 3 2 1".parse().unwrap())),
            r#"{"pi":[6,5,4,3,2,1],"profile":[4],"genus":3,"component":"hyperelliptic","spin_parity":0}"#
        );
        assert!(matches!(classify_permutation(&"2 3 5 1 4".parse().unwrap()), Err(ClassifyError::MarkedPoint(_))));
    }
}
