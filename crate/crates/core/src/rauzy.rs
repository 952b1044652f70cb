//! Rauzy classes, extended Rauzy classes and the per-letter-count census.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::perm::{PermError, Permutation};
use crate::surface::{perm_profile, StratumProfile};

pub const DEFAULT_MEMBER_CAP: usize = 5_000_000;
pub const DEFAULT_CENSUS_LETTERS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RauzyError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("class exceeds the member cap of {0}")]
    MemoryCapExceeded(usize),
    #[error("census over {m} letters exceeds the letter cap of {cap}")]
    LetterCapExceeded { m: usize, cap: usize },
    #[error("profile varies inside a class: {0} vs {1}")]
    ProfileNotConstant(StratumProfile, StratumProfile),
    #[error("malformed class file: {0}")]
    Format(String),
    #[error("class file is not closed under its generators at {0}")]
    NotClosed(Permutation),
}

/// Which maps a class is closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generators {
    pub a: bool,
    pub b: bool,
    pub ad: bool,
}

impl Generators {
    pub const RAUZY: Self = Self { a: true, b: true, ad: false };
    pub const EXTENDED: Self = Self { a: true, b: true, ad: true };

    fn apply(&self, p: &Permutation, out: &mut Vec<Permutation>) -> Result<(), PermError> {
        out.clear();
        if self.a {
            out.push(p.rauzy_a()?);
        }
        if self.b {
            out.push(p.rauzy_b()?);
        }
        if self.ad {
            out.push(p.ad_pi0());
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut g = Self { a: false, b: false, ad: false };
        for c in text.chars() {
            let slot = match c {
                'a' => &mut g.a,
                'b' => &mut g.b,
                'd' => &mut g.ad,
                _ => return None,
            };
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(g)
    }
}

impl fmt::Display for Generators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (on, c) in [(self.a, 'a'), (self.b, 'b'), (self.ad, 'd')] {
            if on {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// A finite set of permutations closed under some of a, b, Ad_{π₀}.
///
/// Members are kept in lexicographic order of their image sequences, so two
/// classes are equal exactly when their member lists are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedRauzyClass {
    m: usize,
    members: Vec<Permutation>,
    generators: Generators,
}

impl ExtendedRauzyClass {
    pub fn letters(&self) -> usize {
        self.m
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn generators(&self) -> Generators {
        self.generators
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.members.binary_search(p).is_ok()
    }

    /// Lexicographically smallest member.
    pub fn representative(&self) -> &Permutation {
        &self.members[0]
    }

    /// Singularity profile of the class, checked on every member.
    pub fn profile(&self) -> Result<StratumProfile, RauzyError> {
        let first = perm_profile(self.representative())?;
        for p in &self.members[1..] {
            let other = perm_profile(p)?;
            if other != first {
                return Err(RauzyError::ProfileNotConstant(first, other));
            }
        }
        Ok(first)
    }

    /// Checks closure under the recorded generators.
    pub fn verify_closed(&self) -> Result<(), RauzyError> {
        let mut buf = Vec::new();
        for p in &self.members {
            self.generators.apply(p, &mut buf)?;
            if let Some(q) = buf.iter().find(|q| !self.contains(q)) {
                return Err(RauzyError::NotClosed(q.clone()));
            }
        }
        Ok(())
    }

    /// Class file: a header line followed by one member per line.
    pub fn to_class_file(&self) -> Result<String, RauzyError> {
        let profile = self.profile()?;
        let mut out = format!(
            "m={} generators={} count={} profile={}\n",
            self.m,
            self.generators,
            self.members.len(),
            profile.stratum().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        );
        for p in &self.members {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_class_file(text: &str) -> Result<Self, RauzyError> {
        let bad = |msg: &str| RauzyError::Format(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut m = None;
        let mut generators = None;
        let mut count = None;
        let mut profile = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| bad("header field without '='"))?;
            match key {
                "m" => m = value.parse::<usize>().ok(),
                "generators" => generators = Generators::parse(value),
                "count" => count = value.parse::<usize>().ok(),
                "profile" => profile = Some(value.to_string()),
                _ => return Err(bad("unknown header field")),
            }
        }
        let m = m.ok_or_else(|| bad("bad m"))?;
        let generators = generators.ok_or_else(|| bad("bad generators"))?;
        let count = count.ok_or_else(|| bad("bad count"))?;
        let profile = profile.ok_or_else(|| bad("missing profile"))?;
        let members =
            lines.filter(|l| !l.trim().is_empty()).map(|l| l.parse::<Permutation>()).collect::<Result<Vec<_>, _>>()?;
        if members.len() != count {
            return Err(bad("member count does not match header"));
        }
        if members.iter().any(|p| p.len() != m) {
            return Err(bad("member letter count does not match header"));
        }
        if members.is_empty() || members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("members must be non-empty and strictly sorted"));
        }
        let class = Self { m, members, generators };
        class.verify_closed()?;
        let stated = class.profile()?.stratum().iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        if stated != profile {
            return Err(bad("profile does not match members"));
        }
        Ok(class)
    }
}

/// Breadth-first closure of an admissible seed under the chosen maps.
pub fn closure(seed: &Permutation, generators: Generators, cap: usize) -> Result<ExtendedRauzyClass, RauzyError> {
    seed.require_admissible()?;
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    queue.push_back(seed.clone());
    let mut buf = Vec::with_capacity(3);
    while let Some(p) = queue.pop_front() {
        generators.apply(&p, &mut buf)?;
        for q in buf.drain(..) {
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return Err(RauzyError::MemoryCapExceeded(cap));
                }
                queue.push_back(q);
            }
        }
    }
    let mut members: Vec<_> = seen.into_iter().collect();
    members.sort_unstable();
    Ok(ExtendedRauzyClass { m: seed.len(), members, generators })
}

/// Closure of `seed` under a and b.
pub fn rauzy_class(seed: &Permutation) -> Result<ExtendedRauzyClass, RauzyError> {
    rauzy_class_capped(seed, DEFAULT_MEMBER_CAP)
}

pub fn rauzy_class_capped(seed: &Permutation, cap: usize) -> Result<ExtendedRauzyClass, RauzyError> {
    closure(seed, Generators::RAUZY, cap)
}

/// Closure of `seed` under a, b and Ad_{π₀}.
pub fn extended_rauzy_class(seed: &Permutation) -> Result<ExtendedRauzyClass, RauzyError> {
    extended_rauzy_class_capped(seed, DEFAULT_MEMBER_CAP)
}

pub fn extended_rauzy_class_capped(seed: &Permutation, cap: usize) -> Result<ExtendedRauzyClass, RauzyError> {
    let class = closure(seed, Generators::EXTENDED, cap)?;
    debug_assert!(class.members.iter().all(|p| class.contains(&p.ad_pi0())));
    Ok(class)
}

/// Whether two permutations lie in the same extended Rauzy class.
///
/// Both sides grow a breadth-first frontier in turn and stop as soon as
/// the visited sets meet. The maps are bijections on a finite set, so
/// forward closure is the full orbit and the search is symmetric.
pub fn same_component(first: &Permutation, second: &Permutation) -> Result<bool, RauzyError> {
    same_component_capped(first, second, DEFAULT_MEMBER_CAP)
}

pub fn same_component_capped(first: &Permutation, second: &Permutation, cap: usize) -> Result<bool, RauzyError> {
    if first.len() != second.len() {
        return Err(PermError::LetterCountMismatch(first.len(), second.len()).into());
    }
    first.require_admissible()?;
    second.require_admissible()?;
    if first == second {
        return Ok(true);
    }
    let mut seen = [HashSet::new(), HashSet::new()];
    let mut frontier = [vec![first.clone()], vec![second.clone()]];
    seen[0].insert(first.clone());
    seen[1].insert(second.clone());
    let mut buf = Vec::with_capacity(3);
    loop {
        // expand the smaller non-empty frontier
        let side = match (frontier[0].is_empty(), frontier[1].is_empty()) {
            (true, _) | (_, true) => return Ok(false),
            _ if frontier[0].len() <= frontier[1].len() => 0,
            _ => 1,
        };
        let mut next = Vec::new();
        for p in std::mem::take(&mut frontier[side]) {
            Generators::EXTENDED.apply(&p, &mut buf)?;
            for q in buf.drain(..) {
                if seen[1 - side].contains(&q) {
                    return Ok(true);
                }
                if seen[side].insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        if seen[0].len() + seen[1].len() > cap {
            return Err(RauzyError::MemoryCapExceeded(cap));
        }
        frontier[side] = next;
    }
}

/// One line of the census: all extended classes sharing a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub m: usize,
    pub profile: StratumProfile,
    pub class_count: usize,
    pub class_sizes: Vec<usize>,
}

impl CensusRow {
    /// Tab-separated `m profile class_count class_sizes`.
    pub fn to_tsv(&self) -> String {
        let sizes = self.class_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        format!("{}\t{}\t{}\t[{}]", self.m, self.profile.stratum_string(), self.class_count, sizes)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub max_letters: usize,
    pub member_cap: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self { max_letters: DEFAULT_CENSUS_LETTERS, member_cap: DEFAULT_MEMBER_CAP }
    }
}

/// All extended Rauzy classes on `m` letters that label components of
/// strata, ordered by their lexicographically smallest member.
///
/// Classes are formed over every irreducible permutation. A class is kept
/// when none of its members is degenerate and its suspension has no
/// regular marked point; classes of surfaces with marked points mix
/// degenerate and nondegenerate members, so the degeneracy test alone does
/// not remove them.
pub fn census_classes(m: usize, options: CensusOptions) -> Result<Vec<ExtendedRauzyClass>, RauzyError> {
    if m < 2 {
        return Err(PermError::TooShort(2).into());
    }
    if m > options.max_letters {
        return Err(RauzyError::LetterCapExceeded { m, cap: options.max_letters });
    }
    let total: usize = (1..=m).product();
    let mut irreducible = vec![false; total];
    let mut count = 0;
    let mut uf = UnionFind::<u32>::new(total);
    for (idx, p) in Permutation::all(m).enumerate() {
        debug_assert_eq!(lehmer_rank(p.raw()), idx);
        if !p.is_irreducible() {
            continue;
        }
        irreducible[idx] = true;
        count += 1;
        if count > options.member_cap {
            return Err(RauzyError::MemoryCapExceeded(options.member_cap));
        }
        for q in [p.rauzy_a()?, p.rauzy_b()?, p.ad_pi0()] {
            uf.union(idx as u32, lehmer_rank(q.raw()) as u32);
        }
    }
    let mut by_root: std::collections::HashMap<u32, (Vec<Permutation>, bool)> = Default::default();
    let mut order = Vec::new();
    for (idx, p) in Permutation::all(m).enumerate() {
        if !irreducible[idx] {
            continue;
        }
        let root = uf.find(idx as u32);
        let entry = by_root.entry(root).or_insert_with(|| {
            order.push(root);
            (Vec::new(), false)
        });
        entry.1 |= p.is_degenerate()?;
        entry.0.push(p);
    }
    let mut classes = Vec::new();
    // lexicographic enumeration keeps each member list sorted
    for root in order {
        let (members, degenerate) = by_root.remove(&root).unwrap_or_default();
        if degenerate || perm_profile(&members[0])?.has_marked_points() {
            continue;
        }
        classes.push(ExtendedRauzyClass { m, members, generators: Generators::EXTENDED });
    }
    Ok(classes)
}

/// Census rows for `m` letters, grouped by profile, largest degrees first.
pub fn census(m: usize, options: CensusOptions) -> Result<Vec<CensusRow>, RauzyError> {
    let classes = census_classes(m, options)?;
    let mut rows: Vec<CensusRow> = Vec::new();
    for class in &classes {
        let profile = class.profile()?.without_marked_points();
        match rows.iter_mut().find(|r| r.profile == profile) {
            Some(row) => {
                row.class_count += 1;
                row.class_sizes.push(class.len());
            }
            None => rows.push(CensusRow { m, profile, class_count: 1, class_sizes: vec![class.len()] }),
        }
    }
    for row in &mut rows {
        row.class_sizes.sort_unstable();
    }
    rows.sort_by(|x, y| y.profile.degrees().cmp(x.profile.degrees()));
    Ok(rows)
}

/// Position of a permutation in lexicographic order.
fn lehmer_rank(images: &[u8]) -> usize {
    let n = images.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = images[i + 1..].iter().filter(|&&x| x < images[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}
