//! Branched covers of a closed genus-`g` surface.
//!
//! A degree-`d` cover with `r` branch points is encoded by its monodromy: a
//! tuple `(a_1, b_1, .., a_g, b_g, c_1, .., c_r)` of permutations of `d`
//! sheets with `[a_1,b_1]⋯[a_g,b_g]·c_1⋯c_r = 1`, `c_i` of the cycle type
//! recorded in the branching profile, generating a transitive subgroup.
//! Isomorphism classes of covers are orbits of such tuples under simultaneous
//! conjugation by `S_d`. The monodromy image plays the role of the Galois
//! group of the Galois closure, and `N_G(H)/H` (for `H` the stabilizer of a
//! sheet) is the deck group.

mod enumerate;

pub use enumerate::{enumerate_covers, for_each_cover, EnumerationOptions, EnumerationStats};

use serde::{Deserialize, Serialize};

use crate::perm::{Perm, MAX_DEGREE};
use crate::permgroup::{generates_transitive, PermGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("invalid branching profile: {0}")]
    InvalidProfile(String),
    #[error("Riemann-Hurwitz gives 2h - 2 = {0}, which is odd")]
    NonIntegralGenus(i64),
    #[error("Riemann-Hurwitz gives negative domain genus {0}")]
    NegativeGenus(i64),
    #[error("monodromy does not act transitively on the sheets")]
    NotTransitive,
    #[error("invalid monodromy tuple: {0}")]
    InvalidMonodromy(String),
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("search exceeded the node budget of {0}")]
    BudgetExceeded(u64),
}

/// Ordered list of cycle-type partitions, one per branch point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BranchingProfile(Vec<Vec<usize>>);

impl BranchingProfile {
    /// Validates each partition against `degree` and sorts it non-increasingly.
    pub fn new(degree: usize, mut entries: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        for (i, part) in entries.iter_mut().enumerate() {
            if part.iter().any(|&x| x == 0) {
                return Err(CoverError::InvalidProfile(format!(
                    "branch point {} has a zero part",
                    i + 1
                )));
            }
            let sum: usize = part.iter().sum();
            if sum != degree {
                return Err(CoverError::InvalidProfile(format!(
                    "branch point {} partition {:?} sums to {} instead of {}",
                    i + 1,
                    part,
                    sum,
                    degree
                )));
            }
            part.sort_unstable_by(|a, b| b.cmp(a));
            if part[0] < 2 {
                return Err(CoverError::InvalidProfile(format!(
                    "branch point {} is unbranched",
                    i + 1
                )));
            }
        }
        Ok(BranchingProfile(entries))
    }

    pub fn unbranched() -> Self {
        BranchingProfile(Vec::new())
    }

    /// `r` simple branch points for a degree-`d` cover.
    pub fn simple(degree: usize, r: usize) -> Self {
        let mut part = vec![2];
        part.extend(std::iter::repeat(1).take(degree.saturating_sub(2)));
        BranchingProfile(vec![part; r])
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ_i Σ_j (b_i^j − 1)`.
    pub fn total_ramification(&self) -> usize {
        self.0
            .iter()
            .map(|p| p.iter().map(|x| x - 1).sum::<usize>())
            .sum()
    }

    /// Every branch point is a single transposition.
    pub fn is_simple(&self) -> bool {
        self.0
            .iter()
            .all(|p| p[0] == 2 && p[1..].iter().all(|&x| x == 1))
    }

    /// Every part is 1 or 2.
    pub fn parts_at_most_two(&self) -> bool {
        self.0.iter().flatten().all(|&x| x <= 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverTypeRepr {
    g: usize,
    d: usize,
    #[serde(default)]
    profile: Vec<Vec<usize>>,
}

/// Combinatorial type `(g, d, b)` of a branched cover.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CoverTypeRepr", into = "CoverTypeRepr")]
pub struct CoverType {
    pub g: usize,
    pub d: usize,
    pub profile: BranchingProfile,
}

impl TryFrom<CoverTypeRepr> for CoverType {
    type Error = CoverError;
    fn try_from(r: CoverTypeRepr) -> Result<Self, CoverError> {
        CoverType::new(r.g, r.d, r.profile)
    }
}

impl From<CoverType> for CoverTypeRepr {
    fn from(t: CoverType) -> Self {
        CoverTypeRepr {
            g: t.g,
            d: t.d,
            profile: t.profile.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverInvariants {
    pub b_total: usize,
    pub h: usize,
    pub r: usize,
}

impl CoverType {
    pub fn new(g: usize, d: usize, profile: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        if d == 0 {
            return Err(CoverError::InvalidProfile("degree must be at least 1".into()));
        }
        if d > MAX_DEGREE {
            return Err(CoverError::DegreeCapExceeded {
                degree: d,
                cap: MAX_DEGREE,
            });
        }
        let profile = BranchingProfile::new(d, profile)?;
        Ok(CoverType { g, d, profile })
    }

    /// Riemann–Hurwitz: `2h − 2 = b_total + d(2g − 2)`.
    pub fn derive_invariants(&self) -> Result<CoverInvariants, CoverError> {
        let b_total = self.profile.total_ramification();
        let two_h_minus_two = b_total as i64 + self.d as i64 * (2 * self.g as i64 - 2);
        if two_h_minus_two.rem_euclid(2) != 0 {
            return Err(CoverError::NonIntegralGenus(two_h_minus_two));
        }
        let h = two_h_minus_two / 2 + 1;
        if h < 0 {
            return Err(CoverError::NegativeGenus(h));
        }
        Ok(CoverInvariants {
            b_total,
            h: h as usize,
            r: self.profile.len(),
        })
    }

    /// Real index of the pulled-back normal operator for a rank-2 normal
    /// bundle of degree `2g − 2`: `2(d(2g − 2) + 2(1 − h))`.
    pub fn index_pullback(&self) -> Result<i64, CoverError> {
        let inv = self.derive_invariants()?;
        let d = self.d as i64;
        let g = self.g as i64;
        let h = inv.h as i64;
        Ok(2 * (d * (2 * g - 2) + 2 * (1 - h)))
    }
}

/// A monodromy tuple. Points are 0-based internally, 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyCover {
    pub degree: usize,
    /// `(a_i, b_i)` for each handle of the base.
    #[serde(default)]
    pub handles: Vec<(Perm, Perm)>,
    /// Local monodromy `c_i` around each branch point.
    #[serde(default)]
    pub branch: Vec<Perm>,
}

impl MonodromyCover {
    pub fn new(degree: usize, handles: Vec<(Perm, Perm)>, branch: Vec<Perm>) -> Self {
        MonodromyCover {
            degree,
            handles,
            branch,
        }
    }

    /// Rebuilds from the flattened slot order `a_1, b_1, .., a_g, b_g, c_1, ..`.
    pub fn from_slots(degree: usize, genus: usize, slots: &[Perm]) -> Self {
        let handles = (0..genus).map(|i| (slots[2 * i], slots[2 * i + 1])).collect();
        let branch = slots[2 * genus..].to_vec();
        MonodromyCover {
            degree,
            handles,
            branch,
        }
    }

    pub fn genus(&self) -> usize {
        self.handles.len()
    }

    pub fn slots(&self) -> Vec<Perm> {
        let mut out = Vec::with_capacity(2 * self.handles.len() + self.branch.len());
        for (a, b) in &self.handles {
            out.push(*a);
            out.push(*b);
        }
        out.extend(self.branch.iter().copied());
        out
    }

    /// `[a_1,b_1]⋯[a_g,b_g]·c_1⋯c_r`.
    pub fn relation_product(&self) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for (a, b) in &self.handles {
            acc = acc.compose(&Perm::commutator(a, b));
        }
        for c in &self.branch {
            acc = acc.compose(c);
        }
        acc
    }

    pub fn satisfies_relation(&self) -> bool {
        self.relation_product().is_identity()
    }

    pub fn is_transitive(&self) -> bool {
        generates_transitive(self.degree, &self.slots())
    }

    pub fn profile(&self) -> Vec<Vec<usize>> {
        self.branch.iter().map(|c| c.cycle_type()).collect()
    }

    pub fn conjugate_by(&self, sigma: &Perm) -> Self {
        MonodromyCover {
            degree: self.degree,
            handles: self
                .handles
                .iter()
                .map(|(a, b)| (a.conjugate_by(sigma), b.conjugate_by(sigma)))
                .collect(),
            branch: self.branch.iter().map(|c| c.conjugate_by(sigma)).collect(),
        }
    }

    /// Lexicographically least tuple in the simultaneous-conjugation orbit.
    pub fn canonical(&self) -> Self {
        let slots = self.slots();
        let mut best = slots.clone();
        for sigma in Perm::all(self.degree) {
            let conj: Vec<Perm> = slots.iter().map(|p| p.conjugate_by(&sigma)).collect();
            if conj < best {
                best = conj;
            }
        }
        MonodromyCover::from_slots(self.degree, self.genus(), &best)
    }

    pub fn validate(&self) -> Result<(), CoverError> {
        if self
            .slots()
            .iter()
            .any(|p| p.degree() != self.degree)
        {
            return Err(CoverError::InvalidMonodromy(
                "permutation degrees disagree with the cover degree".into(),
            ));
        }
        if !self.satisfies_relation() {
            return Err(CoverError::InvalidMonodromy(
                "product relation does not hold".into(),
            ));
        }
        if !self.is_transitive() {
            return Err(CoverError::NotTransitive);
        }
        Ok(())
    }
}

/// Monodromy group, sheet stabilizer and automorphism count of a cover.
#[derive(Debug, Clone)]
pub struct CoverGroups {
    pub group: PermGroup,
    pub stabilizer: PermGroup,
    pub aut_order: usize,
}

/// `G` = group generated by the tuple, `H` = stabilizer of sheet 1,
/// `|Aut| = |N_G(H)| / |H|`.
pub fn cover_groups(cover: &MonodromyCover) -> Result<CoverGroups, CoverError> {
    cover.validate()?;
    let group = PermGroup::generate(cover.degree, &cover.slots(), usize::MAX)
        .expect("uncapped closure");
    let stabilizer = group.stabilizer(0);
    let normalizer = group.normalizer(&stabilizer);
    let aut_order = normalizer.order() / stabilizer.order();
    Ok(CoverGroups {
        group,
        stabilizer,
        aut_order,
    })
}

/// One simultaneous-conjugation class of covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverClass {
    pub representative: MonodromyCover,
    pub group_order: usize,
    pub stabilizer_order: usize,
    pub aut_order: usize,
}

impl CoverClass {
    pub fn group(&self) -> PermGroup {
        PermGroup::generate(
            self.representative.degree,
            &self.representative.slots(),
            usize::MAX,
        )
        .expect("uncapped closure")
    }

    pub fn stabilizer(&self) -> PermGroup {
        self.group().stabilizer(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(g: usize, d: usize, profile: Vec<Vec<usize>>) -> CoverType {
        CoverType::new(g, d, profile).unwrap()
    }

    #[test]
    fn riemann_hurwitz_examples() {
        let inv = ct(1, 2, vec![]).derive_invariants().unwrap();
        assert_eq!((inv.b_total, inv.h, inv.r), (0, 1, 0));
        let inv = ct(0, 2, vec![vec![2]; 4]).derive_invariants().unwrap();
        assert_eq!((inv.b_total, inv.h, inv.r), (4, 1, 4));
        let inv = ct(2, 3, vec![]).derive_invariants().unwrap();
        assert_eq!((inv.b_total, inv.h, inv.r), (0, 4, 0));
    }

    #[test]
    fn index_examples() {
        assert_eq!(ct(1, 2, vec![]).index_pullback().unwrap(), 0);
        assert_eq!(ct(0, 2, vec![vec![2]; 4]).index_pullback().unwrap(), -8);
        assert_eq!(ct(2, 3, vec![]).index_pullback().unwrap(), 0);
    }

    #[test]
    fn simple_profile_branch_count() {
        // r = 2h − 2 − d(2g − 2) for simple profiles.
        for g in 0..3 {
            for d in 2..6 {
                for r in 0..6 {
                    let t = CoverType {
                        g,
                        d,
                        profile: BranchingProfile::simple(d, r),
                    };
                    if let Ok(inv) = t.derive_invariants() {
                        let lhs = 2 * inv.h as i64 - 2 - d as i64 * (2 * g as i64 - 2);
                        assert_eq!(lhs, r as i64);
                        assert_eq!(t.index_pullback().unwrap(), -2 * r as i64);
                    }
                }
            }
        }
    }

    #[test]
    fn profile_errors() {
        assert!(matches!(
            CoverType::new(0, 3, vec![vec![2]]),
            Err(CoverError::InvalidProfile(_))
        ));
        assert!(matches!(
            CoverType::new(0, 3, vec![vec![1, 1, 1]]),
            Err(CoverError::InvalidProfile(_))
        ));
        assert!(matches!(
            ct(0, 2, vec![vec![2]; 3]).derive_invariants(),
            Err(CoverError::NonIntegralGenus(_))
        ));
        assert!(matches!(
            ct(0, 2, vec![]).derive_invariants(),
            Err(CoverError::NegativeGenus(-1))
        ));
        // Parts are sorted on construction.
        assert_eq!(ct(0, 3, vec![vec![1, 2]]).profile.entries()[0], vec![2, 1]);
    }

    #[test]
    fn cover_groups_examples() {
        let t = Perm::from_cycles(2, &[&[1, 2]]).unwrap();
        let hyper = MonodromyCover::new(2, vec![], vec![t; 4]);
        let gr = cover_groups(&hyper).unwrap();
        assert_eq!((gr.group.order(), gr.stabilizer.order(), gr.aut_order), (2, 1, 2));

        let s12 = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let s23 = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        let dihedral = MonodromyCover::new(3, vec![(s12, s12), (s23, s23)], vec![]);
        let gr = cover_groups(&dihedral).unwrap();
        assert_eq!((gr.group.order(), gr.stabilizer.order(), gr.aut_order), (6, 2, 1));

        // d = 3 with four simple branch points and full S_3 monodromy.
        let s13 = Perm::from_cycles(3, &[&[1, 3]]).unwrap();
        let sym = MonodromyCover::new(3, vec![], vec![s12, s12, s13, s13]);
        let gr = cover_groups(&sym).unwrap();
        assert_eq!((gr.group.order(), gr.stabilizer.order(), gr.aut_order), (6, 2, 1));

        let split = MonodromyCover::new(3, vec![], vec![s12, s12]);
        assert_eq!(cover_groups(&split).unwrap_err(), CoverError::NotTransitive);
        let broken = MonodromyCover::new(3, vec![], vec![s12, s23]);
        assert!(matches!(
            cover_groups(&broken),
            Err(CoverError::InvalidMonodromy(_))
        ));
    }

    #[test]
    fn canonical_is_idempotent_and_minimal() {
        let s12 = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let s23 = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        let c = MonodromyCover::new(3, vec![(s23, s23), (s12, s12)], vec![]);
        let canon = c.canonical();
        assert_eq!(canon.canonical(), canon);
        assert!(canon.slots() <= c.slots());
    }

    #[test]
    fn json_is_one_based() {
        let t = ct(0, 2, vec![vec![2], vec![2]]);
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"g":0,"d":2,"profile":[[2],[2]]}"#
        );
        let back: CoverType = serde_json::from_str(r#"{"g":0,"d":3,"profile":[[1,2]]}"#).unwrap();
        assert_eq!(back.profile.entries()[0], vec![2, 1]);
        assert!(serde_json::from_str::<CoverType>(r#"{"g":0,"d":2,"extra":1}"#).is_err());
        let s12 = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let m = MonodromyCover::new(3, vec![], vec![s12, s12]);
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"degree":3,"handles":[],"branch":[[2,1,3],[2,1,3]]}"#
        );
    }
}
