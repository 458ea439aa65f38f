//! Wall types `δ = (g, d, b, G, k, c, A)` and their classification.
//!
//! `G` acts transitively on `d = [G:H]` sheets, `k` and `c` are real
//! `G`-representations given by multiplicities over the real irreducibles of
//! `G` (in the order of [`CharacterTable::real_irreps`]), and `A` is carried
//! as a label only.

use serde::{Deserialize, Serialize};

use crate::covers::{BranchingProfile, CoverClass, CoverError};
use crate::groups::{CharacterTable, FiniteGroup, FsType, GroupError};
use crate::perm::Perm;
use crate::permgroup::PermGroup;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WallError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid wall type: {0}")]
    Invalid(String),
    #[error("kernel/cokernel shape violated: {0}")]
    ShapeViolation(String),
}

/// A real representation in JSON: one irreducible, or a multiplicity vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RepSpec {
    Irrep {
        irrep: usize,
        #[serde(default = "one")]
        multiplicity: usize,
    },
    Multiplicities { multiplicities: Vec<usize> },
}

fn one() -> usize {
    1
}

impl RepSpec {
    fn to_vector(&self, n: usize) -> Result<Vec<usize>, WallError> {
        match self {
            RepSpec::Irrep {
                irrep,
                multiplicity,
            } => {
                if *irrep >= n {
                    return Err(WallError::Invalid(format!(
                        "irrep index {irrep} out of range (group has {n} real irreps)"
                    )));
                }
                let mut v = vec![0; n];
                v[*irrep] = *multiplicity;
                Ok(v)
            }
            RepSpec::Multiplicities { multiplicities } => {
                if multiplicities.len() != n {
                    return Err(WallError::Invalid(format!(
                        "multiplicity vector has length {}, group has {n} real irreps",
                        multiplicities.len()
                    )));
                }
                Ok(multiplicities.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generators {
    pub generators: Vec<Perm>,
}

/// Serialized form of a wall type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallTypeSpec {
    pub g: usize,
    pub d: usize,
    #[serde(default)]
    pub profile: Vec<Vec<usize>>,
    pub group: Generators,
    pub stabilizer: Generators,
    pub k: RepSpec,
    pub c: RepSpec,
    #[serde(rename = "A", default)]
    pub a: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elementarity {
    NotElementary,
    ElementaryTrivial,
    ElementaryNontrivial,
}

#[derive(Debug, Clone)]
pub struct WallType {
    pub g: usize,
    pub d: usize,
    pub profile: BranchingProfile,
    pub table: CharacterTable,
    pub stabilizer: PermGroup,
    pub k: Vec<usize>,
    pub c: Vec<usize>,
    pub label: String,
}

impl WallType {
    pub fn from_spec(spec: &WallTypeSpec, order_cap: usize) -> Result<Self, WallError> {
        let degree = spec
            .group
            .generators
            .iter()
            .chain(&spec.stabilizer.generators)
            .map(|p| p.degree())
            .max()
            .unwrap_or(spec.d);
        if spec
            .group
            .generators
            .iter()
            .chain(&spec.stabilizer.generators)
            .any(|p| p.degree() != degree)
        {
            return Err(WallError::Invalid("generators act on different point sets".into()));
        }
        let group = FiniteGroup::from_generators(degree, &spec.group.generators, order_cap)?;
        let stabilizer = PermGroup::generate(degree, &spec.stabilizer.generators, order_cap)
            .ok_or(GroupError::OrderCapExceeded(order_cap))?;
        let table = CharacterTable::compute(group)?;
        let n = table.real_irreps().len();
        let k = spec.k.to_vector(n)?;
        let c = spec.c.to_vector(n)?;
        Self::new(
            spec.g,
            spec.d,
            spec.profile.clone(),
            table,
            stabilizer,
            k,
            c,
            spec.a.clone(),
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: usize,
        d: usize,
        profile: Vec<Vec<usize>>,
        table: CharacterTable,
        stabilizer: PermGroup,
        k: Vec<usize>,
        c: Vec<usize>,
        label: String,
    ) -> Result<Self, WallError> {
        let profile = BranchingProfile::new(d, profile)?;
        let group = table.group().perm_group();
        if !stabilizer.is_subgroup_of(group) {
            return Err(GroupError::NotASubgroup.into());
        }
        if group.order() != d * stabilizer.order() {
            return Err(WallError::Invalid(format!(
                "d = {d} differs from [G:H] = {}",
                group.order() / stabilizer.order()
            )));
        }
        let n = table.real_irreps().len();
        if k.len() != n || c.len() != n {
            return Err(WallError::Invalid("representation vectors have the wrong length".into()));
        }
        if k.iter().all(|&m| m == 0) {
            return Err(WallError::Invalid("k must be nonzero".into()));
        }
        if c.iter().all(|&m| m == 0) {
            return Err(WallError::Invalid("c must be nonzero".into()));
        }
        Ok(WallType {
            g,
            d,
            profile,
            table,
            stabilizer,
            k,
            c,
            label,
        })
    }

    /// Wall type of a cover class with `G` its monodromy group and `H` the
    /// stabilizer of the first sheet.
    pub fn from_cover(
        class: &CoverClass,
        k: Vec<usize>,
        c: Vec<usize>,
        label: String,
        order_cap: usize,
    ) -> Result<Self, WallError> {
        let rep = &class.representative;
        let group = FiniteGroup::from_generators(rep.degree, &rep.slots(), order_cap)?;
        let stabilizer = group.perm_group().stabilizer(0);
        let table = CharacterTable::compute(group)?;
        Self::new(
            rep.genus(),
            rep.degree,
            rep.profile(),
            table,
            stabilizer,
            k,
            c,
            label,
        )
    }

    pub fn r(&self) -> usize {
        self.profile.len()
    }

    /// `dim_R Hom^G(k, c) = Σ_i m_i(k) m_i(c) dim_R K_i`.
    pub fn codim(&self) -> usize {
        self.table
            .real_irreps()
            .iter()
            .zip(self.k.iter().zip(&self.c))
            .map(|(rho, (mk, mc))| mk * mc * rho.k_dim)
            .sum()
    }

    /// Index of `k` when it is a single real irreducible with multiplicity 1.
    pub fn k_irrep(&self) -> Option<usize> {
        let mut support = self.k.iter().enumerate().filter(|(_, &m)| m > 0);
        match (support.next(), support.next()) {
            (Some((i, 1)), None) => Some(i),
            _ => None,
        }
    }

    /// `k` is a single faithful irreducible of real type.
    fn k_is_faithful_real_irreducible(&self) -> Result<Option<usize>, WallError> {
        let Some(i) = self.k_irrep() else {
            return Ok(None);
        };
        let rho = &self.table.real_irreps()[i];
        if rho.kind != FsType::Real || !self.table.is_faithful(i)? {
            return Ok(None);
        }
        Ok(Some(i))
    }

    pub fn fixed_dim_k(&self) -> Result<usize, WallError> {
        let mut total = 0;
        for (i, &m) in self.k.iter().enumerate() {
            if m > 0 {
                total += m * self.table.fixed_dim(i, &self.stabilizer)?;
            }
        }
        Ok(total)
    }

    pub fn is_codim_one(&self) -> Result<bool, WallError> {
        Ok(self.profile.parts_at_most_two() && self.k_is_faithful_real_irreducible()?.is_some())
    }

    pub fn is_elementary(&self) -> Result<Elementarity, WallError> {
        let branching_ok = self.d >= 2 && (self.profile.is_empty() || self.profile.is_simple());
        if !branching_ok || self.k_is_faithful_real_irreducible()?.is_none() {
            return Ok(Elementarity::NotElementary);
        }
        let fixed = self.fixed_dim_k()?;
        if self.profile.is_empty() && fixed > 1 {
            return Ok(Elementarity::NotElementary);
        }
        Ok(if fixed == 0 {
            Elementarity::ElementaryTrivial
        } else {
            Elementarity::ElementaryNontrivial
        })
    }

    /// `(dim ker, dim coker) = (1, 1 + 2r)` for a nontrivial elementary wall.
    pub fn ker_coker_shape(&self) -> Result<(usize, usize), WallError> {
        match self.is_elementary()? {
            Elementarity::NotElementary => {
                return Err(WallError::ShapeViolation("wall type is not elementary".into()))
            }
            Elementarity::ElementaryTrivial => {
                return Err(WallError::ShapeViolation("k^H = 0 (trivial elementary wall)".into()))
            }
            Elementarity::ElementaryNontrivial => {}
        }
        let fixed = self.fixed_dim_k()?;
        if fixed != 1 {
            return Err(WallError::ShapeViolation(format!("dim k^H = {fixed}, not 1")));
        }
        Ok((1, 1 + 2 * self.r()))
    }

    /// `|N_G(H)/H|`.
    pub fn aut_order(&self) -> usize {
        let g = self.table.group().perm_group();
        g.normalizer(&self.stabilizer).order() / self.stabilizer.order()
    }

    pub fn multiple_cover_criterion(&self) -> Result<Option<PermGroup>, WallError> {
        match self.k_irrep() {
            Some(i) => multiple_cover_criterion(&self.table, &self.stabilizer, i),
            None => Err(WallError::Invalid("k is not a single irreducible".into())),
        }
    }
}

/// Subgroups `H ⊊ H′ ≤ G`, ordered by size then elements.
pub fn proper_overgroups(group: &FiniteGroup, h: &PermGroup) -> Vec<PermGroup> {
    let d = group.degree();
    let mut found: Vec<PermGroup> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![h.clone()];
    while let Some(base) = frontier.pop() {
        for x in group.elements() {
            if base.contains(x) {
                continue;
            }
            let mut gens = base.elements().to_vec();
            gens.push(*x);
            let sub = PermGroup::generate(d, &gens, usize::MAX).expect("uncapped");
            if seen.insert(sub.elements().to_vec()) {
                found.push(sub.clone());
                frontier.push(sub);
            }
        }
    }
    found.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.elements().cmp(b.elements()))
    });
    found
}

/// The smallest `H′ ⊋ H` with `dim ρ^{H′} = dim ρ^H ≠ 0`, if any: its
/// existence means the multisection descends to a quotient cover.
pub fn multiple_cover_criterion(
    table: &CharacterTable,
    h: &PermGroup,
    rho: usize,
) -> Result<Option<PermGroup>, WallError> {
    let base = table.fixed_dim(rho, h)?;
    if base == 0 {
        return Ok(None);
    }
    for sub in proper_overgroups(table.group(), h) {
        if table.fixed_dim(rho, &sub)? == base {
            return Ok(Some(sub));
        }
    }
    Ok(None)
}
