//! Character theory of finite permutation groups.
//!
//! Tables are computed once per group and hold exact cyclotomic values, so
//! Frobenius–Schur indicators, fixed-space dimensions and faithfulness are
//! all decided exactly. Real irreducible representations are assembled from
//! complex ones: a real-type character is kept, a complex-type one is paired
//! with its conjugate, and a quaternionic one is doubled.

pub mod cyclotomic;
mod dixon;
pub mod modp;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::perm::Perm;
use crate::permgroup::PermGroup;
use cyclotomic::{Cyclotomic, CyclotomicField};

pub const DEFAULT_ORDER_CAP: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group order exceeds the configured cap {0}")]
    OrderCapExceeded(usize),
    #[error("the given subgroup is not contained in the group")]
    NotASubgroup,
    #[error("character table validation failed: {0}")]
    ValidationFailed(String),
    #[error("irrep index {0} out of range")]
    NoSuchIrrep(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyClass {
    /// Lexicographically least element of the class.
    pub representative: Perm,
    #[serde(skip)]
    pub elements: Vec<usize>,
    pub size: usize,
    /// Element order.
    pub order: usize,
}

/// A finite permutation group with its conjugacy classes and power maps.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    group: PermGroup,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
    /// `power_classes[k][j]` is the class of `g_k^j` for `0 ≤ j < ord(g_k)`.
    power_classes: Vec<Vec<usize>>,
    exponent: usize,
}

impl FiniteGroup {
    pub fn from_generators(degree: usize, gens: &[Perm], cap: usize) -> Result<Self, GroupError> {
        let group =
            PermGroup::generate(degree, gens, cap).ok_or(GroupError::OrderCapExceeded(cap))?;
        Ok(Self::from_perm_group(group))
    }

    pub fn from_perm_group(group: PermGroup) -> Self {
        let elements = group.elements().to_vec();
        let index: HashMap<Perm, usize> =
            elements.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut classes = Vec::new();
        // Elements are sorted, so each class is met first at its least member.
        for (i, x) in elements.iter().enumerate() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for s in &elements {
                let j = index[&x.conjugate_by(s)];
                if class_of[j] == usize::MAX {
                    class_of[j] = c;
                    members.push(j);
                }
            }
            members.sort_unstable();
            classes.push(ConjugacyClass {
                representative: *x,
                size: members.len(),
                order: x.order(),
                elements: members,
            });
        }
        let exponent = classes.iter().map(|c| c.order).fold(1, num_integer::lcm);
        let power_classes = classes
            .iter()
            .map(|c| {
                let mut out = Vec::with_capacity(c.order);
                let mut p = Perm::identity(group.degree());
                for _ in 0..c.order {
                    out.push(class_of[index[&p]]);
                    p = p.compose(&c.representative);
                }
                out
            })
            .collect();
        FiniteGroup {
            group,
            elements,
            index,
            classes,
            class_of,
            power_classes,
            exponent,
        }
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.index.contains_key(p)
    }

    /// Class index of an element of the group. Panics if `p ∉ G`.
    pub fn class_of_perm(&self, p: &Perm) -> usize {
        self.class_of[self.index[p]]
    }

    pub fn inverse_class(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| self.class_of_perm(&c.representative.inverse()))
            .collect()
    }

    /// Class of `g_k^2`.
    pub fn square_class(&self, k: usize) -> usize {
        let o = self.classes[k].order;
        self.power_classes[k][2 % o]
    }

    /// Number of elements of `h` in each class of `self`.
    pub fn class_counts(&self, h: &PermGroup) -> Result<Vec<usize>, GroupError> {
        let mut counts = vec![0usize; self.class_count()];
        for x in h.elements() {
            let i = *self.index.get(x).ok_or(GroupError::NotASubgroup)?;
            counts[self.class_of[i]] += 1;
        }
        Ok(counts)
    }

    /// All subgroups, each as a sorted element list, found by closing every
    /// subgroup found so far under one more element.
    pub fn subgroups(&self) -> Vec<PermGroup> {
        let d = self.degree();
        let mut found: Vec<PermGroup> = vec![PermGroup::trivial(d)];
        let mut seen: std::collections::HashSet<Vec<Perm>> = std::collections::HashSet::new();
        seen.insert(found[0].elements().to_vec());
        let mut k = 0;
        while k < found.len() {
            let base = found[k].clone();
            for x in &self.elements {
                if base.contains(x) {
                    continue;
                }
                let mut gens = base.elements().to_vec();
                gens.push(*x);
                let sub = PermGroup::generate(d, &gens, usize::MAX).expect("uncapped");
                if seen.insert(sub.elements().to_vec()) {
                    found.push(sub);
                }
            }
            k += 1;
        }
        found.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.elements().cmp(b.elements()))
        });
        found
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FsType {
    Real,
    Complex,
    Quaternionic,
}

impl FsType {
    pub fn indicator(self) -> i64 {
        match self {
            FsType::Real => 1,
            FsType::Complex => 0,
            FsType::Quaternionic => -1,
        }
    }

    /// `dim_R End_G` of the associated real irreducible.
    pub fn k_dim(self) -> usize {
        match self {
            FsType::Real => 1,
            FsType::Complex => 2,
            FsType::Quaternionic => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexIrrep {
    pub degree: usize,
    /// Value on each class, in the power basis of `Q(ζ_e)`.
    pub values: Vec<Cyclotomic>,
    pub frobenius_schur: FsType,
    /// Eigenvalue multiplicities per class, indexed by powers of `ζ_e`.
    #[serde(skip)]
    eigen: Vec<Vec<(usize, i64)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealIrrep {
    /// Indices of the underlying complex irreducibles (two for complex type).
    pub complex: Vec<usize>,
    pub kind: FsType,
    pub dim: usize,
    pub k_dim: usize,
    /// Character of the real representation, complexified.
    pub character: Vec<Cyclotomic>,
}

/// Character table with its derived real irreducibles.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: Arc<FiniteGroup>,
    field: Arc<CyclotomicField>,
    irreps: Vec<ComplexIrrep>,
    real: Vec<RealIrrep>,
}

fn sparse(row: &[i64]) -> Vec<(usize, i64)> {
    row.iter()
        .enumerate()
        .filter(|(_, &m)| m != 0)
        .map(|(l, &m)| (l, m))
        .collect()
}

impl CharacterTable {
    pub fn compute(group: FiniteGroup) -> Result<Self, GroupError> {
        let group = Arc::new(group);
        let field = CyclotomicField::get(group.exponent());
        let raw = dixon::compute(&group)?;
        let mut irreps: Vec<ComplexIrrep> = raw
            .degrees
            .iter()
            .zip(&raw.multiplicities)
            .map(|(&degree, rows)| ComplexIrrep {
                degree,
                values: rows.iter().map(|r| field.reduce(r)).collect(),
                frobenius_schur: FsType::Real,
                eigen: rows.iter().map(|r| sparse(r)).collect(),
            })
            .collect();
        let trivial_first = |a: &ComplexIrrep| !a.values.iter().all(|v| v.as_integer() == Some(1));
        irreps.sort_by(|a, b| {
            trivial_first(a)
                .cmp(&trivial_first(b))
                .then_with(|| a.degree.cmp(&b.degree))
                .then_with(|| a.values.cmp(&b.values))
        });
        let mut table = CharacterTable {
            group,
            field,
            irreps,
            real: Vec::new(),
        };
        table.validate()?;
        for i in 0..table.irreps.len() {
            table.irreps[i].frobenius_schur = table.compute_fs(i)?;
        }
        table.real = table.assemble_real()?;
        Ok(table)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn irreps(&self) -> &[ComplexIrrep] {
        &self.irreps
    }

    pub fn real_irreps(&self) -> &[RealIrrep] {
        &self.real
    }

    fn real_irrep(&self, rho: usize) -> Result<&RealIrrep, GroupError> {
        self.real.get(rho).ok_or(GroupError::NoSuchIrrep(rho))
    }

    /// `Σ_k w_k χ_a(g_k) conj(χ_b(g_k))` reduced to the power basis.
    fn pairing(&self, a: usize, b: usize, weights: &[i64]) -> Cyclotomic {
        let e = self.field.conductor();
        let mut acc = vec![0i64; e];
        for (k, &w) in weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for &(la, ma) in &self.irreps[a].eigen[k] {
                for &(lb, mb) in &self.irreps[b].eigen[k] {
                    acc[(la + e - lb) % e] += w * ma * mb;
                }
            }
        }
        self.field.reduce(&acc)
    }

    /// Exact row and column orthogonality, plus `Σ χ(1)² = |G|`.
    pub fn validate(&self) -> Result<(), GroupError> {
        let g = &self.group;
        let n = self.irreps.len();
        let order = g.order() as i64;
        if n != g.class_count() {
            return Err(GroupError::ValidationFailed("table is not square".into()));
        }
        let sizes: Vec<i64> = g.classes.iter().map(|c| c.size as i64).collect();
        let deg_sq: usize = self.irreps.iter().map(|c| c.degree * c.degree).sum();
        if deg_sq != g.order() {
            return Err(GroupError::ValidationFailed(format!(
                "sum of squared degrees {} differs from |G| = {}",
                deg_sq,
                g.order()
            )));
        }
        for a in 0..n {
            for b in a..n {
                let expected = if a == b { order } else { 0 };
                if self.pairing(a, b, &sizes).as_integer() != Some(expected) {
                    return Err(GroupError::ValidationFailed(format!(
                        "row orthogonality fails for irreps {a} and {b}"
                    )));
                }
            }
        }
        let e = self.field.conductor();
        for k in 0..n {
            for l in k..n {
                let mut acc = vec![0i64; e];
                for irrep in &self.irreps {
                    for &(la, ma) in &irrep.eigen[k] {
                        for &(lb, mb) in &irrep.eigen[l] {
                            acc[(la + e - lb) % e] += ma * mb;
                        }
                    }
                }
                let expected = if k == l { order / sizes[k] } else { 0 };
                if self.field.reduce(&acc).as_integer() != Some(expected) {
                    return Err(GroupError::ValidationFailed(format!(
                        "column orthogonality fails for classes {k} and {l}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(1/|G|) Σ_k |C_k| χ(g_k²)`.
    fn compute_fs(&self, a: usize) -> Result<FsType, GroupError> {
        let g = &self.group;
        let mut acc = vec![0i64; self.field.conductor()];
        for k in 0..g.class_count() {
            let sq = g.square_class(k);
            for &(l, m) in &self.irreps[a].eigen[sq] {
                acc[l] += g.classes[k].size as i64 * m;
            }
        }
        let sum = self
            .field
            .reduce(&acc)
            .as_integer()
            .ok_or_else(|| GroupError::ValidationFailed("indicator sum is irrational".into()))?;
        match sum / g.order() as i64 {
            _ if sum % g.order() as i64 != 0 => Err(GroupError::ValidationFailed(
                "indicator sum not divisible by |G|".into(),
            )),
            1 => Ok(FsType::Real),
            0 => Ok(FsType::Complex),
            -1 => Ok(FsType::Quaternionic),
            v => Err(GroupError::ValidationFailed(format!("indicator {v}"))),
        }
    }

    pub fn frobenius_schur(&self, a: usize) -> Result<FsType, GroupError> {
        self.irreps
            .get(a)
            .map(|c| c.frobenius_schur)
            .ok_or(GroupError::NoSuchIrrep(a))
    }

    /// Index of the complex conjugate of irrep `a`.
    pub fn conjugate_of(&self, a: usize) -> usize {
        let conj: Vec<Cyclotomic> = self.irreps[a].values.iter().map(|v| v.conj()).collect();
        self.irreps
            .iter()
            .position(|c| c.values == conj)
            .expect("the conjugate of an irreducible character is irreducible")
    }

    fn assemble_real(&self) -> Result<Vec<RealIrrep>, GroupError> {
        let mut used = vec![false; self.irreps.len()];
        let mut out = Vec::new();
        for a in 0..self.irreps.len() {
            if used[a] {
                continue;
            }
            used[a] = true;
            let irrep = &self.irreps[a];
            let kind = irrep.frobenius_schur;
            let (complex, character) = match kind {
                FsType::Real => (vec![a], irrep.values.clone()),
                FsType::Complex => {
                    let b = self.conjugate_of(a);
                    if b == a {
                        return Err(GroupError::ValidationFailed(
                            "complex-type character equals its conjugate".into(),
                        ));
                    }
                    used[b] = true;
                    let ch = irrep
                        .values
                        .iter()
                        .zip(&self.irreps[b].values)
                        .map(|(x, y)| x.add(y))
                        .collect();
                    (vec![a, b], ch)
                }
                FsType::Quaternionic => (vec![a], irrep.values.iter().map(|x| x.scale(2)).collect()),
            };
            let dim = match kind {
                FsType::Real => irrep.degree,
                _ => 2 * irrep.degree,
            };
            out.push(RealIrrep {
                complex,
                kind,
                dim,
                k_dim: kind.k_dim(),
                character,
            });
        }
        Ok(out)
    }

    /// `(1/|H|) Σ_{h∈H} χ_ρ(h)`, the real dimension of `ρ^H`.
    pub fn fixed_dim(&self, rho: usize, h: &PermGroup) -> Result<usize, GroupError> {
        let irrep = self.real_irrep(rho)?;
        let counts = self.group.class_counts(h)?;
        let mut total = self.field.zero();
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                total = total.add(&irrep.character[k].scale(c as i64));
            }
        }
        let sum = total
            .as_integer()
            .ok_or_else(|| GroupError::ValidationFailed("subgroup character sum is irrational".into()))?;
        let ho = h.order() as i64;
        if sum < 0 || sum % ho != 0 {
            return Err(GroupError::ValidationFailed(format!(
                "subgroup character sum {sum} is not a non-negative multiple of |H| = {ho}"
            )));
        }
        Ok((sum / ho) as usize)
    }

    /// True iff no non-identity class has `χ_ρ(g) = χ_ρ(1)`.
    pub fn is_faithful(&self, rho: usize) -> Result<bool, GroupError> {
        let irrep = self.real_irrep(rho)?;
        let one = &irrep.character[0];
        Ok(irrep.character[1..].iter().all(|v| v != one))
    }

    /// `⟨χ_ρ, χ_ρ⟩ = dim_R End_G(ρ)`, computed from the character.
    fn real_norm(&self, rho: usize) -> i64 {
        let irrep = &self.real[rho];
        let g = &self.group;
        let mut acc = vec![0i64; self.field.conductor()];
        for k in 0..g.class_count() {
            let v = &irrep.character[k];
            v.mul_into(&v.conj(), g.classes[k].size as i64, &mut acc);
        }
        self.field.reduce(&acc).as_integer().unwrap_or(0) / g.order() as i64
    }

    /// Multiplicity of every real irreducible in `R[G/H]`. Each is computed
    /// as `⟨π, χ_ρ⟩ / ⟨χ_ρ, χ_ρ⟩` from the permutation character `π` and
    /// checked against `fixed_dim(ρ, H) / dim K_ρ`.
    pub fn permutation_module_decomposition(&self, h: &PermGroup) -> Result<Vec<usize>, GroupError> {
        let g = &self.group;
        if !h.is_subgroup_of(g.perm_group()) {
            return Err(GroupError::NotASubgroup);
        }
        let counts = g.class_counts(h)?;
        let go = g.order() as i64;
        let ho = h.order() as i64;
        // π(g_k) = |G| |C_k ∩ H| / (|C_k| |H|)
        let pi: Vec<i64> = (0..g.class_count())
            .map(|k| {
                let num = go * counts[k] as i64;
                let den = g.classes[k].size as i64 * ho;
                debug_assert_eq!(num % den, 0);
                num / den
            })
            .collect();
        let mut mults = Vec::with_capacity(self.real.len());
        let mut total_dim = 0usize;
        for (rho, irrep) in self.real.iter().enumerate() {
            let mut acc = vec![0i64; self.field.conductor()];
            for k in 0..g.class_count() {
                if pi[k] == 0 {
                    continue;
                }
                let w = g.classes[k].size as i64 * pi[k];
                for (l, &c) in irrep.character[k].conj().coeffs().iter().enumerate() {
                    acc[l] += w * c;
                }
            }
            let inner = self
                .field
                .reduce(&acc)
                .as_integer()
                .ok_or_else(|| GroupError::ValidationFailed("irrational inner product".into()))?;
            let norm = self.real_norm(rho) * go;
            if norm == 0 || inner % norm != 0 {
                return Err(GroupError::ValidationFailed(format!(
                    "permutation character pairing {inner} not divisible by {norm}"
                )));
            }
            let m = (inner / norm) as usize;
            let fixed = self.fixed_dim(rho, h)?;
            if fixed != m * irrep.k_dim {
                return Err(GroupError::ValidationFailed(format!(
                    "Frobenius reciprocity fails for real irrep {rho}: {m} vs {fixed}/{}",
                    irrep.k_dim
                )));
            }
            total_dim += m * irrep.dim;
            mults.push(m);
        }
        if total_dim as i64 != go / ho {
            return Err(GroupError::ValidationFailed(format!(
                "permutation module has dimension {total_dim}, expected [G:H] = {}",
                go / ho
            )));
        }
        Ok(mults)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.group.order(),
            "exponent": self.group.exponent(),
            "classes": self.group.classes(),
            "irreps": self.irreps,
            "real_irreps": self.real,
        })
    }
}

/// Computes the table of the group generated by `gens`.
pub fn character_table(degree: usize, gens: &[Perm], cap: usize) -> Result<CharacterTable, GroupError> {
    CharacterTable::compute(FiniteGroup::from_generators(degree, gens, cap)?)
}
