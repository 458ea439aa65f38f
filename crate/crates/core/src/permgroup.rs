//! Finite permutation groups given by generators, stored as a sorted element list.

use std::collections::HashSet;

use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Closure of `gens` inside `S_degree`. Returns `None` if the group would
    /// exceed `cap` elements.
    pub fn generate(degree: usize, gens: &[Perm], cap: usize) -> Option<Self> {
        let id = Perm::identity(degree);
        let gens: Vec<Perm> = gens.iter().copied().filter(|g| !g.is_identity()).collect();
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id);
        let mut frontier = vec![id];
        let mut elements = vec![id];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = g.compose(&x);
                if seen.insert(y) {
                    if elements.len() >= cap {
                        return None;
                    }
                    elements.push(y);
                    frontier.push(y);
                }
            }
        }
        elements.sort_unstable();
        Some(PermGroup { degree, elements })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: vec![Perm::identity(degree)],
        }
    }

    pub fn symmetric(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: Perm::all(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in lexicographic order; the identity comes first.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        if self.degree == 0 {
            return true;
        }
        let mut reached = vec![false; self.degree];
        for g in &self.elements {
            reached[g.apply(0)] = true;
        }
        reached.into_iter().all(|r| r)
    }

    pub fn is_abelian(&self) -> bool {
        // Checking all pairs is fine at the sizes this crate handles.
        self.elements.iter().all(|a| {
            self.elements
                .iter()
                .all(|b| a.compose(b) == b.compose(a))
        })
    }

    /// Point stabilizer of the 0-based point `point`.
    pub fn stabilizer(&self, point: usize) -> PermGroup {
        PermGroup {
            degree: self.degree,
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|g| g.apply(point) == point)
                .collect(),
        }
    }

    /// `N_self(sub)`, assuming `sub` is a subgroup of `self`.
    pub fn normalizer(&self, sub: &PermGroup) -> PermGroup {
        PermGroup {
            degree: self.degree,
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|g| sub.elements.iter().all(|h| sub.contains(&h.conjugate_by(g))))
                .collect(),
        }
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|e| other.contains(e))
    }
}

/// Orbit partition of `{0..n}` under the group generated by `gens`, as a
/// transitivity test.
pub fn generates_transitive(degree: usize, gens: &[Perm]) -> bool {
    if degree <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = degree;
    for g in gens {
        for i in 0..degree {
            let a = find(&mut parent, i);
            let b = find(&mut parent, g.apply(i));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
    }
    components == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_of_the_triangle() {
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        let g = PermGroup::generate(3, &[a, b], 100).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let h = g.stabilizer(0);
        assert_eq!(h.order(), 2);
        assert_eq!(g.normalizer(&h).order(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let a = Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap();
        let b = Perm::from_cycles(5, &[&[1, 2]]).unwrap();
        assert!(PermGroup::generate(5, &[a, b], 100).is_none());
        assert_eq!(PermGroup::generate(5, &[a, b], 120).unwrap().order(), 120);
    }
}
