//! Orderly depth-first enumeration of monodromy tuples.
//!
//! Slots are filled left to right. Alongside the prefix we keep the set of
//! relabelings `σ ∈ S_d` that fix it under simultaneous conjugation; a
//! candidate `x` is rejected as soon as some such `σ` maps it to something
//! smaller, so every surviving leaf is the lexicographic minimum of its orbit
//! and each orbit is visited exactly once. When there are branch points the
//! last one is solved from the product relation instead of searched.

use std::cell::OnceCell;
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CoverClass, CoverError, CoverType, MonodromyCover};
use crate::perm::{Perm, MAX_DEGREE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub degree_cap: usize,
    /// Maximum number of candidate placements examined.
    pub node_cap: u64,
    /// Shuffles the traversal order; the output does not depend on it.
    pub seed: Option<u64>,
    pub parallel: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            degree_cap: 8,
            node_cap: 100_000_000,
            seed: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub nodes: u64,
    pub classes: u64,
    /// Total number of valid tuples, i.e. `Σ d!/|Aut|` over classes.
    pub tuples: u128,
}

/// Subgroup of `S_d` generated by a tuple prefix.
struct GroupInfo {
    elements: Vec<Perm>,
    member: Vec<u64>,
    gens: Vec<Perm>,
    transitive: bool,
    aut: OnceCell<usize>,
}

impl GroupInfo {
    fn trivial(d: usize) -> Self {
        Self::closure(d, Vec::new())
    }

    fn contains(&self, p: &Perm) -> bool {
        let r = p.rank();
        self.member[r / 64] >> (r % 64) & 1 == 1
    }

    fn closure(d: usize, gens: Vec<Perm>) -> Self {
        let total: usize = (1..=d).product();
        let mut member = vec![0u64; total.div_ceil(64)];
        let id = Perm::identity(d);
        let mut elements = vec![id];
        let r = id.rank();
        member[r / 64] |= 1 << (r % 64);
        let mut i = 0;
        while i < elements.len() {
            let e = elements[i];
            for g in &gens {
                let y = g.compose(&e);
                let r = y.rank();
                if member[r / 64] >> (r % 64) & 1 == 0 {
                    member[r / 64] |= 1 << (r % 64);
                    elements.push(y);
                }
            }
            i += 1;
        }
        let mut reached = [false; MAX_DEGREE];
        for e in &elements {
            reached[e.apply(0)] = true;
        }
        let transitive = d == 0 || reached[..d].iter().all(|&x| x);
        GroupInfo {
            elements,
            member,
            gens,
            transitive,
            aut: OnceCell::new(),
        }
    }

    fn extend(self: &Rc<Self>, d: usize, x: &Perm) -> Rc<Self> {
        if self.contains(x) {
            Rc::clone(self)
        } else {
            let mut gens = self.gens.clone();
            gens.push(*x);
            Rc::new(Self::closure(d, gens))
        }
    }

    /// `|N_G(H)/H|` for `H = Stab(0)`. Since `g H g⁻¹ = Stab(g(0))`, `g`
    /// normalizes `H` exactly when `g(0)` is fixed by `H`, and for a
    /// transitive action the quotient has order `|Fix(H)|`.
    fn aut_order(&self, d: usize) -> usize {
        *self.aut.get_or_init(|| {
            let mut fixed = [true; MAX_DEGREE];
            for h in self.elements.iter().filter(|h| h.apply(0) == 0) {
                for (j, f) in fixed.iter_mut().enumerate().take(d) {
                    if h.apply(j) != j {
                        *f = false;
                    }
                }
            }
            fixed[..d].iter().filter(|&&f| f).count()
        })
    }
}

#[derive(Clone)]
enum SlotKind {
    Handle,
    Branch,
}

struct Plan {
    d: usize,
    genus: usize,
    /// Candidate lists for the searched slots.
    candidates: Vec<Vec<Perm>>,
    kinds: Vec<SlotKind>,
    /// Cycle type of the solved last branch point, if any.
    solved: Option<Vec<usize>>,
    all: Vec<Perm>,
    factorial: u128,
}

impl Plan {
    fn new(t: &CoverType, options: &EnumerationOptions) -> Result<Self, CoverError> {
        let d = t.d;
        let cap = options.degree_cap.min(MAX_DEGREE);
        if d > cap {
            return Err(CoverError::DegreeCapExceeded { degree: d, cap });
        }
        t.derive_invariants()?;
        let all = Perm::all(d);
        let class_of = |ct: &[usize]| -> Vec<Perm> {
            all.iter().copied().filter(|p| p.cycle_type() == ct).collect()
        };
        let mut candidates = Vec::new();
        let mut kinds = Vec::new();
        for _ in 0..2 * t.g {
            candidates.push(all.clone());
            kinds.push(SlotKind::Handle);
        }
        let entries = t.profile.entries();
        let solved = entries.last().cloned();
        for part in entries.iter().take(entries.len().saturating_sub(1)) {
            candidates.push(class_of(part));
            kinds.push(SlotKind::Branch);
        }
        if let Some(seed) = options.seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for list in &mut candidates {
                list.shuffle(&mut rng);
            }
        }
        Ok(Plan {
            d,
            genus: t.g,
            candidates,
            kinds,
            solved,
            all,
            factorial: (1..=d as u128).product(),
        })
    }

    /// Level-0 choices: only the least element of each conjugacy class can
    /// start a canonical tuple.
    fn roots(&self) -> Vec<Perm> {
        let Some(first) = self.candidates.first() else {
            return Vec::new();
        };
        let mut sorted = first.clone();
        sorted.sort_unstable();
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut roots = Vec::new();
        for p in sorted {
            let ct = p.cycle_type();
            if !seen.contains(&ct) {
                seen.push(ct);
                roots.push(p);
            }
        }
        roots
    }
}

struct Budget<'a> {
    used: &'a AtomicU64,
    abort: &'a AtomicBool,
    cap: u64,
    local: u64,
}

impl Budget<'_> {
    const CHUNK: u64 = 4096;

    #[inline]
    fn tick(&mut self) -> Result<(), CoverError> {
        self.local += 1;
        if self.local == Self::CHUNK {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), CoverError> {
        let total = self.used.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.cap || self.abort.load(Ordering::Relaxed) {
            self.abort.store(true, Ordering::Relaxed);
            return Err(CoverError::BudgetExceeded(self.cap));
        }
        Ok(())
    }
}

struct Search<'p, 'b, F: FnMut(CoverClass)> {
    plan: &'p Plan,
    budget: Budget<'b>,
    tuple: Vec<Perm>,
    products: Vec<Perm>,
    groups: Vec<Rc<GroupInfo>>,
    sink: F,
    classes: u64,
    tuples: u128,
}

impl<F: FnMut(CoverClass)> Search<'_, '_, F> {
    /// Checks `x` against the active relabelings. Returns `None` if some
    /// relabeling makes it smaller, otherwise the relabelings that fix it.
    fn admissible(active: &[Perm], x: &Perm) -> Option<Vec<Perm>> {
        let mut keep = Vec::new();
        for s in active {
            let y = x.conjugate_by(s);
            match y.cmp(x) {
                std::cmp::Ordering::Less => return None,
                std::cmp::Ordering::Equal => keep.push(*s),
                std::cmp::Ordering::Greater => {}
            }
        }
        Some(keep)
    }

    fn push(&mut self, depth: usize, x: Perm, kind: Option<&SlotKind>) {
        let prev = *self.products.last().expect("base product");
        let prod = match kind {
            Some(SlotKind::Handle) if depth % 2 == 1 => {
                prev.compose(&Perm::commutator(&self.tuple[depth - 1], &x))
            }
            Some(SlotKind::Handle) => prev,
            _ => prev.compose(&x),
        };
        let group = self.groups.last().expect("base group").extend(self.plan.d, &x);
        self.tuple.push(x);
        self.products.push(prod);
        self.groups.push(group);
    }

    fn pop(&mut self) {
        self.tuple.pop();
        self.products.pop();
        self.groups.pop();
    }

    fn run(&mut self, depth: usize, active: &[Perm]) -> Result<(), CoverError> {
        let plan = self.plan;
        if depth < plan.candidates.len() {
            for x in &plan.candidates[depth] {
                self.budget.tick()?;
                let Some(next) = Self::admissible(active, x) else {
                    continue;
                };
                self.push(depth, *x, Some(&plan.kinds[depth]));
                self.run(depth + 1, &next)?;
                self.pop();
            }
            return Ok(());
        }
        let prod = *self.products.last().expect("base product");
        let active = match &plan.solved {
            Some(ct) => {
                self.budget.tick()?;
                let last = prod.inverse();
                if &last.cycle_type() != ct {
                    return Ok(());
                }
                let Some(next) = Self::admissible(active, &last) else {
                    return Ok(());
                };
                self.push(depth, last, None);
                let r = self.emit(next.len());
                self.pop();
                return r;
            }
            None => {
                if !prod.is_identity() {
                    return Ok(());
                }
                active.len()
            }
        };
        self.emit(active)
    }

    fn emit(&mut self, centralizer: usize) -> Result<(), CoverError> {
        let plan = self.plan;
        let group = self.groups.last().expect("base group");
        if !group.transitive {
            return Ok(());
        }
        let aut_order = group.aut_order(plan.d);
        debug_assert_eq!(aut_order, centralizer);
        let class = CoverClass {
            representative: MonodromyCover::from_slots(plan.d, plan.genus, &self.tuple),
            group_order: group.elements.len(),
            stabilizer_order: group.elements.len() / plan.d.max(1),
            aut_order,
        };
        self.classes += 1;
        self.tuples += plan.factorial / aut_order as u128;
        (self.sink)(class);
        Ok(())
    }
}

/// Runs the search below one root (or the whole search when `root` is
/// `None`) and feeds classes to `sink`.
fn search_from<F: FnMut(CoverClass)>(
    plan: &Plan,
    root: Option<Perm>,
    used: &AtomicU64,
    abort: &AtomicBool,
    cap: u64,
    sink: F,
) -> Result<(u64, u128), CoverError> {
    let d = plan.d;
    let base = Rc::new(GroupInfo::trivial(d));
    let mut search = Search {
        plan,
        budget: Budget {
            used,
            abort,
            cap,
            local: 0,
        },
        tuple: Vec::new(),
        products: vec![Perm::identity(d)],
        groups: vec![base],
        sink,
        classes: 0,
        tuples: 0,
    };
    let result = match root {
        Some(x) => {
            let centralizer: Vec<Perm> = plan
                .all
                .iter()
                .copied()
                .filter(|s| x.conjugate_by(s) == x)
                .collect();
            search.budget.tick()?;
            search.push(0, x, Some(&plan.kinds[0]));
            search.run(1, &centralizer)
        }
        None => search.run(0, &plan.all),
    };
    result?;
    search.budget.flush()?;
    Ok((search.classes, search.tuples))
}

/// Streams every class to `visitor` in traversal order, on the calling
/// thread. Useful when the full list would not fit in memory.
pub fn for_each_cover<F: FnMut(CoverClass)>(
    t: &CoverType,
    options: &EnumerationOptions,
    mut visitor: F,
) -> Result<EnumerationStats, CoverError> {
    let plan = Plan::new(t, options)?;
    let used = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let mut stats = EnumerationStats::default();
    if plan.candidates.is_empty() {
        let (c, n) = search_from(&plan, None, &used, &abort, options.node_cap, &mut visitor)?;
        stats.classes += c;
        stats.tuples += n;
    } else {
        for root in plan.roots() {
            let (c, n) =
                search_from(&plan, Some(root), &used, &abort, options.node_cap, &mut visitor)?;
            stats.classes += c;
            stats.tuples += n;
        }
    }
    stats.nodes = used.load(Ordering::Relaxed);
    Ok(stats)
}

/// All conjugation classes of monodromy tuples of type `t` whose class passes
/// `filter`, sorted by canonical representative.
pub fn enumerate_covers(
    t: &CoverType,
    filter: Option<&(dyn Fn(&CoverClass) -> bool + Sync)>,
    options: &EnumerationOptions,
) -> Result<Vec<CoverClass>, CoverError> {
    let plan = Plan::new(t, options)?;
    let used = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let keep = |c: &CoverClass| filter.map_or(true, |f| f(c));
    let run_root = |root: Option<Perm>| -> Result<Vec<CoverClass>, CoverError> {
        let mut out = Vec::new();
        search_from(&plan, root, &used, &abort, options.node_cap, |c| {
            if keep(&c) {
                out.push(c);
            }
        })?;
        Ok(out)
    };
    let mut classes: Vec<CoverClass> = if plan.candidates.is_empty() {
        run_root(None)?
    } else if options.parallel {
        plan.roots()
            .into_par_iter()
            .map(|r| run_root(Some(r)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect()
    } else {
        let mut all = Vec::new();
        for r in plan.roots() {
            all.extend(run_root(Some(r))?);
        }
        all
    };
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(classes)
}
