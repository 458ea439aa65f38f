//! Oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use wallcross::covers::CoverType;
use wallcross::groups::CharacterTable;
use wallcross::perm::Perm;
use wallcross::walls::WallTypeSpec;

/// Symmetric group with full multiplication table, elements by index.
pub struct SymTable {
    pub d: usize,
    pub elems: Vec<Perm>,
    pub mul: Vec<Vec<u8>>,
    pub inv: Vec<u8>,
    pub identity: u8,
}

impl SymTable {
    pub fn new(d: usize) -> Self {
        let elems = Perm::all(d);
        let index: HashMap<Perm, u8> = elems.iter().enumerate().map(|(i, p)| (*p, i as u8)).collect();
        let mul = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&a.compose(b)]).collect())
            .collect();
        let inv = elems.iter().map(|a| index[&a.inverse()]).collect();
        let identity = index[&Perm::identity(d)];
        SymTable {
            d,
            elems,
            mul,
            inv,
            identity,
        }
    }

    fn m(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize][b as usize]
    }

    fn commutator(&self, a: u8, b: u8) -> u8 {
        let ab = self.m(a, b);
        let abi = self.m(ab, self.inv[a as usize]);
        self.m(abi, self.inv[b as usize])
    }

    fn cycle_type(&self, a: u8) -> Vec<usize> {
        let p = &self.elems[a as usize];
        let mut seen = vec![false; self.d];
        let mut out = Vec::new();
        for i in 0..self.d {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p.apply(j);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    fn transitive(&self, slots: &[u8]) -> bool {
        let mut parent: Vec<usize> = (0..self.d).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &s in slots {
            let p = &self.elems[s as usize];
            for i in 0..self.d {
                let (a, b) = (find(&mut parent, i), find(&mut parent, p.apply(i)));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.d).all(|i| find(&mut parent, i) == root)
    }

    /// Number of `σ` with `σ x σ⁻¹ = x` for every slot.
    fn centralizer_size(&self, slots: &[u8]) -> usize {
        (0..self.elems.len() as u8)
            .filter(|&s| {
                slots
                    .iter()
                    .all(|&x| self.m(s, x) == self.m(x, s))
            })
            .count()
    }

    fn canonical(&self, slots: &[u8]) -> Vec<Perm> {
        let mut best: Option<Vec<Perm>> = None;
        for s in 0..self.elems.len() as u8 {
            let si = self.inv[s as usize];
            let conj: Vec<Perm> = slots
                .iter()
                .map(|&x| self.elems[self.m(self.m(s, x), si) as usize])
                .collect();
            if best.as_ref().map_or(true, |b| conj < *b) {
                best = Some(conj);
            }
        }
        best.unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    /// Transitive tuples solving the relation.
    pub tuples: u128,
    /// Conjugation classes, via `Σ |centralizer| / d!`.
    pub classes: u128,
    /// Canonical forms, when requested.
    pub reps: Option<BTreeSet<Vec<Perm>>>,
}

/// Scans every tuple of the type: all handle pairs, all class members for
/// the first `r − 1` branch slots, and the last branch slot forced by the
/// relation and tested for membership of its class.
pub fn brute_force(t: &CoverType, keep_reps: bool) -> BruteForce {
    let sym = SymTable::new(t.d);
    let n = sym.elems.len() as u8;
    let profile: Vec<Vec<usize>> = t.profile.entries().to_vec();
    let classes: Vec<Vec<u8>> = profile
        .iter()
        .map(|part| (0..n).filter(|&x| sym.cycle_type(x) == *part).collect())
        .collect();
    let mut out = BruteForce {
        tuples: 0,
        classes: 0,
        reps: keep_reps.then(BTreeSet::new),
    };
    let mut aut_sum: u128 = 0;
    let mut slots: Vec<u8> = Vec::with_capacity(2 * t.g + profile.len());
    fn rec(
        sym: &SymTable,
        t: &CoverType,
        profile: &[Vec<usize>],
        classes: &[Vec<u8>],
        slots: &mut Vec<u8>,
        acc: u8,
        out: &mut BruteForce,
        aut_sum: &mut u128,
    ) {
        let handles = 2 * t.g;
        let r = profile.len();
        let filled = slots.len();
        if filled < handles {
            for a in 0..sym.elems.len() as u8 {
                for b in 0..sym.elems.len() as u8 {
                    slots.push(a);
                    slots.push(b);
                    let next = sym.m(acc, sym.commutator(a, b));
                    rec(sym, t, profile, classes, slots, next, out, aut_sum);
                    slots.pop();
                    slots.pop();
                }
            }
            return;
        }
        let branch = filled - handles;
        if r == 0 || branch == r - 1 {
            let last = sym.inv[acc as usize];
            let ok = if r == 0 {
                acc == sym.identity
            } else {
                sym.cycle_type(last) == profile[r - 1]
            };
            if !ok {
                return;
            }
            if r > 0 {
                slots.push(last);
            }
            if sym.transitive(slots) {
                out.tuples += 1;
                *aut_sum += sym.centralizer_size(slots) as u128;
                if let Some(reps) = out.reps.as_mut() {
                    reps.insert(sym.canonical(slots));
                }
            }
            if r > 0 {
                slots.pop();
            }
            return;
        }
        for &c in &classes[branch] {
            slots.push(c);
            rec(sym, t, profile, classes, slots, sym.m(acc, c), out, aut_sum);
            slots.pop();
        }
    }
    rec(&sym, t, &profile, &classes, &mut slots, sym.identity, &mut out, &mut aut_sum);
    let order: u128 = sym.elems.len() as u128;
    assert_eq!(aut_sum % order, 0, "orbit count is not an integer");
    out.classes = aut_sum / order;
    out
}

/// Orbit partition of `{0..d}` under the slots, as the smallest point of
/// each point's orbit.
fn orbit_labels(sym: &SymTable, slots: &[u8]) -> Vec<u8> {
    let mut label: Vec<u8> = (0..sym.d as u8).collect();
    loop {
        let mut changed = false;
        for &s in slots {
            let p = &sym.elems[s as usize];
            for i in 0..sym.d {
                let j = p.apply(i);
                let m = label[i].min(label[j]);
                if label[i] != m || label[j] != m {
                    label[i] = m;
                    label[j] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

fn join_labels(a: &[u8], b: &[u8]) -> bool {
    let d = a.len();
    let mut label: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for part in [a, b] {
        for (i, &l) in part.iter().enumerate() {
            let (x, y) = (find(&mut label, i), find(&mut label, l as usize));
            label[x] = y;
        }
    }
    let root = find(&mut label, 0);
    (0..d).all(|i| find(&mut label, i) == root)
}

type HalfKey = (u8, u128, Vec<u8>);

/// Aggregates every tuple of one half by product, centralizer bitmask and
/// orbit partition.
fn half_table(sym: &SymTable, tuples: &mut dyn FnMut(&mut dyn FnMut(&[u8], u8))) -> HashMap<HalfKey, u128> {
    let n = sym.elems.len();
    let cmask: Vec<u128> = (0..n as u8)
        .map(|x| {
            (0..n as u8)
                .filter(|&s| sym.m(s, x) == sym.m(x, s))
                .fold(0u128, |m, s| m | (1u128 << s))
        })
        .collect();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut out: HashMap<HalfKey, u128> = HashMap::new();
    tuples(&mut |slots, prod| {
        let mask = slots.iter().fold(all, |m, &x| m & cmask[x as usize]);
        *out.entry((prod, mask, orbit_labels(sym, slots))).or_insert(0) += 1;
    });
    out
}

/// Tuple and class counts by splitting each tuple into its handle part and
/// its branch part. Both halves are scanned exhaustively; only the join
/// is aggregated, so this is exact for any type with `d! ≤ 128`.
pub fn split_count(t: &CoverType) -> BruteForce {
    let sym = SymTable::new(t.d);
    assert!(sym.elems.len() <= 128, "bitmask holds at most 128 elements");
    let n = sym.elems.len() as u8;
    let profile: Vec<Vec<usize>> = t.profile.entries().to_vec();
    let classes: Vec<Vec<u8>> = profile
        .iter()
        .map(|part| (0..n).filter(|&x| sym.cycle_type(x) == *part).collect())
        .collect();
    let handles = half_table(&sym, &mut |emit| {
        fn rec(sym: &SymTable, g: usize, slots: &mut Vec<u8>, acc: u8, emit: &mut dyn FnMut(&[u8], u8)) {
            if slots.len() == 2 * g {
                emit(slots, acc);
                return;
            }
            for a in 0..sym.elems.len() as u8 {
                for b in 0..sym.elems.len() as u8 {
                    slots.push(a);
                    slots.push(b);
                    rec(sym, g, slots, sym.m(acc, sym.commutator(a, b)), emit);
                    slots.pop();
                    slots.pop();
                }
            }
        }
        rec(&sym, t.g, &mut Vec::new(), sym.identity, emit);
    });
    let branch = half_table(&sym, &mut |emit| {
        fn rec(sym: &SymTable, classes: &[Vec<u8>], slots: &mut Vec<u8>, acc: u8, emit: &mut dyn FnMut(&[u8], u8)) {
            let k = slots.len();
            if k == classes.len() {
                emit(slots, acc);
                return;
            }
            for &c in &classes[k] {
                slots.push(c);
                rec(sym, classes, slots, sym.m(acc, c), emit);
                slots.pop();
            }
        }
        rec(&sym, &classes, &mut Vec::new(), sym.identity, emit);
    });
    let mut by_product: HashMap<u8, Vec<(&HalfKey, u128)>> = HashMap::new();
    for (k, &c) in &branch {
        by_product.entry(k.0).or_default().push((k, c));
    }
    let (mut tuples, mut aut_sum) = (0u128, 0u128);
    for ((prod, mask, part), &ca) in &handles {
        let Some(list) = by_product.get(&sym.inv[*prod as usize]) else {
            continue;
        };
        for ((_, mb, pb), cb) in list {
            if join_labels(part, pb) {
                tuples += ca * cb;
                aut_sum += ca * cb * (mask & mb).count_ones() as u128;
            }
        }
    }
    let order = sym.elems.len() as u128;
    assert_eq!(aut_sum % order, 0, "orbit count is not an integer");
    BruteForce {
        tuples,
        classes: aut_sum / order,
        reps: None,
    }
}

/// Canonical form of a tuple by brute force over `S_d`.
pub fn canonical_slots(d: usize, slots: &[Perm]) -> Vec<Perm> {
    let sym = SymTable::new(d);
    let index: HashMap<Perm, u8> = sym.elems.iter().enumerate().map(|(i, p)| (*p, i as u8)).collect();
    let idx: Vec<u8> = slots.iter().map(|p| index[p]).collect();
    sym.canonical(&idx)
}

/// Genus of the covering surface from cycle counts:
/// `2 − 2h = d(2 − 2g − r) + Σ_i #cycles(c_i)`.
pub fn cover_genus(d: usize, g: usize, branch: &[Perm]) -> i64 {
    let cycles: i64 = branch.iter().map(|c| c.cycle_type().len() as i64).sum();
    let chi = d as i64 * (2 - 2 * g as i64 - branch.len() as i64) + cycles;
    (2 - chi) / 2
}

/// Non-trivial partitions of `d` (largest part at least 2), sorted.
pub fn branched_partitions(d: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out.retain(|p| p[0] >= 2);
    out
}

/// Every cover type with `d ≤ d_max`, `r ≤ r_max`, `g ≤ g_max`, with branch
/// points listed as a multiset (non-decreasing partition index) and an
/// integral, non-negative cover genus.
pub fn cover_types(d_max: usize, r_max: usize, g_max: usize) -> Vec<CoverType> {
    let mut out = Vec::new();
    for g in 0..=g_max {
        for d in 1..=d_max {
            let parts = branched_partitions(d);
            for r in 0..=r_max {
                let mut idx = vec![0usize; r];
                loop {
                    if parts.is_empty() && r > 0 {
                        break;
                    }
                    let profile: Vec<Vec<usize>> = idx.iter().map(|&i| parts[i].clone()).collect();
                    if let Ok(t) = CoverType::new(g, d, profile) {
                        if t.derive_invariants().is_ok() {
                            out.push(t);
                        }
                    }
                    // next non-decreasing index vector
                    let mut k = r;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        if idx[k] + 1 < parts.len() {
                            idx[k] += 1;
                            for j in k + 1..r {
                                idx[j] = idx[k];
                            }
                            k = usize::MAX;
                            break;
                        }
                    }
                    if k != usize::MAX {
                        break;
                    }
                }
            }
        }
    }
    out
}

fn wall(json: &str) -> WallTypeSpec {
    serde_json::from_str(json).expect("valid wall type")
}

/// The four families of elementary wall types at their smallest sizes.
pub fn example_walls() -> Vec<(&'static str, WallTypeSpec)> {
    vec![
        (
            "degree 2 double cover of a torus",
            wall(
                r#"{"g":1,"d":2,"profile":[],"group":{"generators":[[2,1]]},
                    "stabilizer":{"generators":[]},"k":{"irrep":1},"c":{"irrep":1},"A":"A"}"#,
            ),
        ),
        (
            "symmetric degree 3 cover of the sphere",
            wall(
                r#"{"g":0,"d":3,"profile":[[2,1],[2,1],[2,1],[2,1]],
                    "group":{"generators":[[2,1,3],[1,3,2]]},
                    "stabilizer":{"generators":[[1,3,2]]},"k":{"irrep":2},
                    "c":{"irrep":2,"multiplicity":9},"A":"A"}"#,
            ),
        ),
        (
            "dihedral degree 3 cover of a genus 2 curve",
            wall(
                r#"{"g":2,"d":3,"profile":[],
                    "group":{"generators":[[2,1,3],[1,3,2]]},
                    "stabilizer":{"generators":[[2,1,3]]},"k":{"irrep":2},
                    "c":{"irrep":2},"A":"A"}"#,
            ),
        ),
        (
            "order 8 cover of a torus with two branch points",
            wall(
                r#"{"g":1,"d":4,"profile":[[2,1,1],[2,1,1]],
                    "group":{"generators":[[2,1,4,3],[3,2,1,4]]},
                    "stabilizer":{"generators":[[3,2,1,4]]},"k":{"irrep":4},
                    "c":{"irrep":4,"multiplicity":5},"A":"A"}"#,
            ),
        ),
    ]
}

/// Exact row and column orthogonality of the complex character table.
pub fn check_orthogonality(table: &CharacterTable) -> Result<(), String> {
    let g = table.group();
    let field = table.field();
    let irreps = table.irreps();
    let order = g.order() as i64;
    for (a, ia) in irreps.iter().enumerate() {
        for (b, ib) in irreps.iter().enumerate() {
            let mut acc = field.zero();
            for (k, class) in g.classes().iter().enumerate() {
                acc = acc.add(&ia.values[k].mul(&ib.values[k].conj()).scale(class.size as i64));
            }
            let want = if a == b { order } else { 0 };
            check(acc.as_integer() == Some(want), || format!("rows {a},{b}: {acc:?}"))?;
        }
    }
    for (k, ck) in g.classes().iter().enumerate() {
        for l in 0..g.class_count() {
            let mut acc = field.zero();
            for ir in irreps {
                acc = acc.add(&ir.values[k].mul(&ir.values[l].conj()));
            }
            let want = if k == l { order / ck.size as i64 } else { 0 };
            check(acc.as_integer() == Some(want), || format!("columns {k},{l}"))?;
        }
    }
    Ok(())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
