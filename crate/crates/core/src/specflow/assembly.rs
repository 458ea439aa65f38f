//! Truncated Fourier matrices, their block structure, and the pulled-back
//! operator on a covering torus.
//!
//! Frequencies are stored in doubled integer coordinates `J = 2j`, so a sheet
//! with shift `s ∈ {0,1}²` uses `J ≡ s (mod 2)` and the box `|J_i| ≤ 2N + s_i`.
//! Real unknowns are ordered `4·mode + 2·component + {0: Re, 1: Im}`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Mat2, OperatorSpec, SpecflowError};

/// Frequency set `Z² + shift/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sheet {
    pub shift: [u8; 2],
}

impl Sheet {
    pub const BASE: Sheet = Sheet { shift: [0, 0] };

    /// The three nonzero characters of `H_1(T²; Z/2)`.
    pub const COVERS: [[u8; 2]; 3] = [[1, 0], [0, 1], [1, 1]];

    /// Anti-invariant frequencies of the double cover with character `eps`.
    pub fn anti_invariant(eps: [u8; 2]) -> Result<Sheet, SpecflowError> {
        if eps == [0, 0] || eps.iter().any(|&e| e > 1) {
            return Err(SpecflowError::Invalid(format!(
                "{eps:?} is not a nonzero character mod 2"
            )));
        }
        Ok(Sheet { shift: eps })
    }

    fn bound(&self, n: usize, i: usize) -> i32 {
        2 * n as i32 + self.shift[i] as i32
    }

    /// Doubled frequencies in the truncation box, lexicographically ordered.
    pub fn frequencies(&self, n: usize) -> Vec<[i32; 2]> {
        let mut out = Vec::new();
        let (b0, b1) = (self.bound(n, 0), self.bound(n, 1));
        let mut x = -b0;
        while x <= b0 {
            let mut y = -b1;
            while y <= b1 {
                out.push([x, y]);
                y += 2;
            }
            x += 2;
        }
        out
    }
}

/// `∂̄` eigenvalue `πi(ξ₁ + iξ₂)` at the doubled frequency `2ξ`.
fn lambda(doubled: [i32; 2]) -> Complex64 {
    let pi = std::f64::consts::PI;
    Complex64::new(-pi * doubled[1] as f64 / 2.0, pi * doubled[0] as f64 / 2.0)
}

/// Adds the real 2×2 block of `z·s` (complex-linear) or `z·conj(s)`.
fn push_entry(
    rows: &mut [Vec<(usize, f64)>],
    row: usize,
    col: usize,
    z: Complex64,
    anti: bool,
) {
    if z.re == 0.0 && z.im == 0.0 {
        return;
    }
    let (r, c) = (row, col);
    if anti {
        rows[r].push((c, z.re));
        rows[r].push((c + 1, z.im));
        rows[r + 1].push((c, z.im));
        rows[r + 1].push((c + 1, -z.re));
    } else {
        rows[r].push((c, z.re));
        rows[r].push((c + 1, -z.im));
        rows[r + 1].push((c, z.im));
        rows[r + 1].push((c + 1, z.re));
    }
}

fn push_mat(rows: &mut [Vec<(usize, f64)>], row_mode: usize, col_mode: usize, m: &Mat2, anti: bool) {
    for p in 0..2 {
        for q in 0..2 {
            push_entry(rows, 4 * row_mode + 2 * p, 4 * col_mode + 2 * q, m[p][q], anti);
        }
    }
}

/// Sparse real matrix of an operator on one sheet.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub sheet: Sheet,
    pub n: usize,
    pub modes: Vec<[i32; 2]>,
    index: HashMap<[i32; 2], usize>,
    /// Row-major sparse entries, one list per real row.
    rows: Vec<Vec<(usize, f64)>>,
}

impl Assembled {
    pub fn new(spec: &OperatorSpec, sheet: Sheet, n: usize) -> Self {
        let modes = sheet.frequencies(n);
        let index: HashMap<[i32; 2], usize> =
            modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut rows = vec![Vec::new(); 4 * modes.len()];
        for (i, &j) in modes.iter().enumerate() {
            let l = lambda(j);
            for p in 0..2 {
                push_entry(&mut rows, 4 * i + 2 * p, 4 * i + 2 * p, l, false);
            }
            for (m, coeffs) in spec.modes() {
                let m2 = [2 * m[0], 2 * m[1]];
                if let Some(&k) = index.get(&[j[0] - m2[0], j[1] - m2[1]]) {
                    push_mat(&mut rows, i, k, &coeffs.b, false);
                }
                if let Some(&k) = index.get(&[m2[0] - j[0], m2[1] - j[1]]) {
                    push_mat(&mut rows, i, k, &coeffs.c, true);
                }
            }
        }
        Assembled {
            sheet,
            n,
            modes,
            index,
            rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mode_index(&self, doubled: [i32; 2]) -> Option<usize> {
        self.index.get(&doubled).copied()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Pairs of modes coupled by a nonzero entry.
    fn mode_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, _)| (r / 4, c / 4)))
    }

    /// Dense submatrix on the given modes (rows and columns).
    pub fn block(&self, modes: &[usize]) -> DMatrix<f64> {
        let mut local = HashMap::with_capacity(modes.len());
        for (i, &m) in modes.iter().enumerate() {
            local.insert(m, i);
        }
        let n = 4 * modes.len();
        let mut out = DMatrix::zeros(n, n);
        for (i, &m) in modes.iter().enumerate() {
            for r in 0..4 {
                for &(c, v) in &self.rows[4 * m + r] {
                    let Some(&lc) = local.get(&(c / 4)) else {
                        continue;
                    };
                    out[(4 * i + r, 4 * lc + c % 4)] += v;
                }
            }
        }
        out
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Common block decomposition of several operators on the same sheet:
/// connected components of the union of their mode couplings.
pub(crate) fn common_blocks(ops: &[Assembled]) -> Vec<Vec<usize>> {
    let n = ops[0].modes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for op in ops {
        for (a, b) in op.mode_links() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn check_truncation(spec: &OperatorSpec, n: usize) -> Result<(), SpecflowError> {
    let radius = spec.radius();
    if n < 2 * radius {
        return Err(SpecflowError::TruncationTooSmall { n, radius });
    }
    Ok(())
}

/// Singular values of every block, collected.
pub(crate) fn block_singular_values(op: &Assembled) -> Vec<f64> {
    let mut out = Vec::with_capacity(op.dim());
    for block in common_blocks(std::slice::from_ref(op)) {
        let m = op.block(&block);
        out.extend(m.singular_values().iter().copied());
    }
    out
}

fn count_small(values: &[f64], tol: f64) -> usize {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().filter(|&&s| s <= tol * max).count()
}

/// The real matrix of `D` on trigonometric polynomials of bidegree `≤ N`
/// (or the shifted box on an anti-invariant sheet), followed by projection.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub n: usize,
    pub sheet: Sheet,
    pub matrix: DMatrix<f64>,
}

impl DiscreteOperator {
    pub fn assemble(spec: &OperatorSpec, n: usize) -> Result<Self, SpecflowError> {
        Self::assemble_on(spec, Sheet::BASE, n)
    }

    pub fn assemble_on(spec: &OperatorSpec, sheet: Sheet, n: usize) -> Result<Self, SpecflowError> {
        check_truncation(spec, n)?;
        Ok(DiscreteOperator {
            n,
            sheet,
            matrix: Assembled::new(spec, sheet, n).to_dense(),
        })
    }

    /// Fiberwise multiplication by `i` on the real unknowns.
    pub fn complex_structure(dim: usize) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(dim, dim);
        for k in (0..dim).step_by(2) {
            j[(k + 1, k)] = 1.0;
            j[(k, k + 1)] = -1.0;
        }
        j
    }
}

/// Real dimension of the numerical kernel on the base torus.
pub fn kernel_dim(spec: &OperatorSpec, n: usize, tol: f64) -> Result<usize, SpecflowError> {
    kernel_dim_on(spec, Sheet::BASE, n, tol)
}

pub fn kernel_dim_on(
    spec: &OperatorSpec,
    sheet: Sheet,
    n: usize,
    tol: f64,
) -> Result<usize, SpecflowError> {
    check_truncation(spec, n)?;
    let op = Assembled::new(spec, sheet, n);
    Ok(count_small(&block_singular_values(&op), tol))
}

/// Operator restricted to one sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetOperator {
    pub spec: OperatorSpec,
    pub sheet: Sheet,
}

impl SheetOperator {
    pub fn kernel_dim(&self, n: usize, tol: f64) -> Result<usize, SpecflowError> {
        kernel_dim_on(&self.spec, self.sheet, n, tol)
    }

    pub fn discrete(&self, n: usize) -> Result<DiscreteOperator, SpecflowError> {
        DiscreteOperator::assemble_on(&self.spec, self.sheet, n)
    }
}

/// `(op⁺, op⁻)`: the invariant part is the base operator itself, the
/// anti-invariant part the same coefficients on `Z² + ε/2`.
pub fn split_double_cover(
    spec: &OperatorSpec,
    eps: [u8; 2],
) -> Result<(SheetOperator, SheetOperator), SpecflowError> {
    let minus = Sheet::anti_invariant(eps)?;
    Ok((
        SheetOperator {
            spec: spec.clone(),
            sheet: Sheet::BASE,
        },
        SheetOperator {
            spec: spec.clone(),
            sheet: minus,
        },
    ))
}

/// Lattice `Λ = ker ε` of the covering torus, basis vectors as columns.
fn cover_lattice(eps: [u8; 2]) -> [[i32; 2]; 2] {
    match eps {
        [1, 0] => [[2, 0], [0, 1]],
        [0, 1] => [[1, 0], [0, 2]],
        _ => [[2, 1], [0, 1]],
    }
}

/// The pulled-back operator assembled directly on the covering torus
/// `R²/Λ`, in lattice coordinates: frequencies `n ∈ Z²` with physical
/// frequency `ξ = Λ^{−T} n`, truncated to `|ξ_i| ≤ N + 1/2`.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub eps: [u8; 2],
    pub n: usize,
    pub lattice_modes: Vec<[i32; 2]>,
    pub matrix: DMatrix<f64>,
}

impl Pullback {
    pub fn assemble(spec: &OperatorSpec, eps: [u8; 2], n: usize) -> Result<Self, SpecflowError> {
        Sheet::anti_invariant(eps)?;
        check_truncation(spec, n)?;
        let l = cover_lattice(eps);
        // ξ = Λ^{−T} n, so 2ξ = adj(Λ^T) n since det Λ = 2.
        let lt = [[l[0][0], l[1][0]], [l[0][1], l[1][1]]];
        let adj = [[lt[1][1], -lt[0][1]], [-lt[1][0], lt[0][0]]];
        let doubled = |v: [i32; 2]| {
            [
                adj[0][0] * v[0] + adj[0][1] * v[1],
                adj[1][0] * v[0] + adj[1][1] * v[1],
            ]
        };
        let bound = 2 * n as i32 + 1;
        let reach = 2 * bound + 2;
        let mut modes = Vec::new();
        for a in -reach..=reach {
            for b in -reach..=reach {
                let x = doubled([a, b]);
                if x[0].abs() <= bound && x[1].abs() <= bound {
                    modes.push([a, b]);
                }
            }
        }
        let index: HashMap<[i32; 2], usize> =
            modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut rows = vec![Vec::new(); 4 * modes.len()];
        for (i, &v) in modes.iter().enumerate() {
            let l0 = lambda(doubled(v));
            for p in 0..2 {
                push_entry(&mut rows, 4 * i + 2 * p, 4 * i + 2 * p, l0, false);
            }
            for (m, coeffs) in spec.modes() {
                // e_m pulls back to the lattice frequency Λ^T m
                let nm = [lt[0][0] * m[0] + lt[0][1] * m[1], lt[1][0] * m[0] + lt[1][1] * m[1]];
                if let Some(&k) = index.get(&[v[0] - nm[0], v[1] - nm[1]]) {
                    push_mat(&mut rows, i, k, &coeffs.b, false);
                }
                if let Some(&k) = index.get(&[nm[0] - v[0], nm[1] - v[1]]) {
                    push_mat(&mut rows, i, k, &coeffs.c, true);
                }
            }
        }
        let dim = rows.len();
        let mut matrix = DMatrix::zeros(dim, dim);
        for (r, row) in rows.iter().enumerate() {
            for &(c, x) in row {
                matrix[(r, c)] += x;
            }
        }
        Ok(Pullback {
            eps,
            n,
            lattice_modes: modes,
            matrix,
        })
    }

    pub fn kernel_dim(&self, tol: f64) -> usize {
        count_small(self.matrix.singular_values().as_slice(), tol)
    }

    fn to_vector(&self, s: &CoverSection) -> Result<DVector<f64>, SpecflowError> {
        let index: HashMap<[i32; 2], usize> = self
            .lattice_modes
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i))
            .collect();
        let mut v = DVector::zeros(self.matrix.ncols());
        for (m, c) in &s.coeffs {
            let Some(&i) = index.get(m) else {
                return Err(SpecflowError::Invalid(format!(
                    "section mode {m:?} lies outside the truncation window"
                )));
            };
            for p in 0..2 {
                v[4 * i + 2 * p] = c[p].re;
                v[4 * i + 2 * p + 1] = c[p].im;
            }
        }
        Ok(v)
    }

    fn from_vector(&self, v: &DVector<f64>) -> CoverSection {
        let mut coeffs = BTreeMap::new();
        for (i, m) in self.lattice_modes.iter().enumerate() {
            let c = [
                Complex64::new(v[4 * i], v[4 * i + 1]),
                Complex64::new(v[4 * i + 2], v[4 * i + 3]),
            ];
            if c.iter().any(|z| z.norm() > 1e-14) {
                coeffs.insert(*m, c);
            }
        }
        CoverSection { coeffs }
    }
}

/// A section over a covering torus as Fourier data in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoverSection {
    pub coeffs: BTreeMap<[i32; 2], [Complex64; 2]>,
}

impl CoverSection {
    pub fn norm(&self) -> f64 {
        self.coeffs
            .values()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionEntry {
    n: [i32; 2],
    s: [[f64; 2]; 2],
}

impl Serialize for CoverSection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs
            .iter()
            .map(|(n, c)| SectionEntry {
                n: *n,
                s: [[c[0].re, c[0].im], [c[1].re, c[1].im]],
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoverSection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<SectionEntry>::deserialize(d)?;
        let mut coeffs = BTreeMap::new();
        for e in entries {
            coeffs.insert(
                e.n,
                [
                    Complex64::new(e.s[0][0], e.s[0][1]),
                    Complex64::new(e.s[1][0], e.s[1][1]),
                ],
            );
        }
        Ok(CoverSection { coeffs })
    }
}

pub fn kernel_dim_pullback(
    spec: &OperatorSpec,
    eps: [u8; 2],
    n: usize,
    tol: f64,
) -> Result<usize, SpecflowError> {
    Ok(Pullback::assemble(spec, eps, n)?.kernel_dim(tol))
}

/// Orthonormal basis of the numerical kernel of the pulled-back operator.
pub fn pullback_kernel(
    spec: &OperatorSpec,
    eps: [u8; 2],
    n: usize,
    tol: f64,
) -> Result<Vec<CoverSection>, SpecflowError> {
    let pb = Pullback::assemble(spec, eps, n)?;
    let svd = pb.matrix.clone().svd(false, true);
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let vt = svd.v_t.expect("requested V");
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * max)
        .map(|(i, _)| pb.from_vector(&vt.row(i).transpose()))
        .collect())
}

/// `‖P_N D̂ σ‖`: residual of the pulled-back equation on the covering torus.
pub fn multisection_residual(
    spec: &OperatorSpec,
    eps: [u8; 2],
    n: usize,
    section: &CoverSection,
) -> Result<f64, SpecflowError> {
    let pb = Pullback::assemble(spec, eps, n)?;
    let v = pb.to_vector(section)?;
    Ok((&pb.matrix * v).norm())
}

#[cfg(test)]
mod tests {
    use super::super::{mat2, scalar, reference_shift};
    use super::*;

    fn aeps(a: f64) -> OperatorSpec {
        OperatorSpec::dbar().with_c([0, 0], mat2([[0.0, a], [-a, 0.0]]))
    }

    #[test]
    fn dbar_kernel_is_constants() {
        assert_eq!(kernel_dim(&OperatorSpec::dbar(), 4, 1e-8).unwrap(), 4);
        for eps in Sheet::COVERS {
            let (_, minus) = split_double_cover(&OperatorSpec::dbar(), eps).unwrap();
            assert_eq!(minus.kernel_dim(4, 1e-8).unwrap(), 0);
        }
    }

    #[test]
    fn constant_family_closed_form() {
        let pi = std::f64::consts::PI;
        assert_eq!(kernel_dim(&aeps(0.5), 8, 1e-8).unwrap(), 0);
        assert_eq!(kernel_dim(&aeps(pi), 8, 1e-8).unwrap(), 8);
        assert_eq!(kernel_dim(&aeps(pi * 2f64.sqrt()), 8, 1e-8).unwrap(), 8);
        assert_eq!(kernel_dim(&aeps(2.0 * pi), 8, 1e-8).unwrap(), 8);
        let (_, minus) = split_double_cover(&aeps(pi / 2.0), [1, 0]).unwrap();
        assert_eq!(minus.kernel_dim(8, 1e-8).unwrap(), 4);
        let (_, minus) = split_double_cover(&aeps(pi / 2f64.sqrt()), [1, 1]).unwrap();
        assert_eq!(minus.kernel_dim(8, 1e-8).unwrap(), 8);
    }

    #[test]
    fn assembly_is_deterministic_and_complex_linear_commutes() {
        let spec = OperatorSpec::reference()
            .with_b([1, -1], mat2([[0.3, -0.2], [0.1, 0.5]]))
            .with_b([0, 1], scalar(Complex64::new(0.2, -0.7)));
        let a = DiscreteOperator::assemble(&spec, 3).unwrap();
        let b = DiscreteOperator::assemble(&spec, 3).unwrap();
        assert_eq!(a, b);
        let j = DiscreteOperator::complex_structure(a.matrix.nrows());
        assert!((&a.matrix * &j - &j * &a.matrix).norm() < 1e-12);
        let anti = spec.with_c([0, 0], mat2([[1.0, 0.0], [0.0, 0.0]]));
        let m = DiscreteOperator::assemble(&anti, 3).unwrap().matrix;
        assert!((&m * &j - &j * &m).norm() > 1e-3);
    }

    #[test]
    fn truncation_guard() {
        let spec = OperatorSpec::dbar().with_b([2, 0], scalar(reference_shift()));
        assert_eq!(
            kernel_dim(&spec, 3, 1e-8).unwrap_err(),
            SpecflowError::TruncationTooSmall { n: 3, radius: 2 }
        );
    }

    #[test]
    fn pullback_splits_exactly() {
        let pi = std::f64::consts::PI;
        for eps in Sheet::COVERS {
            for a in [0.7, pi / 2.0, pi, pi / 2f64.sqrt()] {
                let spec = aeps(a);
                let (plus, minus) = split_double_cover(&spec, eps).unwrap();
                let total = kernel_dim_pullback(&spec, eps, 4, 1e-8).unwrap();
                assert_eq!(
                    total,
                    plus.kernel_dim(4, 1e-8).unwrap() + minus.kernel_dim(4, 1e-8).unwrap(),
                    "eps {eps:?}, a {a}"
                );
            }
        }
    }

    #[test]
    fn kernel_sections_have_small_residual() {
        let pi = std::f64::consts::PI;
        let spec = aeps(pi / 2.0);
        let kernel = pullback_kernel(&spec, [1, 0], 4, 1e-8).unwrap();
        assert_eq!(kernel.len(), 4);
        for s in &kernel {
            let r = multisection_residual(&spec, [1, 0], 4, s).unwrap();
            assert!(r < 1e-8 * s.norm());
        }
        assert_eq!(
            multisection_residual(&spec, [1, 0], 4, &CoverSection::default()).unwrap(),
            0.0
        );
    }
}
