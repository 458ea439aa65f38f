//! Kernel crossings along piecewise-linear operator paths.
//!
//! Each block of the common block decomposition is tracked separately. On a
//! sample interval `[a, b]` of width `h` the smallest singular value is
//! `‖Ṁ‖`-Lipschitz, so `σ(a) + σ(b) > ‖Ṁ‖_F h` certifies that the block stays
//! invertible there. Intervals that cannot be certified are halved down to a
//! minimum width and then searched for a minimum by golden sections.
//!
//! At a crossing with kernel `S` and cokernel `T` (orthonormal, dimension
//! `k`), `det M(t* + δ) ≈ δ^k det(TᵀṀS) det(M + TSᵀ)`. This gives the sign
//! of the determinant on either side. The signed contribution of the
//! crossing is half the jump of `sgn det` across it, so contributions
//! telescope along any path.

use nalgebra::DMatrix;
use serde::Serialize;

use super::assembly::{common_blocks, kernel_dim_on, Assembled, Sheet};
use super::{OperatorPath, OperatorSpec, SpecflowError, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Truncation order; by default the largest default over the path.
    pub truncation: Option<usize>,
    /// Relative singular-value threshold for kernel membership.
    pub tol: f64,
    /// Final bracket width of the golden-section refinement, in path time.
    pub width: f64,
    /// Smallest admissible `σ_min(TᵀṀS)` at a crossing.
    pub min_derivative: f64,
    /// Intervals narrower than this are searched instead of halved.
    pub min_interval: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions {
            truncation: None,
            tol: DEFAULT_TOL,
            width: 1e-10,
            min_derivative: 1e-6,
            min_interval: 1e-4,
        }
    }
}

/// One crossing event (simultaneous crossings in different blocks merged).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub sheet: Sheet,
    pub kernel_dim: usize,
    /// `sgn det` of the discrete operator just before and after `t`.
    pub before: i32,
    pub after: i32,
    /// `(after − before) / 2`.
    pub contribution: i32,
    /// Smallest singular value of `TᵀṀS` over the crossing blocks.
    pub derivative: f64,
}

fn min_sv(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_sv(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

fn det_sign(m: &DMatrix<f64>) -> i32 {
    if m.nrows() == 0 {
        return 1;
    }
    let lu = m.clone().lu();
    let mut s: f64 = lu.p().determinant();
    for x in lu.u().diagonal().iter() {
        if *x == 0.0 {
            return 0;
        }
        s *= x.signum();
    }
    s.signum() as i32
}

/// Block matrices along one segment: `M(τ) = M0 + τ·dm`.
struct Pencil<'a> {
    m0: &'a DMatrix<f64>,
    dm: DMatrix<f64>,
}

impl Pencil<'_> {
    fn at(&self, tau: f64) -> DMatrix<f64> {
        self.m0 + &self.dm * tau
    }

    fn sigma(&self, tau: f64) -> f64 {
        min_sv(&self.at(tau))
    }
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates
        .into_iter()
        .fold((a, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

/// Local kernel data of one block at a crossing.
struct BlockCrossing {
    t: f64,
    block: usize,
    k: usize,
    /// Segment on each side, for the one-sided derivatives.
    before: Option<i32>,
    after: Option<i32>,
    derivative: f64,
}

/// Sign of `det M(τ* ± δ)` for small `δ > 0`, from kernel data at `τ*`.
fn side_signs(m: &DMatrix<f64>, dm: &DMatrix<f64>, threshold: f64) -> (usize, i32, f64) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V");
    let idx: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(i, _)| i)
        .collect();
    let k = idx.len();
    let n = m.nrows();
    let mut s = DMatrix::zeros(n, k);
    let mut t = DMatrix::zeros(n, k);
    for (c, &i) in idx.iter().enumerate() {
        s.set_column(c, &vt.row(i).transpose());
        t.set_column(c, &u.column(i));
    }
    let x = t.transpose() * dm * &s;
    let derivative = if k == 0 { f64::INFINITY } else { min_sv(&x) };
    let completed = m + &t * s.transpose();
    let plus = det_sign(&x) * det_sign(&completed);
    (k, plus, derivative)
}

fn truncation_for(path: &OperatorPath, opts: &CrossingOptions) -> usize {
    opts.truncation
        .unwrap_or_else(|| path.knots.iter().map(|k| k.default_truncation()).max().unwrap_or(8))
}

/// All kernel crossings of the path restricted to `sheet`, in path order.
/// The endpoints must be invertible on the sheet.
pub fn detect_crossings(
    path: &OperatorPath,
    sheet: Sheet,
    opts: &CrossingOptions,
) -> Result<Vec<Crossing>, SpecflowError> {
    path.validate()?;
    let n = truncation_for(path, opts);
    for end in [path.start(), path.end()] {
        let k = kernel_dim_on(end, sheet, n, opts.tol)?;
        if k > 0 {
            return Err(SpecflowError::KernelAtEndpoint(k));
        }
    }
    let knots: Vec<Assembled> = path
        .knots
        .iter()
        .map(|k| Assembled::new(k, sheet, n))
        .collect();
    let blocks = common_blocks(&knots);
    let mats: Vec<Vec<DMatrix<f64>>> = blocks
        .iter()
        .map(|b| knots.iter().map(|k| k.block(b)).collect())
        .collect();
    let scale = mats
        .iter()
        .flatten()
        .map(max_sv)
        .fold(0.0, f64::max);
    let threshold = opts.tol * scale;
    let nseg = path.segments();
    let mut found: Vec<BlockCrossing> = Vec::new();
    for (bi, per_knot) in mats.iter().enumerate() {
        for seg in 0..nseg {
            let pencil = Pencil {
                m0: &per_knot[seg],
                dm: &per_knot[seg + 1] - &per_knot[seg],
            };
            // σ_min is Lipschitz in τ with constant ‖dm‖₂
            let lip = max_sv(&pencil.dm);
            if lip == 0.0 {
                if pencil.sigma(0.0) <= threshold {
                    return Err(SpecflowError::NonTransverseCrossing {
                        t: seg as f64 / nseg as f64,
                        derivative: 0.0,
                    });
                }
                continue;
            }
            let mut stack = vec![(0.0, 1.0, pencil.sigma(0.0), pencil.sigma(1.0))];
            let mut taus: Vec<f64> = Vec::new();
            while let Some((a, b, sa, sb)) = stack.pop() {
                // guaranteed min σ on [a, b] is (sa + sb − lip·(b − a))/2; the
                // bound is attained by a transverse zero, so keep a margin
                if sa + sb > lip * (b - a) * (1.0 + 1e-6) + 2.0 * threshold {
                    continue;
                }
                if b - a > opts.min_interval {
                    let m = 0.5 * (a + b);
                    let sm = pencil.sigma(m);
                    stack.push((a, m, sa, sm));
                    stack.push((m, b, sm, sb));
                    continue;
                }
                let f = |x: f64| pencil.sigma(x);
                let (tau, s) = golden_min(&f, a, b, opts.width * nseg as f64);
                if s <= threshold && !taus.iter().any(|&x| (x - tau).abs() < 1e3 * opts.width) {
                    taus.push(tau);
                }
            }
            for tau in taus {
                let m = pencil.at(tau);
                let (k, plus, derivative) = side_signs(&m, &pencil.dm, threshold);
                if k == 0 {
                    continue;
                }
                if derivative < opts.min_derivative {
                    return Err(SpecflowError::NonTransverseCrossing {
                        t: (seg as f64 + tau) / nseg as f64,
                        derivative,
                    });
                }
                let minus = if k % 2 == 0 { plus } else { -plus };
                found.push(BlockCrossing {
                    t: (seg as f64 + tau) / nseg as f64,
                    block: bi,
                    k,
                    before: Some(minus),
                    after: Some(plus),
                    derivative,
                });
            }
        }
    }
    // A crossing on a knot is seen from both adjacent segments; keep the
    // incoming side of the earlier and the outgoing side of the later.
    found.sort_by(|x, y| x.block.cmp(&y.block).then(x.t.total_cmp(&y.t)));
    let merge_width = 1e3 * opts.width;
    let mut merged: Vec<BlockCrossing> = Vec::new();
    for c in found {
        if let Some(last) = merged.last_mut() {
            if last.block == c.block && (c.t - last.t).abs() < merge_width {
                last.after = c.after;
                last.k = last.k.max(c.k);
                last.derivative = last.derivative.min(c.derivative);
                continue;
            }
        }
        merged.push(c);
    }
    merged.sort_by(|x, y| x.t.total_cmp(&y.t));
    let mut events: Vec<Vec<BlockCrossing>> = Vec::new();
    for c in merged {
        match events.last_mut() {
            Some(ev) if (c.t - ev[0].t).abs() < merge_width => ev.push(c),
            _ => events.push(vec![c]),
        }
    }
    let mut out = Vec::with_capacity(events.len());
    for ev in events {
        let t = ev[0].t;
        let spec = path.at(t);
        let at = Assembled::new(&spec, sheet, n);
        let mut rest = 1;
        for (bi, b) in blocks.iter().enumerate() {
            if ev.iter().all(|c| c.block != bi) {
                rest *= det_sign(&at.block(b));
            }
        }
        let before = rest * ev.iter().map(|c| c.before.unwrap_or(0)).product::<i32>();
        let after = rest * ev.iter().map(|c| c.after.unwrap_or(0)).product::<i32>();
        out.push(Crossing {
            t,
            sheet,
            kernel_dim: ev.iter().map(|c| c.k).sum(),
            before,
            after,
            contribution: (after - before) / 2,
            derivative: ev.iter().map(|c| c.derivative).fold(f64::INFINITY, f64::min),
        });
    }
    Ok(out)
}

/// `(−1)^{Σ dim ker}` over the crossings of `path` on `sheet`.
pub fn sign_path(path: &OperatorPath, sheet: Sheet, opts: &CrossingOptions) -> Result<i32, SpecflowError> {
    let total: usize = detect_crossings(path, sheet, opts)?
        .iter()
        .map(|c| c.kernel_dim)
        .sum();
    Ok(if total % 2 == 0 { 1 } else { -1 })
}

/// Path from `op` to the reference `∂̄ + λ`: first remove the anti-linear
/// part along a straight line, then move linearly inside complex-linear
/// operators.
pub fn sign_reference_path(op: &OperatorSpec) -> OperatorPath {
    let mut knots = vec![op.clone()];
    let linear = op.complex_linear_part();
    if linear != *op {
        knots.push(linear);
    }
    let reference = OperatorSpec::reference();
    if *knots.last().expect("nonempty") != reference {
        knots.push(reference);
    }
    if knots.len() == 1 {
        knots.push(op.clone());
    }
    OperatorPath {
        knots,
        start_tag: None,
        end_tag: Some("complex-linear".into()),
    }
}

/// Spectral-flow sign of an invertible operator on the base torus.
pub fn sign(op: &OperatorSpec, opts: &CrossingOptions) -> Result<i32, SpecflowError> {
    let path = sign_reference_path(op);
    let n = truncation_for(&path, opts);
    let k = kernel_dim_on(op, Sheet::BASE, n, opts.tol)?;
    if k > 0 {
        return Err(SpecflowError::KernelAtEndpoint(k));
    }
    if op.is_complex_linear() {
        // complex-linear kernels have even real dimension
        return Ok(1);
    }
    let opts = CrossingOptions {
        truncation: Some(n),
        ..*opts
    };
    sign_path(&path, Sheet::BASE, &opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct W21Report {
    pub total: i32,
    pub per_cover: Vec<([u8; 2], i32)>,
    pub crossings: Vec<Crossing>,
}

fn check_rigid(op: &OperatorSpec, n: usize, tol: f64, what: &str) -> Result<(), SpecflowError> {
    let base = kernel_dim_on(op, Sheet::BASE, n, tol)?;
    if base > 0 {
        return Err(SpecflowError::EndpointNotRigid(format!(
            "{what} has a kernel of dimension {base}"
        )));
    }
    for eps in Sheet::COVERS {
        let k = kernel_dim_on(op, Sheet::anti_invariant(eps)?, n, tol)?;
        if k > 0 {
            return Err(SpecflowError::EndpointNotRigid(format!(
                "{what} has an anti-invariant kernel of dimension {k} for the cover {eps:?}"
            )));
        }
    }
    Ok(())
}

/// Signed count of anti-invariant kernel crossings along `path`, summed
/// over the three unbranched double covers. Both endpoints must be 2-rigid;
/// reversing the path negates the count.
pub fn anti_invariant_flow(path: &OperatorPath, opts: &CrossingOptions) -> Result<W21Report, SpecflowError> {
    path.validate()?;
    let n = truncation_for(path, opts);
    let opts = CrossingOptions {
        truncation: Some(n),
        ..*opts
    };
    check_rigid(path.start(), n, opts.tol, "start")?;
    check_rigid(path.end(), n, opts.tol, "end")?;
    let mut total = 0;
    let mut per_cover = Vec::new();
    let mut crossings = Vec::new();
    for eps in Sheet::COVERS {
        let found = detect_crossings(path, Sheet::anti_invariant(eps)?, &opts)?;
        let w: i32 = found.iter().map(|c| c.contribution).sum();
        total += w;
        per_cover.push((eps, w));
        crossings.extend(found);
    }
    crossings.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(W21Report {
        total,
        per_cover,
        crossings,
    })
}

/// `w_{2,1}` of the start of `path`, which must end at a complex-linear
/// operator.
pub fn w21_detailed(path: &OperatorPath, opts: &CrossingOptions) -> Result<W21Report, SpecflowError> {
    if !path.end().is_complex_linear() {
        return Err(SpecflowError::EndpointNotRigid(
            "end of the path is not complex-linear".into(),
        ));
    }
    anti_invariant_flow(path, opts)
}

pub fn w21(path: &OperatorPath, opts: &CrossingOptions) -> Result<i32, SpecflowError> {
    Ok(w21_detailed(path, opts)?.total)
}

#[cfg(test)]
mod tests {
    use super::super::{mat2, reference_shift, scalar, DiscreteOperator};
    use super::*;
    use std::f64::consts::PI;

    fn aeps(a: f64) -> OperatorSpec {
        OperatorSpec::dbar().with_c([0, 0], mat2([[0.0, a], [-a, 0.0]]))
    }

    fn alpha(c: f64) -> OperatorSpec {
        OperatorSpec::reference().with_c([1, 0], mat2([[c, 0.0], [0.0, 0.0]]))
    }

    fn opts(n: usize) -> CrossingOptions {
        CrossingOptions {
            truncation: Some(n),
            ..Default::default()
        }
    }

    #[test]
    fn constant_family_crossings_on_base() {
        let path = OperatorPath::segment(aeps(0.5), aeps(4.0));
        let found = detect_crossings(&path, Sheet::BASE, &opts(6)).unwrap();
        // a = 0.5 + 3.5 t crosses π|m| for |m| = 1 only
        assert_eq!(found.len(), 1);
        let a = 0.5 + 3.5 * found[0].t;
        assert!((a - PI).abs() < 1e-6, "{a}");
        assert_eq!(found[0].kernel_dim, 8);
        assert_eq!(found[0].contribution, 0);
    }

    #[test]
    fn sign_of_simple_examples() {
        assert_eq!(sign(&OperatorSpec::reference(), &opts(4)).unwrap(), 1);
        assert_eq!(sign(&aeps(1.0), &opts(4)).unwrap(), 1);
        assert_eq!(sign(&aeps(3.5), &opts(4)).unwrap(), 1);
        let lam = reference_shift().norm();
        for c in [0.5, 1.5, lam + 0.3, 3.0] {
            let op = OperatorSpec::reference().with_c([0, 0], mat2([[c, 0.0], [0.0, 0.0]]));
            let expected = if c > lam { -1 } else { 1 };
            assert_eq!(sign(&op, &opts(4)).unwrap(), expected, "c = {c}");
            let det = det_sign(&DiscreteOperator::assemble(&op, 4).unwrap().matrix);
            assert_eq!(det, expected);
        }
        assert!(matches!(
            sign(&OperatorSpec::dbar(), &opts(4)),
            Err(SpecflowError::KernelAtEndpoint(4))
        ));
    }

    #[test]
    fn w21_telescopes() {
        let path = OperatorPath::segment(alpha(4.0), OperatorSpec::reference());
        let report = w21_detailed(&path, &opts(5)).unwrap();
        assert_eq!(report.total, 1);
        assert_eq!(report.per_cover[0], ([1, 0], 1));
        assert_eq!(anti_invariant_flow(&path.reversed(), &opts(5)).unwrap().total, -1);
        assert!(matches!(
            w21(&path.reversed(), &opts(5)),
            Err(SpecflowError::EndpointNotRigid(_))
        ));
        let linear = OperatorPath::segment(
            OperatorSpec::reference(),
            OperatorSpec::dbar().with_b([0, 0], scalar(reference_shift() * 1.3)),
        );
        assert_eq!(w21(&linear, &opts(5)).unwrap(), 0);
    }
}
