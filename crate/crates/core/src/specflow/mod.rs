//! Real-linear Cauchy–Riemann operators `D s = ∂̄s + A s` on the trivial
//! rank-2 bundle over the square unit torus.
//!
//! `A = Σ_m e_m (B_m · + C_m conj(·))` with `e_m = exp(2πi(m₁x + m₂y))`, so
//! `∂̄ e_j = πi(j₁ + i j₂) e_j` and the Fourier coefficients of `D s` are
//!
//! ```text
//! (Ds)_j = λ_j s_j + Σ_m B_m s_{j−m} + Σ_m C_m conj(s_{m−j}),   λ_j = πi(j₁ + i j₂).
//! ```
//!
//! An unbranched double cover with character `ε` splits the pulled-back
//! operator into the base operator and its restriction to the
//! anti-invariant frequencies `Z² + ε/2`; both are assembled by the same
//! formula on a shifted frequency set (a *sheet*).

mod assembly;
mod crossing;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use assembly::{
    kernel_dim, kernel_dim_on, kernel_dim_pullback, multisection_residual, pullback_kernel,
    split_double_cover, Assembled, CoverSection, DiscreteOperator, Pullback, Sheet, SheetOperator,
};
pub use crossing::{
    anti_invariant_flow, detect_crossings, sign, sign_path, sign_reference_path, w21, w21_detailed, Crossing,
    CrossingOptions, W21Report,
};

/// `λ = π(1+i)/√5`, the shift of the reference operator `∂̄ + λ`.
pub fn reference_shift() -> Complex64 {
    Complex64::new(1.0, 1.0) * (std::f64::consts::PI / 5f64.sqrt())
}

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecflowError {
    #[error("truncation {n} is below twice the mode radius {radius}")]
    TruncationTooSmall { n: usize, radius: usize },
    #[error("operator has a kernel of dimension {0} at a path endpoint")]
    KernelAtEndpoint(usize),
    #[error("endpoint is not rigid: {0}")]
    EndpointNotRigid(String),
    #[error("kernel crossing at t = {t} is not transverse (derivative {derivative:e})")]
    NonTransverseCrossing { t: f64, derivative: f64 },
    #[error("invalid operator data: {0}")]
    Invalid(String),
}

pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat2(a: [[f64; 2]; 2]) -> Mat2 {
    [
        [Complex64::new(a[0][0], 0.0), Complex64::new(a[0][1], 0.0)],
        [Complex64::new(a[1][0], 0.0), Complex64::new(a[1][1], 0.0)],
    ]
}

pub fn scalar(z: Complex64) -> Mat2 {
    let o = Complex64::new(0.0, 0.0);
    [[z, o], [o, z]]
}

fn mat_is_zero(m: &Mat2) -> bool {
    m.iter().flatten().all(|z| z.re == 0.0 && z.im == 0.0)
}

fn mat_lin(a: &Mat2, s: f64, b: &Mat2, t: f64) -> Mat2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] * s + b[i][j] * t;
        }
    }
    out
}

const ZERO2: Mat2 = [[Complex64::new(0.0, 0.0); 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoeffs {
    pub b: Mat2,
    pub c: Mat2,
}

/// Zeroth-order term as a finite Fourier sum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSpec {
    modes: BTreeMap<[i32; 2], ModeCoeffs>,
}

impl OperatorSpec {
    /// Plain `∂̄`.
    pub fn dbar() -> Self {
        Self::default()
    }

    /// `∂̄ + λ` with `λ = π(1+i)/√5`.
    pub fn reference() -> Self {
        Self::dbar().with_b([0, 0], scalar(reference_shift()))
    }

    /// Adds `e_m B` to the complex-linear part.
    pub fn with_b(mut self, m: [i32; 2], b: Mat2) -> Self {
        let e = self.modes.entry(m).or_insert(ModeCoeffs { b: ZERO2, c: ZERO2 });
        e.b = mat_lin(&e.b, 1.0, &b, 1.0);
        self.prune();
        self
    }

    /// Adds `e_m C conj(·)` to the anti-linear part.
    pub fn with_c(mut self, m: [i32; 2], c: Mat2) -> Self {
        let e = self.modes.entry(m).or_insert(ModeCoeffs { b: ZERO2, c: ZERO2 });
        e.c = mat_lin(&e.c, 1.0, &c, 1.0);
        self.prune();
        self
    }

    fn prune(&mut self) {
        self.modes
            .retain(|_, v| !(mat_is_zero(&v.b) && mat_is_zero(&v.c)));
    }

    pub fn modes(&self) -> impl Iterator<Item = (&[i32; 2], &ModeCoeffs)> {
        self.modes.iter()
    }

    pub fn is_complex_linear(&self) -> bool {
        self.modes.values().all(|v| mat_is_zero(&v.c))
    }

    /// Drops every anti-linear term.
    pub fn complex_linear_part(&self) -> Self {
        let mut out = self.clone();
        for v in out.modes.values_mut() {
            v.c = ZERO2;
        }
        out.prune();
        out
    }

    /// Largest `max(|m₁|, |m₂|)` over the support.
    pub fn radius(&self) -> usize {
        self.modes
            .keys()
            .map(|m| m[0].unsigned_abs().max(m[1].unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn default_truncation(&self) -> usize {
        2 * self.radius() + 8
    }

    /// `(1 − t)·self + t·other` on the zeroth-order terms.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let mut out = OperatorSpec::default();
        for k in self.modes.keys().chain(other.modes.keys()) {
            let a = self.modes.get(k).copied().unwrap_or(ModeCoeffs { b: ZERO2, c: ZERO2 });
            let b = other.modes.get(k).copied().unwrap_or(ModeCoeffs { b: ZERO2, c: ZERO2 });
            out.modes.insert(
                *k,
                ModeCoeffs {
                    b: mat_lin(&a.b, 1.0 - t, &b.b, t),
                    c: mat_lin(&a.c, 1.0 - t, &b.c, t),
                },
            );
        }
        out.prune();
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeRepr {
    m: [i32; 2],
    #[serde(rename = "B", default = "zero_repr")]
    b: [[f64; 2]; 4],
    #[serde(rename = "C", default = "zero_repr")]
    c: [[f64; 2]; 4],
}

fn zero_repr() -> [[f64; 2]; 4] {
    [[0.0; 2]; 4]
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    modes: Vec<ModeRepr>,
}

fn to_repr(m: &Mat2) -> [[f64; 2]; 4] {
    let f = |z: Complex64| [z.re, z.im];
    [f(m[0][0]), f(m[0][1]), f(m[1][0]), f(m[1][1])]
}

fn from_repr(r: &[[f64; 2]; 4]) -> Mat2 {
    let f = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    [[f(r[0]), f(r[1])], [f(r[2]), f(r[3])]]
}

impl Serialize for OperatorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpecRepr {
            modes: self
                .modes
                .iter()
                .map(|(m, v)| ModeRepr {
                    m: *m,
                    b: to_repr(&v.b),
                    c: to_repr(&v.c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        let mut out = OperatorSpec::default();
        for mode in repr.modes {
            if mode.b.iter().chain(&mode.c).flatten().any(|x| !x.is_finite()) {
                return Err(serde::de::Error::custom("non-finite coefficient"));
            }
            out = out.with_b(mode.m, from_repr(&mode.b)).with_c(mode.m, from_repr(&mode.c));
        }
        Ok(out)
    }
}

/// Piecewise-linear path through `knots`, knot `i` at `t = i/(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPath {
    pub knots: Vec<OperatorSpec>,
    #[serde(default)]
    pub start_tag: Option<String>,
    #[serde(default)]
    pub end_tag: Option<String>,
}

impl OperatorPath {
    pub fn new(knots: Vec<OperatorSpec>) -> Self {
        OperatorPath {
            knots,
            start_tag: None,
            end_tag: None,
        }
    }

    pub fn segment(a: OperatorSpec, b: OperatorSpec) -> Self {
        Self::new(vec![a, b])
    }

    pub fn start(&self) -> &OperatorSpec {
        &self.knots[0]
    }

    pub fn end(&self) -> &OperatorSpec {
        self.knots.last().expect("nonempty path")
    }

    pub fn segments(&self) -> usize {
        self.knots.len().saturating_sub(1)
    }

    pub fn at(&self, t: f64) -> OperatorSpec {
        let n = self.segments();
        if n == 0 {
            return self.knots[0].clone();
        }
        let x = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let i = (x.floor() as usize).min(n - 1);
        self.knots[i].lerp(&self.knots[i + 1], x - i as f64)
    }

    pub fn reversed(&self) -> Self {
        let mut knots = self.knots.clone();
        knots.reverse();
        OperatorPath {
            knots,
            start_tag: self.end_tag.clone(),
            end_tag: self.start_tag.clone(),
        }
    }

    /// `self` followed by `other`; the end of `self` must equal the start of
    /// `other`.
    pub fn concat(&self, other: &Self) -> Result<Self, SpecflowError> {
        if self.end() != other.start() {
            return Err(SpecflowError::Invalid("paths do not meet".into()));
        }
        let mut knots = self.knots.clone();
        knots.extend(other.knots[1..].iter().cloned());
        Ok(OperatorPath {
            knots,
            start_tag: self.start_tag.clone(),
            end_tag: other.end_tag.clone(),
        })
    }

    pub fn validate(&self) -> Result<(), SpecflowError> {
        if self.knots.len() < 2 {
            return Err(SpecflowError::Invalid("a path needs at least two knots".into()));
        }
        let tag_ok = |tag: &Option<String>, op: &OperatorSpec| match tag.as_deref() {
            Some("complex-linear") => op.is_complex_linear(),
            _ => true,
        };
        if !tag_ok(&self.start_tag, self.start()) || !tag_ok(&self.end_tag, self.end()) {
            return Err(SpecflowError::Invalid(
                "endpoint tagged complex-linear has an anti-linear part".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let op = OperatorSpec::reference().with_c([1, 0], mat2([[2.0, 0.0], [0.0, 0.0]]));
        let s = serde_json::to_string(&op).unwrap();
        let back: OperatorSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        assert!(!op.is_complex_linear());
        assert!(op.complex_linear_part().is_complex_linear());
        assert_eq!(op.radius(), 1);
        assert!(serde_json::from_str::<OperatorSpec>(r#"{"modes":[],"x":1}"#).is_err());
    }

    #[test]
    fn path_evaluation() {
        let a = OperatorSpec::dbar().with_c([0, 0], mat2([[1.0, 0.0], [0.0, 0.0]]));
        let b = OperatorSpec::reference();
        let p = OperatorPath::new(vec![a.clone(), b.clone(), a.clone()]);
        assert_eq!(p.at(0.0), a);
        assert_eq!(p.at(0.5), b);
        assert_eq!(p.at(1.0), a);
        assert_eq!(p.reversed().at(0.25), p.at(0.75));
    }
}
