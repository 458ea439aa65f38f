//! Scalar normal form `ς(t − cς^n) = 0` of an elementary bifurcation, its
//! signed zero counts, and the curve ledger whose `Gr` count stays fixed
//! across events.

use std::collections::BTreeMap;

use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BifurcationError {
    #[error("invalid normal form: {0}")]
    InvalidModel(String),
    #[error("zero counts {observed} disagree with the net change {expected}")]
    InconsistentModel { observed: Rational64, expected: Rational64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("host curve {0} is not in the ledger")]
    HostMissing(u32),
    #[error("host curve {id} has sign {found}, event expects {expected}")]
    HostSignMismatch { id: u32, found: i32, expected: i32 },
    #[error("invalid event: {0}")]
    InvalidEvent(String),
}

pub type Result<T> = std::result::Result<T, BifurcationError>;

fn check_sign(s: i32, what: &str) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(BifurcationError::InvalidEvent(format!("{what} must be ±1, got {s}")))
    }
}

/// `t = cς^n` modulo the isotropy group `Γ ⊂ Z/2` acting by `ς ↦ −ς`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "NormalFormRepr")]
pub struct KuranishiNormalForm {
    pub c: f64,
    pub n: u32,
    pub gamma_order: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalFormRepr {
    c: f64,
    n: u32,
    gamma_order: u32,
}

impl TryFrom<NormalFormRepr> for KuranishiNormalForm {
    type Error = BifurcationError;
    fn try_from(r: NormalFormRepr) -> Result<Self> {
        KuranishiNormalForm::new(r.c, r.n, r.gamma_order)
    }
}

impl KuranishiNormalForm {
    pub fn new(c: f64, n: u32, gamma_order: u32) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(BifurcationError::InvalidModel(format!("c must be finite and nonzero, got {c}")));
        }
        if n == 0 {
            return Err(BifurcationError::InvalidModel("n must be at least 1".into()));
        }
        match gamma_order {
            1 => {}
            2 if n % 2 == 0 => {}
            2 => {
                return Err(BifurcationError::InvalidModel(
                    "a Z/2 isotropy group needs an even exponent".into(),
                ))
            }
            g => return Err(BifurcationError::InvalidModel(format!("|Γ| must be 1 or 2, got {g}"))),
        }
        Ok(KuranishiNormalForm { c, n, gamma_order })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelZero {
    /// Representative root; under `|Γ| = 2` the positive one of `±ς`.
    pub root: f64,
    pub sign: i32,
}

/// Nonzero real zeros of `ς(t − cς^n)`, one per `Γ`-orbit. Each has sign
/// `sgn(−n t)`, the sign of the derivative `−n t` at the root.
pub fn zeros_of_model(f: &KuranishiNormalForm, t: f64) -> Vec<ModelZero> {
    if t == 0.0 || !t.is_finite() {
        return Vec::new();
    }
    let sign = if t > 0.0 { -1 } else { 1 };
    let q = t / f.c;
    let r = q.abs().powf(1.0 / f.n as f64);
    let roots: Vec<f64> = if f.n % 2 == 1 {
        vec![r.copysign(q)]
    } else if q > 0.0 {
        if f.gamma_order == 2 {
            vec![r]
        } else {
            vec![-r, r]
        }
    } else {
        Vec::new()
    };
    roots.into_iter().map(|root| ModelZero { root, sign }).collect()
}

fn signed_count(f: &KuranishiNormalForm, t: f64) -> i64 {
    zeros_of_model(f, t).iter().map(|z| z.sign as i64).sum()
}

/// `n₊ − n₋ = −2·wall_sign/|Γ|`, checked against the zero counts at `±1`.
pub fn net_change(f: &KuranishiNormalForm, wall_sign: i32) -> Result<Rational64> {
    check_sign(wall_sign, "wall sign")?;
    let expected = Rational64::new(-2 * wall_sign as i64, f.gamma_order as i64);
    let observed = Rational64::from_integer(wall_sign as i64 * (signed_count(f, 1.0) - signed_count(f, -1.0)));
    if observed != expected {
        return Err(BifurcationError::InconsistentModel { observed, expected });
    }
    Ok(expected)
}

/// Smallest `n ≥ 1` with `Σ x_i^{n+1} y_i ≠ 0`, evaluated exactly. The
/// Vandermonde matrix of the distinct nonzero `x_i` is invertible, so some
/// `n ≤ d` works.
pub fn petri_min_exponent(x: &[f64], y: &[f64]) -> Result<usize> {
    let d = x.len();
    if d == 0 || y.len() != d {
        return Err(BifurcationError::PreconditionViolated(
            "x and y must be nonempty and of equal length".into(),
        ));
    }
    let to_q = |v: f64| {
        BigRational::from_float(v)
            .ok_or_else(|| BifurcationError::PreconditionViolated(format!("non-finite entry {v}")))
    };
    let xs = x.iter().map(|&v| to_q(v)).collect::<Result<Vec<_>>>()?;
    let ys = y.iter().map(|&v| to_q(v)).collect::<Result<Vec<_>>>()?;
    if xs.iter().any(Zero::is_zero) {
        return Err(BifurcationError::PreconditionViolated("x has a zero entry".into()));
    }
    for i in 0..d {
        if xs[i + 1..].contains(&xs[i]) {
            return Err(BifurcationError::PreconditionViolated("x has repeated entries".into()));
        }
    }
    if ys.iter().all(Zero::is_zero) {
        return Err(BifurcationError::PreconditionViolated("y is zero".into()));
    }
    // powers[i] = x_i^{n+1}
    let mut powers: Vec<BigRational> = xs.iter().map(|v| v * v).collect();
    for n in 1..=d {
        let s = powers
            .iter()
            .zip(&ys)
            .fold(BigRational::zero(), |acc, (p, y)| acc + p * y);
        if !s.is_zero() {
            return Ok(n);
        }
        for (p, v) in powers.iter_mut().zip(&xs) {
            *p *= v;
        }
    }
    unreachable!("Vandermonde matrix of distinct nonzero nodes is singular")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveClass {
    A,
    #[serde(rename = "2A")]
    TwoA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub class: CurveClass,
    pub genus: u32,
    pub sign: i32,
    /// Linear wall-crossing weights `w_{2,h}` of an A-curve, keyed by `h`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub w: BTreeMap<u32, i64>,
    /// A-curve whose double covers gave birth to this 2A-curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host: Option<u32>,
}

/// A bifurcation of double covers of `host` into embedded genus-`genus`
/// 2A-curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallCrossingEvent {
    pub host: u32,
    pub sign: i32,
    pub gamma_order: u32,
    pub genus: u32,
    /// `+1` when the path crosses from `t < 0` to `t > 0`.
    #[serde(default = "one")]
    pub direction: i32,
    /// Sign of the host; checked against the ledger when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host_sign: Option<i32>,
}

fn one() -> i32 {
    1
}

impl WallCrossingEvent {
    /// Change of the signed 2A-count: `direction·(−2·sign/|Γ|)`.
    pub fn two_a_change(&self) -> Result<i64> {
        check_sign(self.sign, "event sign")?;
        check_sign(self.direction, "direction")?;
        if self.gamma_order != 1 && self.gamma_order != 2 {
            return Err(BifurcationError::InvalidEvent(format!(
                "|Γ| must be 1 or 2, got {}",
                self.gamma_order
            )));
        }
        Ok(self.direction as i64 * (-2 * self.sign as i64) / self.gamma_order as i64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveLedger {
    pub curves: Vec<Curve>,
    #[serde(default)]
    pub events: Vec<WallCrossingEvent>,
}

impl CurveLedger {
    /// Fills in missing ids by position and rejects duplicates or bad signs.
    pub fn normalized(mut self) -> Result<Self> {
        let mut next = self.curves.iter().filter_map(|c| c.id).max().map_or(0, |m| m + 1);
        let mut seen = std::collections::BTreeSet::new();
        for c in &mut self.curves {
            check_sign(c.sign, "curve sign")?;
            let id = *c.id.get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            if !seen.insert(id) {
                return Err(BifurcationError::InvalidEvent(format!("duplicate curve id {id}")));
            }
        }
        Ok(self)
    }

    fn next_id(&self) -> u32 {
        self.curves.iter().filter_map(|c| c.id).max().map_or(0, |m| m + 1)
    }

    pub fn find(&self, id: u32) -> Option<&Curve> {
        self.curves.iter().find(|c| c.id == Some(id))
    }

    /// `Gr_{2A,h} = Σ_{2A, genus h} sgn + Σ_{A, genus ≤ h} sgn·w_{2,h}`.
    pub fn gr(&self, h: u32) -> i64 {
        self.curves
            .iter()
            .map(|c| match c.class {
                CurveClass::TwoA if c.genus == h => c.sign as i64,
                CurveClass::A if c.genus <= h => c.sign as i64 * c.w.get(&h).copied().unwrap_or(0),
                _ => 0,
            })
            .sum()
    }

    /// Genera at which `Gr` can be nonzero.
    pub fn genera(&self) -> Vec<u32> {
        let mut hs: Vec<u32> = self
            .curves
            .iter()
            .flat_map(|c| match c.class {
                CurveClass::TwoA => vec![c.genus],
                CurveClass::A => c.w.keys().copied().collect(),
            })
            .collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Applies one event: the embedded 2A-count moves by `Δ`, the host's
    /// `w_{2,h}` by `−Δ·s_D`, so `Gr_{2A,h}` is unchanged. Births and deaths
    /// are paired: a unit of change first removes an existing 2A-curve of the
    /// opposite sign born from the same host.
    pub fn cross(&self, event: &WallCrossingEvent) -> Result<Self> {
        let delta = event.two_a_change()?;
        let host = self.find(event.host).ok_or(BifurcationError::HostMissing(event.host))?;
        if host.class != CurveClass::A {
            return Err(BifurcationError::InvalidEvent(format!("curve {} is not of class A", event.host)));
        }
        if let Some(s) = event.host_sign {
            check_sign(s, "host sign")?;
            if s != host.sign {
                return Err(BifurcationError::HostSignMismatch {
                    id: event.host,
                    found: host.sign,
                    expected: s,
                });
            }
        }
        if event.genus < host.genus {
            return Err(BifurcationError::InvalidEvent(format!(
                "double covers of a genus {} curve have genus at least {}",
                host.genus, host.genus
            )));
        }
        let s_d = host.sign as i64;
        let mut out = self.clone();
        let h = event.genus;
        let unit = delta.signum() as i32;
        for _ in 0..delta.abs() {
            let partner = out.curves.iter().position(|c| {
                c.class == CurveClass::TwoA && c.genus == h && c.host == Some(event.host) && c.sign == -unit
            });
            match partner {
                Some(i) => {
                    out.curves.remove(i);
                }
                None => {
                    let id = out.next_id();
                    out.curves.push(Curve {
                        id: Some(id),
                        class: CurveClass::TwoA,
                        genus: h,
                        sign: unit,
                        w: BTreeMap::new(),
                        host: Some(event.host),
                    });
                }
            }
        }
        let host = out
            .curves
            .iter_mut()
            .find(|c| c.id == Some(event.host))
            .expect("host checked above");
        let w = host.w.entry(h).or_insert(0);
        *w -= delta * s_d;
        if *w == 0 {
            host.w.remove(&h);
        }
        out.events.push(event.clone());
        Ok(out)
    }
}

/// `ledger_cross` with the host sign passed explicitly.
pub fn ledger_cross(ledger: &CurveLedger, event: &WallCrossingEvent, host_sign: i32) -> Result<CurveLedger> {
    let event = WallCrossingEvent {
        host_sign: Some(host_sign),
        ..event.clone()
    };
    ledger.cross(&event)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub gr_before: BTreeMap<u32, i64>,
    pub gr_after: BTreeMap<u32, i64>,
    pub invariant: bool,
    pub ledger: CurveLedger,
}

/// Replays `events` on `ledger` (whose own event list is not replayed) and
/// compares `Gr` before and after.
pub fn replay(ledger: &CurveLedger, events: &[WallCrossingEvent]) -> Result<ReplayReport> {
    let start = ledger.clone().normalized()?;
    let mut cur = start.clone();
    for e in events {
        cur = cur.cross(e)?;
    }
    let mut hs = start.genera();
    hs.extend(cur.genera());
    hs.extend(events.iter().map(|e| e.genus));
    hs.sort_unstable();
    hs.dedup();
    let gr_before: BTreeMap<u32, i64> = hs.iter().map(|&h| (h, start.gr(h))).collect();
    let gr_after: BTreeMap<u32, i64> = hs.iter().map(|&h| (h, cur.gr(h))).collect();
    Ok(ReplayReport {
        invariant: gr_before == gr_after,
        gr_before,
        gr_after,
        ledger: cur,
    })
}
