//! Exact Gopakumar–Vafa transforms for multiples `dA` of a primitive class:
//!
//! ```text
//! Σ_g GW[d][g] t^{2g−2} = Σ_{k | d} (1/k) Σ_h n[d/k][h] (2 sin(kt/2))^{2h−2}.
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const DEFAULT_D_MAX: usize = 6;
pub const DEFAULT_H_MAX: usize = 6;
pub const DEFAULT_T_MAX: i32 = 20;

/// Lowest `t`-order carried by a series.
pub const MIN_ORDER: i32 = -2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GvError {
    #[error("series window t^{t_max} is below the needed order t^{needed}")]
    WindowTooSmall { t_max: i32, needed: i32 },
    #[error("table shape does not match its window: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GvError>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || GvError::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Serde adapter: rationals as `"p/q"` strings (integers also accepted as
/// bare JSON numbers).
pub mod rational_str {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        S(String),
        I(i64),
    }

    pub fn to_value(r: &BigRational) -> String {
        format_rational(r)
    }

    pub fn from_repr<E: serde::de::Error>(s: &str) -> std::result::Result<BigRational, E> {
        parse_rational(s).map_err(E::custom)
    }

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(to_value).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
        let rows: Vec<Vec<Repr>> = Vec::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x {
                        Repr::S(s) => from_repr(&s),
                        Repr::I(i) => Ok(BigRational::from_integer(i.into())),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Laurent series in `t` with exact coefficients on orders
/// `MIN_ORDER..=t_max`; coefficients above `t_max` are unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    coeffs: Vec<BigRational>,
    t_max: i32,
}

impl LaurentSeries {
    pub fn zero(t_max: i32) -> Self {
        LaurentSeries {
            coeffs: vec![BigRational::zero(); (t_max - MIN_ORDER + 1).max(0) as usize],
            t_max,
        }
    }

    pub fn monomial(c: BigRational, order: i32, t_max: i32) -> Self {
        let mut s = Self::zero(t_max);
        if order <= t_max {
            s.coeffs[(order - MIN_ORDER) as usize] = c;
        }
        s
    }

    pub fn t_max(&self) -> i32 {
        self.t_max
    }

    pub fn coeff(&self, order: i32) -> BigRational {
        if order < MIN_ORDER || order > self.t_max {
            return BigRational::zero();
        }
        self.coeffs[(order - MIN_ORDER) as usize].clone()
    }

    /// Lowest order with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| i as i32 + MIN_ORDER)
    }

    pub fn add(&self, other: &Self) -> Self {
        let t_max = self.t_max.min(other.t_max);
        let mut out = Self::zero(t_max);
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            *c = &self.coeffs[i] + &other.coeffs[i];
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            t_max: self.t_max,
        }
    }

    /// Product; known up to `min(t_a + v_b, t_b + v_a)`. Terms of the
    /// product below `MIN_ORDER` must vanish.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (Some(va), Some(vb)) = (self.valuation(), other.valuation()) else {
            return Ok(Self::zero(self.t_max.min(other.t_max)));
        };
        if va + vb < MIN_ORDER {
            return Err(GvError::Invalid(format!("product has a term of order {}", va + vb)));
        }
        let t_max = (self.t_max + vb).min(other.t_max + va);
        let mut out = Self::zero(t_max);
        for i in va..=self.t_max {
            let a = self.coeff(i);
            if a.is_zero() {
                continue;
            }
            for j in vb..=other.t_max.min(t_max - i) {
                let b = &other.coeffs[(j - MIN_ORDER) as usize];
                if !b.is_zero() {
                    out.coeffs[(i + j - MIN_ORDER) as usize] += &a * b;
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            min_order: i32,
            t_max: i32,
            coeffs: Vec<String>,
        }
        Repr {
            min_order: MIN_ORDER,
            t_max: self.t_max,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

/// Power series `Σ_{i ≤ n} a_i x^i` truncated at a fixed order.
fn ps_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().min(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn ps_inverse(a: &[BigRational]) -> Vec<BigRational> {
    let n = a.len();
    let inv0 = a[0].recip();
    let mut out = vec![BigRational::zero(); n];
    out[0] = inv0.clone();
    for i in 1..n {
        let mut s = BigRational::zero();
        for j in 1..=i {
            s += &a[j] * &out[i - j];
        }
        out[i] = -(s * &inv0);
    }
    out
}

fn ps_pow(a: &[BigRational], e: i64) -> Vec<BigRational> {
    let base = if e < 0 { ps_inverse(a) } else { a.to_vec() };
    let mut out = vec![BigRational::zero(); a.len()];
    out[0] = BigRational::one();
    let mut b = base;
    let mut e = e.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            out = ps_mul(&out, &b);
        }
        e >>= 1;
        if e > 0 {
            b = ps_mul(&b, &b);
        }
    }
    out
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `(2 sin(kt/2))^{2h−2} = (kt)^{2h−2} S(kt)^{2h−2}` with
/// `S(u) = sin(u/2)/(u/2)`, exact through `t^{t_max}`.
pub fn sine_power(k: u32, h: u32, t_max: i32) -> LaurentSeries {
    assert!(k >= 1, "k must be positive");
    let e = 2 * h as i64 - 2;
    let shift = e as i32;
    if t_max < shift {
        return LaurentSeries::zero(t_max);
    }
    let len = (t_max - shift + 1) as usize;
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut s = vec![BigRational::zero(); len];
    let mut kpow = BigInt::one();
    let mut four = BigInt::one();
    for j in 0..len.div_ceil(2) {
        let fact = factorial(2 * j as u64 + 1);
        let mut c = BigRational::new(kpow.clone(), four.clone() * fact);
        if j % 2 == 1 {
            c = -c;
        }
        s[2 * j] = c;
        kpow *= &k2;
        four *= 4;
    }
    let sp = ps_pow(&s, e);
    let lead = BigRational::from_integer(BigInt::from(k)).pow(e as i32);
    let mut out = LaurentSeries::zero(t_max);
    for (i, c) in sp.into_iter().enumerate() {
        out.coeffs[(i as i32 + shift - MIN_ORDER) as usize] = c * &lead;
    }
    out
}

/// Integer BPS numbers `n[d][h]`, rows `d = 1..=d_max`, columns
/// `h = 0..=h_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpsTable {
    pub d_max: usize,
    pub h_max: usize,
    pub n: Vec<Vec<i64>>,
}

impl BpsTable {
    pub fn zeros(d_max: usize, h_max: usize) -> Self {
        BpsTable {
            d_max,
            h_max,
            n: vec![vec![0; h_max + 1]; d_max],
        }
    }

    /// `n[d][h]` with `d ≥ 1`; zero outside the window.
    pub fn get(&self, d: usize, h: usize) -> i64 {
        if d == 0 || d > self.d_max || h > self.h_max {
            0
        } else {
            self.n[d - 1][h]
        }
    }

    pub fn set(&mut self, d: usize, h: usize, v: i64) {
        self.n[d - 1][h] = v;
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(self.d_max, self.h_max, self.n.iter().map(Vec::len))
    }
}

fn check_shape(d_max: usize, h_max: usize, rows: impl ExactSizeIterator<Item = usize>) -> Result<()> {
    if d_max == 0 {
        return Err(GvError::Shape("d_max must be at least 1".into()));
    }
    if rows.len() != d_max {
        return Err(GvError::Shape(format!("expected {d_max} degree rows")));
    }
    for (i, len) in rows.enumerate() {
        if len != h_max + 1 {
            return Err(GvError::Shape(format!("row d = {} has {len} entries, expected {}", i + 1, h_max + 1)));
        }
    }
    Ok(())
}

/// Rational invariants `GW[d][g]`, rows `d = 1..=d_max`, columns
/// `g = 0..=h_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwTable {
    pub d_max: usize,
    pub h_max: usize,
    #[serde(with = "rational_str")]
    pub gw: Vec<Vec<BigRational>>,
}

impl GwTable {
    pub fn zeros(d_max: usize, h_max: usize) -> Self {
        GwTable {
            d_max,
            h_max,
            gw: vec![vec![BigRational::zero(); h_max + 1]; d_max],
        }
    }

    pub fn get(&self, d: usize, g: usize) -> BigRational {
        if d == 0 || d > self.d_max || g > self.h_max {
            BigRational::zero()
        } else {
            self.gw[d - 1][g].clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_shape(self.d_max, self.h_max, self.gw.iter().map(Vec::len))
    }
}

/// `coeff[k][h][g] = [t^{2g−2}] (2 sin(kt/2))^{2h−2}` for `k ≤ d_max`.
struct SineTable {
    coeff: Vec<Vec<Vec<BigRational>>>,
}

impl SineTable {
    fn new(d_max: usize, h_max: usize, t_max: i32) -> Result<Self> {
        let needed = 2 * h_max as i32 - 2;
        if t_max < needed {
            return Err(GvError::WindowTooSmall { t_max, needed });
        }
        let coeff = (0..=d_max)
            .map(|k| {
                if k == 0 {
                    return Vec::new();
                }
                (0..=h_max)
                    .map(|h| {
                        let s = sine_power(k as u32, h as u32, t_max);
                        (0..=h_max).map(|g| s.coeff(2 * g as i32 - 2)).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(SineTable { coeff })
    }

    fn get(&self, k: usize, h: usize, g: usize) -> &BigRational {
        &self.coeff[k][h][g]
    }
}

fn divisors(d: usize) -> impl Iterator<Item = usize> {
    (1..=d).filter(move |k| d % k == 0)
}

pub fn gw_from_bps(n: &BpsTable, t_max: i32) -> Result<GwTable> {
    n.validate()?;
    let sine = SineTable::new(n.d_max, n.h_max, t_max)?;
    let mut out = GwTable::zeros(n.d_max, n.h_max);
    for d in 1..=n.d_max {
        for g in 0..=n.h_max {
            let mut acc = BigRational::zero();
            for k in divisors(d) {
                let mut inner = BigRational::zero();
                for h in 0..=g {
                    let v = n.get(d / k, h);
                    if v != 0 {
                        inner += sine.get(k, h, g) * BigInt::from(v);
                    }
                }
                acc += inner / BigInt::from(k);
            }
            out.gw[d - 1][g] = acc;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BpsInversion {
    pub d_max: usize,
    pub h_max: usize,
    #[serde(with = "rational_str")]
    pub n: Vec<Vec<BigRational>>,
    /// `(d, h)` positions with non-integer values.
    pub non_integral: Vec<(usize, usize)>,
}

impl BpsInversion {
    pub fn is_integral(&self) -> bool {
        self.non_integral.is_empty()
    }

    /// The integer table, when every entry is an integer fitting in `i64`.
    pub fn to_table(&self) -> Option<BpsTable> {
        if !self.is_integral() {
            return None;
        }
        let n = self
            .n
            .iter()
            .map(|row| row.iter().map(|v| v.to_integer().to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(BpsTable {
            d_max: self.d_max,
            h_max: self.h_max,
            n,
        })
    }
}

/// Inverts the transform by induction on `d`, then `h`: the `k = 1`,
/// `h′ = h` term has coefficient 1.
pub fn bps_from_gw(gw: &GwTable, t_max: i32) -> Result<BpsInversion> {
    gw.validate()?;
    let sine = SineTable::new(gw.d_max, gw.h_max, t_max)?;
    let mut n = vec![vec![BigRational::zero(); gw.h_max + 1]; gw.d_max];
    for d in 1..=gw.d_max {
        for h in 0..=gw.h_max {
            let mut rest = BigRational::zero();
            for k in divisors(d) {
                let mut inner = BigRational::zero();
                for hp in 0..=h {
                    if k == 1 && hp == h {
                        continue;
                    }
                    let v = &n[d / k - 1][hp];
                    if !v.is_zero() {
                        inner += sine.get(k, hp, h) * v;
                    }
                }
                rest += inner / BigInt::from(k);
            }
            n[d - 1][h] = gw.get(d, h) - rest;
        }
    }
    let non_integral = n
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_integer())
                .map(move |(h, _)| (i + 1, h))
        })
        .collect();
    Ok(BpsInversion {
        d_max: gw.d_max,
        h_max: gw.h_max,
        n,
        non_integral,
    })
}

/// `GW[d][0] = Σ_{k | d} k⁻³ n[d/k][0]`.
pub fn genus0_relation(n: &BpsTable, d: usize) -> Result<BigRational> {
    n.validate()?;
    if d == 0 || d > n.d_max {
        return Err(GvError::Invalid(format!("degree {d} outside 1..={}", n.d_max)));
    }
    Ok(divisors(d)
        .map(|k| {
            let k3 = BigInt::from(k).pow(3);
            BigRational::new(BigInt::from(n.get(d / k, 0)), k3)
        })
        .fold(BigRational::zero(), |a, b| a + b))
}

/// `e_{2,0}(C, ∂̄) = 1/2³`, the contribution of double covers of a rigid
/// rational curve.
pub fn aspinwall_morrison() -> BigRational {
    q(1, 8)
}

/// `e + Σ 2·sign/|Aut|`.
pub fn euler_wallcross(e_before: &BigRational, crossings: &[(i32, u64)]) -> Result<BigRational> {
    let mut e = e_before.clone();
    for &(sign, aut) in crossings {
        if sign != 1 && sign != -1 {
            return Err(GvError::Invalid(format!("sign must be ±1, got {sign}")));
        }
        if aut == 0 {
            return Err(GvError::Invalid("automorphism order must be positive".into()));
        }
        e += BigRational::new(BigInt::from(2 * sign), BigInt::from(aut));
    }
    Ok(e)
}
