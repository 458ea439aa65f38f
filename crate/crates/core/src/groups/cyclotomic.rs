//! Exact elements of `Z[ζ_e]`, stored in the power basis `1, ζ, .., ζ^{φ(e)−1}`.
//!
//! The basis is canonical, so equality is coefficient-wise. Products and sums
//! are accumulated modulo `x^e − 1` (which `Φ_e` divides) and reduced once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

/// Reduction data for one conductor.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: usize,
    phi: Vec<i64>,
    /// `x^j mod Φ_e` for `0 ≤ j < e`, each of length `φ(e)`.
    powers: Vec<Vec<i64>>,
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // `den` is monic.
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let mut q = vec![0i64; num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn cyclotomic_poly(n: usize, memo: &mut HashMap<usize, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d, memo);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    memo.insert(n, num.clone());
    num
}

impl CyclotomicField {
    fn build(conductor: usize) -> Self {
        assert!(conductor >= 1);
        let mut memo = HashMap::new();
        let phi = cyclotomic_poly(conductor, &mut memo);
        let deg = phi.len() - 1;
        let mut powers = Vec::with_capacity(conductor);
        let mut cur = vec![0i64; deg];
        cur[0] = 1;
        for _ in 0..conductor {
            powers.push(cur.clone());
            // multiply by x and reduce by the monic Φ_e
            let top = cur[deg - 1];
            let mut next = vec![0i64; deg];
            next[1..deg].copy_from_slice(&cur[..(deg - 1)]);
            for (j, n) in next.iter_mut().enumerate() {
                *n -= top * phi[j];
            }
            cur = next;
        }
        CyclotomicField {
            conductor,
            phi,
            powers,
        }
    }

    /// Shared instance for `conductor`.
    pub fn get(conductor: usize) -> Arc<CyclotomicField> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CyclotomicField>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("cyclotomic cache poisoned");
        Arc::clone(
            map.entry(conductor)
                .or_insert_with(|| Arc::new(Self::build(conductor))),
        )
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    /// `φ(e)`, the length of a coefficient vector.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduces a vector indexed by powers of `ζ` modulo `x^e − 1`.
    pub fn reduce(self: &Arc<Self>, cyclic: &[i64]) -> Cyclotomic {
        let mut coeffs = vec![0i64; self.degree()];
        for (j, &c) in cyclic.iter().enumerate() {
            if c != 0 {
                for (k, &p) in self.powers[j % self.conductor].iter().enumerate() {
                    coeffs[k] += c * p;
                }
            }
        }
        Cyclotomic {
            field: Arc::clone(self),
            coeffs,
        }
    }

    pub fn zero(self: &Arc<Self>) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(self),
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn integer(self: &Arc<Self>, n: i64) -> Cyclotomic {
        let mut z = self.zero();
        z.coeffs[0] = n;
        z
    }

    /// `ζ^j`.
    pub fn root(self: &Arc<Self>, j: usize) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(self),
            coeffs: self.powers[j % self.conductor].clone(),
        }
    }
}

#[derive(Clone)]
pub struct Cyclotomic {
    field: Arc<CyclotomicField>,
    coeffs: Vec<i64>,
}

impl std::fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cyclotomic(e={}, {:?})", self.field.conductor, self.coeffs)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.coeffs == other.coeffs
    }
}

impl Eq for Cyclotomic {}

impl PartialOrd for Cyclotomic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cyclotomic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.field
            .conductor
            .cmp(&other.field.conductor)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl Cyclotomic {
    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        debug_assert_eq!(self.field.conductor, other.field.conductor);
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// Adds `k · self · other` into an accumulator indexed mod `x^e − 1`.
    pub fn mul_into(&self, other: &Cyclotomic, k: i64, acc: &mut [i64]) {
        let e = self.field.conductor;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    acc[(i + j) % e] += k * a * b;
                }
            }
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        let mut acc = vec![0i64; self.field.conductor];
        self.mul_into(other, 1, &mut acc);
        self.field.reduce(&acc)
    }

    /// Complex conjugation `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Cyclotomic {
        let e = self.field.conductor;
        let mut acc = vec![0i64; e];
        for (i, &a) in self.coeffs.iter().enumerate() {
            acc[(e - i) % e] += a;
        }
        self.field.reduce(&acc)
    }

    pub fn to_complex(&self) -> Complex64 {
        let e = self.field.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * j as f64 / e))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let mut memo = HashMap::new();
        assert_eq!(cyclotomic_poly(1, &mut memo), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4, &mut memo), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6, &mut memo), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12, &mut memo), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_sum_to_zero() {
        for e in [2usize, 3, 5, 6, 8, 12, 15] {
            let f = CyclotomicField::get(e);
            let sum = (0..e).fold(f.zero(), |acc, j| acc.add(&f.root(j)));
            assert!(sum.is_zero(), "e = {e}");
        }
    }

    #[test]
    fn conj_and_product_match_complex_values() {
        let f = CyclotomicField::get(12);
        let a = f.root(5).add(&f.root(2).scale(3));
        let b = f.root(7).add(&f.integer(-2));
        let ab = a.mul(&b);
        assert!((ab.to_complex() - a.to_complex() * b.to_complex()).norm() < 1e-9);
        assert!((a.conj().to_complex() - a.to_complex().conj()).norm() < 1e-9);
        assert_eq!(a.mul(&a.conj()).conj(), a.mul(&a.conj()));
    }
}
