//! Dense linear algebra over a prime field `F_p` with `p < 2^32`.

#[derive(Debug, Clone, Copy)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut k: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    /// Least non-negative representative interpreted as lying in `(−p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// A generator of `F_p^×`.
    pub fn primitive_root(&self) -> u64 {
        let n = self.p - 1;
        let factors = prime_factors(n);
        (2..self.p)
            .find(|&g| factors.iter().all(|&q| self.pow(g, n / q) != 1))
            .unwrap_or(1)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&self, rows: &mut Vec<Vec<u64>>) -> Vec<usize> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
                continue;
            };
            rows.swap(r, k);
            let inv = self.inv(rows[r][c]);
            for x in rows[r].iter_mut() {
                *x = self.mul(*x, inv);
            }
            let pivot_row = rows[r].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k != r && row[c] != 0 {
                    let f = row[c];
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x = self.sub(*x, self.mul(f, y));
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        pivots
    }

    /// Basis of the right null space `{v : A v = 0}` of a square or
    /// rectangular matrix given by rows.
    pub fn nullspace(&self, a: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let ncols = a.first().map_or(0, |r| r.len());
        let mut m = a.to_vec();
        let pivots = self.rref(&mut m);
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u64; ncols];
            v[free] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = self.sub(0, row[free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Characteristic polynomial `det(xI − A)`, coefficients from the
    /// constant term up, via reduction to upper Hessenberg form.
    pub fn charpoly(&self, a: &[Vec<u64>]) -> Vec<u64> {
        let n = a.len();
        let mut h = a.to_vec();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
                continue;
            };
            if i != m {
                h.swap(i, m);
                for row in h.iter_mut() {
                    row.swap(i, m);
                }
            }
            let inv = self.inv(h[m][m - 1]);
            for i in (m + 1)..n {
                let u = self.mul(h[i][m - 1], inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = self.mul(u, h[m][j]);
                    h[i][j] = self.sub(h[i][j], t);
                }
                for row in h.iter_mut() {
                    let t = self.mul(u, row[i]);
                    row[m] = self.add(row[m], t);
                }
            }
        }
        // p_{m+1} = (x − h_mm) p_m − Σ_{i<m} h_im (Π_{j=i+1..m} h_{j,j−1}) p_i
        let mut polys: Vec<Vec<u64>> = vec![vec![1]];
        for m in 0..n {
            let mut next = vec![0u64; m + 2];
            for (k, &c) in polys[m].iter().enumerate() {
                next[k + 1] = self.add(next[k + 1], c);
                next[k] = self.sub(next[k], self.mul(h[m][m], c));
            }
            let mut t = 1u64;
            for i in (0..m).rev() {
                t = self.mul(t, h[i + 1][i]);
                let coef = self.mul(h[i][m], t);
                if coef != 0 {
                    for (k, &c) in polys[i].iter().enumerate() {
                        next[k] = self.sub(next[k], self.mul(coef, c));
                    }
                }
            }
            polys.push(next);
        }
        polys.pop().expect("at least the constant polynomial")
    }

    /// All roots in `F_p` by exhaustive evaluation.
    pub fn roots(&self, poly: &[u64]) -> Vec<u64> {
        (0..self.p)
            .filter(|&x| {
                poly.iter()
                    .rev()
                    .fold(0u64, |acc, &c| self.add(self.mul(acc, x), c))
                    == 0
            })
            .collect()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest prime `p ≡ 1 (mod e)` with `p > bound`.
pub fn splitting_prime(e: u64, bound: u64) -> u64 {
    let mut p = (bound / e + 1) * e + 1;
    while !is_prime(p) {
        p += e;
    }
    p
}
