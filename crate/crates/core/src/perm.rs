//! Permutations of `{0, .., n-1}` stored inline in one-line notation.
//!
//! The public (JSON) surface is 1-based; internally every point is 0-based.
//! Composition follows the right-to-left convention: `p.compose(&q)` applies
//! `q` first, so `(p * q)(i) = p(q(i))`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm {
    len: u8,
    img: [u8; MAX_DEGREE],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("not a permutation of 1..={0}: {1:?}")]
    NotABijection(usize, Vec<usize>),
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_DEGREE, "degree {n} exceeds {MAX_DEGREE}");
        let mut img = [0u8; MAX_DEGREE];
        for (i, slot) in img.iter_mut().enumerate().take(n) {
            *slot = i as u8;
        }
        Perm { len: n as u8, img }
    }

    /// Builds from 0-based images.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(n));
        }
        let mut seen = [false; MAX_DEGREE];
        let mut img = [0u8; MAX_DEGREE];
        for (i, &x) in images.iter().enumerate() {
            if x >= n || seen[x] {
                return Err(PermError::NotABijection(
                    n,
                    images.iter().map(|v| v + 1).collect(),
                ));
            }
            seen[x] = true;
            img[i] = x as u8;
        }
        Ok(Perm { len: n as u8, img })
    }

    /// Builds from 1-based one-line notation.
    pub fn from_one_line(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        if images.iter().any(|&x| x == 0 || x > n) {
            return Err(PermError::NotABijection(n, images.to_vec()));
        }
        let zero: Vec<usize> = images.iter().map(|&x| x - 1).collect();
        Self::from_images(&zero)
    }

    /// Builds from disjoint cycles given with 1-based points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                if x == 0 || x > n || y == 0 || y > n {
                    return Err(PermError::NotABijection(n, cycle.to_vec()));
                }
                images[x - 1] = y - 1;
            }
        }
        Self::from_images(&images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.img[i] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u8] {
        &self.img[..self.len as usize]
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images().iter().map(|&x| x as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images().iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`: apply `other`, then `self`.
    #[inline]
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len, other.len);
        let mut img = [0u8; MAX_DEGREE];
        for (i, slot) in img.iter_mut().enumerate().take(self.len as usize) {
            *slot = self.img[other.img[i] as usize];
        }
        Perm { len: self.len, img }
    }

    #[inline]
    pub fn inverse(&self) -> Perm {
        let mut img = [0u8; MAX_DEGREE];
        for i in 0..self.len as usize {
            img[self.img[i] as usize] = i as u8;
        }
        Perm { len: self.len, img }
    }

    /// `sigma ∘ self ∘ sigma⁻¹`.
    #[inline]
    pub fn conjugate_by(&self, sigma: &Perm) -> Perm {
        let mut img = [0u8; MAX_DEGREE];
        for i in 0..self.len as usize {
            img[sigma.img[i] as usize] = sigma.img[self.img[i] as usize];
        }
        Perm { len: self.len, img }
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Perm, b: &Perm) -> Perm {
        a.compose(b).compose(&a.inverse()).compose(&b.inverse())
    }

    pub fn pow(&self, k: usize) -> Perm {
        let mut acc = Perm::identity(self.degree());
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// Cycle lengths in non-increasing order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = [false; MAX_DEGREE];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn order(&self) -> usize {
        self.cycle_type()
            .into_iter()
            .fold(1, num_integer::lcm)
    }

    pub fn is_even(&self) -> bool {
        let n = self.degree();
        let cycles = self.cycle_type().len();
        (n - cycles) % 2 == 0
    }

    /// Lexicographic rank among all permutations of the same degree.
    pub fn rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0usize;
        let mut used = 0u32;
        for i in 0..n {
            let x = self.img[i] as u32;
            let smaller = (used & ((1u32 << x) - 1)).count_ones();
            let less_unused = x - smaller;
            rank = rank * (n - i) + less_unused as usize;
            used |= 1 << x;
        }
        rank
    }

    /// Inverse of [`Perm::rank`].
    pub fn unrank(n: usize, mut rank: usize) -> Perm {
        let mut fact = vec![1usize; n + 1];
        for i in 1..=n {
            fact[i] = fact[i - 1] * i;
        }
        let mut avail: Vec<usize> = (0..n).collect();
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let f = fact[n - 1 - i];
            let idx = rank / f;
            rank %= f;
            images.push(avail.remove(idx));
        }
        Perm::from_images(&images).expect("unrank produces a bijection")
    }

    /// All permutations of degree `n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let total: usize = (1..=n).product();
        (0..total).map(|r| Perm::unrank(n, r)).collect()
    }
}

impl Ord for Perm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.images().cmp(other.images()))
    }
}

impl PartialOrd for Perm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, 1-based, fixed points omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = [false; MAX_DEGREE];
        let mut wrote = false;
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_line().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        Perm::from_one_line(&v).map_err(serde::de::Error::custom)
    }
}
