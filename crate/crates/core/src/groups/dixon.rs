//! Dixon–Schneider: central characters as common eigenvectors of the class
//! multiplication matrices over `F_p`, then an exact lift through the
//! eigenvalue multiplicities of each class representative.

use super::modp::{splitting_prime, Fp};
use super::{FiniteGroup, GroupError};

/// A subspace of `F_p^n` kept as a reduced row echelon basis.
struct Subspace {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

/// `(M_i)_{jk} = #{x ∈ C_i : x⁻¹ z_k ∈ C_j}` with `z_k` the representative of
/// class `k`, so that `M_i ω = ω_i ω` for every central character `ω`.
fn class_matrix(g: &FiniteGroup, i: usize) -> Vec<Vec<u64>> {
    let nc = g.class_count();
    let mut m = vec![vec![0u64; nc]; nc];
    for k in 0..nc {
        let z = g.classes[k].representative;
        for &x in &g.classes[i].elements {
            let y = g.elements[x].inverse().compose(&z);
            let j = g.class_of_perm(&y);
            m[j][k] += 1;
        }
    }
    m
}

/// Cyclotomic character values, one row per irreducible, one column per class.
pub(super) struct RawTable {
    pub degrees: Vec<usize>,
    /// Eigenvalue multiplicities: `multiplicities[a][k][l]` is how often `ζ_e^l`
    /// occurs as an eigenvalue of `ρ_a(g_k)`.
    pub multiplicities: Vec<Vec<Vec<i64>>>,
}

pub(super) fn compute(g: &FiniteGroup) -> Result<RawTable, GroupError> {
    let nc = g.class_count();
    let order = g.order() as u64;
    let e = g.exponent() as u64;
    let f = Fp {
        p: splitting_prime(e, order.max(2)),
    };
    let mut pending = vec![Subspace {
        rows: (0..nc)
            .map(|i| {
                let mut v = vec![0u64; nc];
                v[i] = 1;
                v
            })
            .collect(),
        pivots: (0..nc).collect(),
    }];
    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut next_class = 1;
    while !pending.is_empty() {
        pending.retain(|w| {
            if w.rows.len() == 1 {
                done.push(w.rows[0].clone());
                false
            } else {
                true
            }
        });
        if pending.is_empty() {
            break;
        }
        if next_class >= nc {
            return Err(GroupError::ValidationFailed(
                "class matrices fail to separate the central characters".into(),
            ));
        }
        let m = class_matrix(g, next_class);
        next_class += 1;
        let mut split = Vec::new();
        for w in pending.drain(..) {
            split.extend(split_subspace(&f, &m, w)?);
        }
        pending = split;
    }
    if done.len() != nc {
        return Err(GroupError::ValidationFailed(format!(
            "found {} central characters for {} classes",
            done.len(),
            nc
        )));
    }

    // Primitive e-th root of unity in F_p, identified with ζ_e.
    let z = f.pow(f.primitive_root(), (f.p - 1) / e);
    let class_sizes: Vec<u64> = g.classes.iter().map(|c| c.elements.len() as u64).collect();
    let inv_class = g.inverse_class();
    let mut degrees = Vec::with_capacity(nc);
    let mut multiplicities = Vec::with_capacity(nc);
    for mut w in done {
        // normalize so that ω at the identity class is 1
        let s = f.inv(w[0]);
        for x in &mut w {
            *x = f.mul(*x, s);
        }
        // |G| / χ(1)² = Σ_k ω_k ω_{k*} / |C_k|
        let mut sum = 0u64;
        for k in 0..nc {
            let t = f.mul(f.mul(w[k], w[inv_class[k]]), f.inv(class_sizes[k] % f.p));
            sum = f.add(sum, t);
        }
        let deg_sq = f.mul(order % f.p, f.inv(sum));
        let deg = (deg_sq as f64).sqrt().round() as u64;
        if deg == 0 || deg * deg != deg_sq || deg * deg > order {
            return Err(GroupError::ValidationFailed(format!(
                "degree square {} is not a square not exceeding |G|",
                deg_sq
            )));
        }
        let chi: Vec<u64> = (0..nc)
            .map(|k| f.mul(f.mul(deg, w[k]), f.inv(class_sizes[k] % f.p)))
            .collect();
        let mut rows = Vec::with_capacity(nc);
        for k in 0..nc {
            let o = g.classes[k].order as u64;
            let step = e / o;
            let zo = f.pow(z, step);
            let inv_o = f.inv(o % f.p);
            let powers = &g.power_classes[k];
            let mut mult = vec![0i64; e as usize];
            let mut total = 0u64;
            for l in 0..o {
                let mut s = 0u64;
                for j in 0..o {
                    let root = f.pow(zo, (o - (l * j) % o) % o);
                    s = f.add(s, f.mul(chi[powers[j as usize]], root));
                }
                let m = f.mul(s, inv_o);
                if m > deg {
                    return Err(GroupError::ValidationFailed(format!(
                        "eigenvalue multiplicity {} exceeds the degree {}",
                        m, deg
                    )));
                }
                total += m;
                mult[(l * step) as usize] = m as i64;
            }
            if total != deg {
                return Err(GroupError::ValidationFailed(
                    "eigenvalue multiplicities do not sum to the degree".into(),
                ));
            }
            rows.push(mult);
        }
        degrees.push(deg as usize);
        multiplicities.push(rows);
    }
    Ok(RawTable {
        degrees,
        multiplicities,
    })
}

fn split_subspace(f: &Fp, m: &[Vec<u64>], w: Subspace) -> Result<Vec<Subspace>, GroupError> {
    let dim = w.rows.len();
    // images M b for each basis vector b (columns of the restriction)
    let images: Vec<Vec<u64>> = w
        .rows
        .iter()
        .map(|b| {
            m.iter()
                .map(|row| {
                    row.iter()
                        .zip(b)
                        .fold(0u64, |acc, (&x, &y)| f.add(acc, f.mul(x % f.p, y)))
                })
                .collect()
        })
        .collect();
    // restriction R[r][c] = (M b_c)[pivot_r]
    let restricted: Vec<Vec<u64>> = (0..dim)
        .map(|r| (0..dim).map(|c| images[c][w.pivots[r]]).collect())
        .collect();
    let cp = f.charpoly(&restricted);
    let roots = f.roots(&cp);
    let mut out = Vec::new();
    let mut total = 0;
    for lambda in roots {
        let shifted: Vec<Vec<u64>> = restricted
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, &x)| if r == c { f.sub(x, lambda) } else { x })
                    .collect()
            })
            .collect();
        let kernel = f.nullspace(&shifted);
        if kernel.is_empty() {
            continue;
        }
        total += kernel.len();
        let mut rows: Vec<Vec<u64>> = kernel
            .iter()
            .map(|coords| {
                let mut v = vec![0u64; m.len()];
                for (c, &a) in coords.iter().enumerate() {
                    if a != 0 {
                        for (x, &b) in v.iter_mut().zip(&w.rows[c]) {
                            *x = f.add(*x, f.mul(a, b));
                        }
                    }
                }
                v
            })
            .collect();
        let pivots = f.rref(&mut rows);
        out.push(Subspace { rows, pivots });
    }
    if total != dim {
        return Err(GroupError::ValidationFailed(
            "class matrix is not diagonalizable over the splitting prime".into(),
        ));
    }
    Ok(out)
}
