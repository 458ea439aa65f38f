use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use wallcross::specflow::{
    self, kernel_dim_on, kernel_dim_pullback, mat2, scalar, split_double_cover, CrossingOptions,
    OperatorPath, OperatorSpec, Sheet,
};

fn aeps(a: f64) -> OperatorSpec {
    OperatorSpec::dbar().with_c([0, 0], mat2([[0.0, a], [-a, 0.0]]))
}

fn opts(n: usize) -> CrossingOptions {
    CrossingOptions {
        truncation: Some(n),
        ..Default::default()
    }
}

fn sheet_of(shift: [u8; 2]) -> Sheet {
    if shift == [0, 0] {
        Sheet::BASE
    } else {
        Sheet::anti_invariant(shift).unwrap()
    }
}

fn entry() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(|k| k as f64 / 8.0)
}

fn mat() -> impl Strategy<Value = [[f64; 2]; 2]> {
    [[entry(), entry()], [entry(), entry()]]
}

/// Zeroth-order terms on modes of radius at most one.
fn random_spec() -> impl Strategy<Value = OperatorSpec> {
    (mat(), mat(), mat(), 0usize..3).prop_map(|(b, c0, c1, which)| {
        let mode = [[1, 0], [0, 1], [1, 1]][which];
        OperatorSpec::dbar()
            .with_b([0, 0], mat2(b))
            .with_c([0, 0], mat2(c0))
            .with_c(mode, mat2(c1))
    })
}

fn shift() -> impl Strategy<Value = [u8; 2]> {
    prop::sample::select(vec![[0, 0], [1, 0], [0, 1], [1, 1]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_family_kernel_is_stable(x in -2i32..=2, y in -2i32..=2, s in shift()) {
        let doubled = [2 * x + s[0] as i32, 2 * y + s[1] as i32];
        let n2 = doubled[0] * doubled[0] + doubled[1] * doubled[1];
        prop_assume!(n2 > 0);
        let a = PI * (n2 as f64).sqrt() / 2.0;
        let mut count = 0;
        for u in -8i32..=8 {
            for v in -8i32..=8 {
                let (p, q) = (2 * u + s[0] as i32, 2 * v + s[1] as i32);
                if p * p + q * q == n2 {
                    count += 1;
                }
            }
        }
        let sheet = sheet_of(s);
        let k4 = kernel_dim_on(&aeps(a), sheet, 4, 1e-8).unwrap();
        let k8 = kernel_dim_on(&aeps(a), sheet, 8, 1e-8).unwrap();
        prop_assert_eq!(k4, 2 * count);
        prop_assert_eq!(k8, k4);
    }

    #[test]
    fn pullback_kernel_splits(spec in random_spec(), which in 0usize..3, n in 3usize..=4) {
        let eps = Sheet::COVERS[which];
        let (plus, minus) = split_double_cover(&spec, eps).unwrap();
        let total = kernel_dim_pullback(&spec, eps, n, 1e-8).unwrap();
        prop_assert_eq!(total, plus.kernel_dim(n, 1e-8).unwrap() + minus.kernel_dim(n, 1e-8).unwrap());
    }

    #[test]
    fn sign_is_multiplicative(a in 0.2f64..7.0, b in 0.2f64..7.0, c in 0.2f64..7.0, s in shift()) {
        let sheet = sheet_of(s);
        let o = opts(4);
        let p = OperatorPath::segment(aeps(a), aeps(b));
        let q = OperatorPath::segment(aeps(b), aeps(c));
        let direct = OperatorPath::segment(aeps(a), aeps(c));
        let (sp, sq, sd) = match (
            specflow::sign_path(&p, sheet, &o),
            specflow::sign_path(&q, sheet, &o),
            specflow::sign_path(&direct, sheet, &o),
        ) {
            (Ok(x), Ok(y), Ok(z)) => (x, y, z),
            // an endpoint landed on the spectrum
            _ => return Ok(()),
        };
        prop_assert_eq!(sp * sq, sd);
        prop_assert_eq!(specflow::sign_path(&p.reversed(), sheet, &o).unwrap(), sp);
    }

}

proptest! {
    // each case scans two coupled paths over three sheets
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn w21_is_additive(c in mat(), via in random_spec()) {
        let o = opts(3);
        let alpha = OperatorSpec::reference().with_c([1, 0], mat2(c));
        let beta = OperatorSpec::reference();
        let direct = OperatorPath::segment(alpha.clone(), beta.clone());
        let detour = OperatorPath::new(vec![alpha, via, beta]);
        let (Ok(a), Ok(b)) = (specflow::w21(&direct, &o), specflow::w21(&detour, &o)) else {
            return Ok(());
        };
        prop_assert_eq!(a, b);
        let back = specflow::anti_invariant_flow(&direct.reversed(), &o).unwrap();
        prop_assert_eq!(back.total, -a);
    }
}

#[test]
fn complex_linear_operators_have_sign_one() {
    let o = opts(4);
    for z in [Complex64::new(0.3, 0.1), Complex64::new(-2.0, 5.0), Complex64::new(10.0, 0.0)] {
        let spec = OperatorSpec::dbar().with_b([0, 0], scalar(z));
        assert_eq!(specflow::sign(&spec, &o).unwrap(), 1);
    }
}

#[test]
fn kernel_dimension_matches_constant_family_count() {
    // π|m| = π√5 on the base: (±1, ±2), (±2, ±1)
    let a = PI * 5f64.sqrt();
    assert_eq!(kernel_dim_on(&aeps(a), Sheet::BASE, 6, 1e-8).unwrap(), 16);
    assert_eq!(kernel_dim_on(&aeps(a + 1e-3), Sheet::BASE, 6, 1e-8).unwrap(), 0);
}
