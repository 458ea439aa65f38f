use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use wallcross::gvseries::{
    bps_from_gw, euler_wallcross, gw_from_bps, parse_rational, format_rational, sine_power, BpsTable,
    GvError, GwTable,
};

fn table(d_max: usize, h_max: usize) -> impl Strategy<Value = BpsTable> {
    prop::collection::vec(prop::collection::vec(-30i64..=30, h_max + 1), d_max).prop_map(move |n| BpsTable {
        d_max,
        h_max,
        n,
    })
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip(n in table(3, 2)) {
        let gw = gw_from_bps(&n, 16).unwrap();
        let back = bps_from_gw(&gw, 16).unwrap();
        prop_assert!(back.is_integral());
        prop_assert_eq!(back.to_table(), Some(n));
    }

    #[test]
    fn forward_map_is_linear(a in table(3, 2), b in table(3, 2)) {
        let mut sum = BpsTable::zeros(3, 2);
        for d in 1..=3 {
            for h in 0..=2 {
                sum.set(d, h, a.get(d, h) + b.get(d, h));
            }
        }
        let (ga, gb, gs) = (gw_from_bps(&a, 16).unwrap(), gw_from_bps(&b, 16).unwrap(), gw_from_bps(&sum, 16).unwrap());
        for d in 1..=3 {
            for g in 0..=2 {
                prop_assert_eq!(gs.get(d, g), ga.get(d, g) + gb.get(d, g));
            }
        }
    }

    /// `GW[d][g]` depends only on `n[k][h]` with `k | d` and `h ≤ g`.
    #[test]
    fn triangularity(n in table(4, 2), d in 1usize..=4, h in 0usize..=2, bump in 1i64..5) {
        let mut m = n.clone();
        m.set(d, h, n.get(d, h) + bump);
        let (a, b) = (gw_from_bps(&n, 16).unwrap(), gw_from_bps(&m, 16).unwrap());
        for e in 1..=4 {
            for g in 0..=2 {
                if e % d != 0 || g < h {
                    prop_assert_eq!(a.get(e, g), b.get(e, g));
                }
            }
        }
        prop_assert_ne!(a.get(d, h), b.get(d, h));
    }

    #[test]
    fn sine_powers_are_even(k in 1u32..6, h in 0u32..4) {
        let s = sine_power(k, h, 14);
        prop_assert_eq!(s.valuation(), Some(2 * h as i32 - 2));
        for order in -2..=14 {
            if order % 2 != 0 {
                prop_assert!(s.coeff(order).is_zero());
            }
        }
        // leading coefficient k^{2h−2}
        let lead = num_traits::pow(BigRational::from_integer(k.into()), 2 * h as usize)
            / BigRational::from_integer((k * k).into());
        prop_assert_eq!(s.coeff(2 * h as i32 - 2), lead);
    }

    #[test]
    fn euler_change_is_additive(
        e in -10i64..10,
        xs in prop::collection::vec((prop::sample::select(vec![1i32, -1]), 1u64..5), 0..8),
        split in 0usize..8,
    ) {
        let e0 = BigRational::from_integer(e.into());
        let split = split.min(xs.len());
        let mid = euler_wallcross(&e0, &xs[..split]).unwrap();
        let end = euler_wallcross(&mid, &xs[split..]).unwrap();
        prop_assert_eq!(&end, &euler_wallcross(&e0, &xs).unwrap());
        let expected = xs.iter().fold(e0, |acc, &(s, a)| acc + q(2 * s as i64, a as i64));
        prop_assert_eq!(end, expected);
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = q(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn aspinwall_morrison_multiple_covers() {
    // a single rigid rational curve: GW[d][0] = 1/d³
    let mut n = BpsTable::zeros(5, 0);
    n.set(1, 0, 1);
    let gw = gw_from_bps(&n, 12).unwrap();
    for d in 1..=5i64 {
        assert_eq!(gw.get(d as usize, 0), q(1, d * d * d));
    }
}

#[test]
fn non_integral_input_is_reported() {
    let mut gw = GwTable::zeros(2, 0);
    gw.gw[0][0] = q(1, 2);
    let inv = bps_from_gw(&gw, 12).unwrap();
    assert!(!inv.is_integral());
    // n[2][0] = 0 − n[1][0]/8 inherits the denominator
    assert_eq!(inv.non_integral, vec![(1, 0), (2, 0)]);
}

#[test]
fn small_window_is_rejected() {
    let n = BpsTable::zeros(2, 6);
    assert!(matches!(gw_from_bps(&n, 4), Err(GvError::WindowTooSmall { .. })));
}
