use std::collections::BTreeMap;

use num_rational::Rational64;
use proptest::prelude::*;
use wallcross::bifurcation::{
    net_change, petri_min_exponent, replay, zeros_of_model, BifurcationError, Curve, CurveClass,
    CurveLedger, KuranishiNormalForm, WallCrossingEvent,
};

fn model() -> impl Strategy<Value = KuranishiNormalForm> {
    (prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], 1u32..=8, 1u32..=2)
        .prop_filter_map("odd n with Γ = Z/2", |(c, n, g)| KuranishiNormalForm::new(c, n, g).ok())
}

fn sign() -> impl Strategy<Value = i32> {
    prop::sample::select(vec![1, -1])
}

fn host(id: u32, genus: u32, s: i32) -> Curve {
    Curve {
        id: Some(id),
        class: CurveClass::A,
        genus,
        sign: s,
        w: BTreeMap::new(),
        host: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn zeros_solve_the_model(f in model(), t in prop_oneof![-3.0f64..-0.01, 0.01f64..3.0]) {
        for z in zeros_of_model(&f, t) {
            let value = z.root * (t - f.c * z.root.powi(f.n as i32));
            prop_assert!(value.abs() < 1e-9 * (1.0 + t.abs()), "residual {value}");
            prop_assert!(z.root != 0.0);
            prop_assert_eq!(z.sign, if t > 0.0 { -1 } else { 1 });
            if f.gamma_order == 2 {
                prop_assert!(z.root > 0.0);
            }
        }
    }

    #[test]
    fn net_change_depends_only_on_sign_and_isotropy(f in model(), s in sign()) {
        let v = net_change(&f, s).unwrap();
        prop_assert_eq!(v, Rational64::new(-2 * s as i64, f.gamma_order as i64));
        // the counts on each side do not depend on |t|
        for t in [0.1, 1.0, 10.0] {
            prop_assert_eq!(zeros_of_model(&f, t).len(), zeros_of_model(&f, 1.0).len());
            prop_assert_eq!(zeros_of_model(&f, -t).len(), zeros_of_model(&f, -1.0).len());
        }
    }

    #[test]
    fn petri_exponent_is_minimal(
        x in prop::collection::btree_set(-40i32..=40, 1..=8),
        y in prop::collection::vec(-4i32..=4, 8),
    ) {
        let x: Vec<f64> = x.into_iter().filter(|&v| v != 0).map(|v| v as f64 / 8.0).collect();
        prop_assume!(!x.is_empty());
        let y: Vec<f64> = y[..x.len()].iter().map(|&v| v as f64).collect();
        prop_assume!(y.iter().any(|&v| v != 0.0));
        let n = petri_min_exponent(&x, &y).unwrap();
        prop_assert!(n >= 1 && n <= x.len());
        // x/8 and small integers: the power sums are exact in f64 up to 2^53
        let sum = |k: i32| x.iter().zip(&y).map(|(a, b)| a.powi(k + 1) * b).sum::<f64>();
        for k in 1..n as i32 {
            prop_assert_eq!(sum(k), 0.0);
        }
    }

    #[test]
    fn ledger_replay_keeps_gr(
        hosts in prop::collection::vec((0u32..3, sign()), 1..4),
        events in prop::collection::vec((0usize..4, sign(), 1u32..=2, 0u32..4, sign()), 0..20),
    ) {
        let ledger = CurveLedger {
            curves: hosts.iter().enumerate().map(|(i, &(g, s))| host(i as u32, g, s)).collect(),
            events: Vec::new(),
        };
        let events: Vec<WallCrossingEvent> = events
            .into_iter()
            .map(|(i, s, gamma, extra, dir)| {
                let (g, _) = hosts[i % hosts.len()];
                WallCrossingEvent {
                    host: (i % hosts.len()) as u32,
                    sign: s,
                    gamma_order: gamma,
                    genus: g + extra,
                    direction: dir,
                    host_sign: None,
                }
            })
            .collect();
        let report = replay(&ledger, &events).unwrap();
        prop_assert!(report.invariant);
        prop_assert_eq!(report.gr_before, report.gr_after);
        prop_assert_eq!(report.ledger.events.len(), events.len());
        // a there-and-back sequence restores the ledger's curves
        let mut back = events.clone();
        back.reverse();
        for e in &mut back {
            e.direction = -e.direction;
        }
        let round = replay(&report.ledger, &back).unwrap();
        let strip = |l: &CurveLedger| {
            let mut c: Vec<(CurveClass, u32, i32, BTreeMap<u32, i64>)> =
                l.curves.iter().map(|c| (c.class, c.genus, c.sign, c.w.clone())).collect();
            c.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
            c
        };
        prop_assert_eq!(strip(&round.ledger), strip(&ledger.clone().normalized().unwrap()));
    }
}

#[test]
fn odd_exponent_needs_trivial_isotropy() {
    assert!(matches!(
        KuranishiNormalForm::new(1.0, 3, 2),
        Err(BifurcationError::InvalidModel(_))
    ));
    assert!(KuranishiNormalForm::new(0.0, 2, 1).is_err());
    assert!(serde_json::from_str::<KuranishiNormalForm>(r#"{"c":1.0,"n":3,"gamma_order":2}"#).is_err());
    assert!(serde_json::from_str::<KuranishiNormalForm>(r#"{"c":1.0,"n":2,"gamma_order":2,"x":0}"#).is_err());
}

#[test]
fn event_with_wrong_host_sign_is_rejected() {
    let ledger = CurveLedger {
        curves: vec![host(0, 0, 1)],
        events: Vec::new(),
    };
    let e = WallCrossingEvent {
        host: 0,
        sign: 1,
        gamma_order: 2,
        genus: 0,
        direction: 1,
        host_sign: Some(-1),
    };
    assert!(matches!(ledger.cross(&e), Err(BifurcationError::HostSignMismatch { .. })));
    let missing = WallCrossingEvent { host: 7, host_sign: None, ..e };
    assert!(matches!(ledger.cross(&missing), Err(BifurcationError::HostMissing(7))));
}
