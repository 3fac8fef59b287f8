//! Structural properties of the reference evaluator.

mod common;

use proptest::prelude::*;

use top_nlidb::timecore::Period;
use top_nlidb::topast::Formula;
use top_nlidb::topeval::{holds, satisfying_periods, Context};

/// The formula under any leading quantifiers, if it has no free variables.
fn closed_body(f: &Formula) -> Option<&Formula> {
    let mut body = f;
    while let Formula::Interrog(_, _, g) | Formula::InterrogMxl(_, g) | Formula::Exists(_, _, g) = body {
        body = g;
    }
    top_nlidb::topast::free_vars(body).is_empty().then_some(body)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn satisfying_periods_match_holds(seed in any::<u64>()) {
        let (db, f, st) = common::random_case(seed, 30);
        let Some(body) = closed_body(&f) else { return Ok(()) };
        let ctx = Context::initial(db.axis(), st);
        let sat = satisfying_periods(&db, body, &ctx).unwrap();
        let h = db.axis().horizon();
        for s in 0..=h {
            for e in s..=h {
                let p = Period::new(s, e).unwrap();
                prop_assert_eq!(sat.contains(&p), holds(&db, body, &ctx, p).unwrap(), "{} at {}", body, p);
            }
        }
    }

    /// Narrowing the localisation window only filters event times.
    #[test]
    fn windows_filter_event_times(seed in any::<u64>(), a in 0u32..40, b in 0u32..40) {
        let (db, f, st) = common::random_case(seed, 40);
        let Some(body) = closed_body(&f) else { return Ok(()) };
        let h = db.axis().horizon();
        let w = Period::new(a.min(b).min(h), a.max(b).min(h)).unwrap();
        let full = Context::initial(db.axis(), st);
        let narrow = Context { lt: Some(w), ..full.clone() };
        let all = satisfying_periods(&db, body, &full).unwrap();
        let mut want: Vec<Period> = all.into_iter().filter(|p| w.contains_period(p)).collect();
        let mut got = satisfying_periods(&db, body, &narrow).unwrap();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn past_event_times_precede_speech_time(seed in any::<u64>()) {
        let (db, f, st) = common::random_case(seed, 60);
        let Some(body) = closed_body(&f) else { return Ok(()) };
        let Formula::Past(..) = body else { return Ok(()) };
        let ctx = Context::initial(db.axis(), st);
        for p in satisfying_periods(&db, body, &ctx).unwrap() {
            prop_assert!(p.end() < st);
        }
    }
}
