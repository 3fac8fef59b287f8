//! Database and formula invariants over generated inputs.

mod common;

use proptest::prelude::*;

use top_nlidb::tdb::{load_database, DbError};
use top_nlidb::timecore::TimePoint;
use top_nlidb::topast::{
    alpha_eq, cancel_culm_under_for, canonicalize, free_vars, parse_formula, render, Formula, Pred, Term, VerbClass,
};

fn rename(f: &Formula) -> Formula {
    let v = |x: &str| format!("{x}_r");
    let t = |a: &Term| match a {
        Term::Var(x) => Term::Var(v(x)),
        c => c.clone(),
    };
    let p = |p: &Pred| Pred::new(&p.symbol, p.args.iter().map(t).collect());
    let b = |g: &Formula| Box::new(rename(g));
    match f {
        Formula::Pred(q) => Formula::Pred(p(q)),
        Formula::Culm(q) => Formula::Culm(p(q)),
        Formula::Begin(g) => Formula::Begin(b(g)),
        Formula::End(g) => Formula::End(b(g)),
        Formula::Past(e, g) => Formula::Past(v(e), b(g)),
        Formula::Pres(e, g) => Formula::Pres(v(e), b(g)),
        Formula::Perf(e, g) => Formula::Perf(v(e), b(g)),
        Formula::At(s, g) => Formula::At(s.clone(), b(g)),
        Formula::For(u, n, g) => Formula::For(*u, *n, b(g)),
        Formula::Exists(x, r, g) => Formula::Exists(v(x), r.iter().map(p).collect(), b(g)),
        Formula::Interrog(x, r, g) => Formula::Interrog(v(x), r.iter().map(p).collect(), b(g)),
        Formula::InterrogMxl(e, g) => Formula::InterrogMxl(v(e), b(g)),
    }
}

fn has_culm_under_for(f: &Formula, under: bool) -> bool {
    match f {
        Formula::Culm(_) => under,
        Formula::For(_, _, g) => has_culm_under_for(g, true),
        _ => f.children().is_some_and(|g| has_culm_under_for(g, under)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn denotation_agrees_with_snapshots(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let axis = common::random_axis(&mut r, 60);
        let db = common::random_db(&mut r, axis);
        for rel in db.relations() {
            let pattern: Vec<Term> = (0..rel.arity).map(|i| Term::Var(format!("v{i}"))).collect();
            let rows = db.denotation(&rel.predicate, &pattern).unwrap();
            for t in 0..=db.axis().horizon() {
                let snap = db.snapshot(&rel.predicate, TimePoint(t)).unwrap();
                let from_rows: std::collections::BTreeSet<Vec<String>> = rows
                    .iter()
                    .filter(|row| row.valid.contains_point(t))
                    .map(|row| (0..rel.arity).map(|i| row.bindings[&format!("v{i}")].clone()).collect())
                    .collect();
                prop_assert_eq!(snap, from_rows);
            }
        }
    }

    #[test]
    fn stored_tuples_are_coalesced(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let axis = common::random_axis(&mut r, 100);
        let db = common::random_db(&mut r, axis);
        for rel in db.relations() {
            let mut seen = std::collections::BTreeSet::new();
            for t in &rel.tuples {
                prop_assert!(seen.insert(t.values.clone()), "duplicate value tuple");
                for w in t.valid.periods().windows(2) {
                    prop_assert!(w[0].end() + 1 < w[1].start());
                }
                for c in &t.climaxes {
                    prop_assert!(t.valid.periods().iter().any(|p| p.end() == *c));
                }
                if rel.class != VerbClass::CulmActivity {
                    prop_assert!(t.climaxes.is_empty());
                }
            }
        }
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>()) {
        let (_, f, _) = common::random_case(seed, 60);
        let text = render(&f);
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(&back, &f, "{}", text);
        prop_assert!(free_vars(&f).is_empty());
    }

    #[test]
    fn alpha_equivalence_ignores_variable_names(seed in any::<u64>()) {
        let (_, f, _) = common::random_case(seed, 60);
        let g = rename(&f);
        prop_assert!(alpha_eq(&f, &g));
        prop_assert_eq!(canonicalize(&canonicalize(&f)), canonicalize(&f));
        prop_assert_eq!(canonicalize(&g), canonicalize(&f));
    }

    #[test]
    fn culm_never_survives_under_for(seed in any::<u64>()) {
        let (_, f, _) = common::random_case(seed, 60);
        let g = cancel_culm_under_for(&f);
        prop_assert!(!has_culm_under_for(&g, false));
        prop_assert_eq!(cancel_culm_under_for(&g), g.clone());
        if !has_culm_under_for(&f, false) {
            prop_assert_eq!(g, f);
        }
    }
}

#[test]
fn climax_must_end_a_maximal_period() {
    let text = "axis 1/1/1994 31/1/1994 day\nrelation fixing/2 culm_activity\n\
                tuple fixing john eng2 valid=2/1/1994..9/1/1994 climax=5/1/1994\n";
    assert!(matches!(load_database(text), Err(DbError::Validation { .. })));
}

#[test]
fn adjacent_tuples_merge() {
    let text = "axis 1/1/1994 31/1/1994 day\nrelation contain/2 state\n\
                tuple contain tank2 water valid=2/1/1994..4/1/1994\n\
                tuple contain tank2 water valid=5/1/1994..9/1/1994\n";
    let db = load_database(text).unwrap();
    let rel = db.relation("contain").unwrap();
    assert_eq!(rel.tuples.len(), 1);
    assert_eq!(rel.tuples[0].valid.periods().len(), 1);
}
