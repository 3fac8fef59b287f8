//! Seeded generators of small databases and closed well-formed formulas.
#![allow(dead_code)]

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use top_nlidb::tdb::{Database, DatabaseBuilder};
use top_nlidb::timecore::{fmt_date, normalize, Axis, Granularity, Period, UnitName};
use top_nlidb::topast::{well_formed, Formula, Pred, Schema, TemporalPattern, Term, VerbClass};

pub const ENTITIES: [&str; 3] = ["a", "b", "c"];

/// Candidate relations; a database uses a random subset.
const POOL: [(&str, usize, VerbClass); 5] = [
    ("p", 1, VerbClass::State),
    ("q", 2, VerbClass::Activity),
    ("c", 2, VerbClass::CulmActivity),
    ("r", 1, VerbClass::CulmActivity),
    ("kind", 1, VerbClass::Timeless),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn origin() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).unwrap()
}

pub fn random_axis(rng: &mut impl Rng, max_horizon: u32) -> Axis {
    Axis::new(origin(), Granularity::Day, rng.gen_range(8..=max_horizon)).unwrap()
}

fn random_period(rng: &mut impl Rng, horizon: u32) -> Period {
    let start = rng.gen_range(0..=horizon);
    let len = rng.gen_range(0..=(horizon / 4).max(1));
    Period::new(start, (start + len).min(horizon)).unwrap()
}

fn tuple_values(rng: &mut impl Rng, arity: usize) -> Vec<&'static str> {
    (0..arity).map(|_| *ENTITIES.choose(rng).unwrap()).collect()
}

/// A database with one to four relations, at least one of them temporal.
pub fn random_db(rng: &mut impl Rng, axis: Axis) -> Database {
    let h = axis.horizon();
    let mut pool: Vec<_> = POOL.to_vec();
    pool.shuffle(rng);
    let n = rng.gen_range(1..=4);
    let mut chosen: Vec<_> = pool[..n].to_vec();
    if chosen.iter().all(|r| r.2 == VerbClass::Timeless) {
        chosen.push(POOL[0]);
    }
    let mut b = DatabaseBuilder::new(axis);
    for e in ENTITIES {
        b.entity(e);
    }
    for (name, arity, class) in &chosen {
        b.relation(name, *arity, *class).unwrap();
        for _ in 0..rng.gen_range(0..=4) {
            let values = tuple_values(rng, *arity);
            if *class == VerbClass::Timeless {
                b.tuple(name, &values, &[], &[]).unwrap();
                continue;
            }
            let periods: Vec<Period> = (0..rng.gen_range(1..=3)).map(|_| random_period(rng, h)).collect();
            // climaxes are added after coalescing, see add_climaxes
            b.tuple(name, &values, &periods, &[]).unwrap();
        }
    }
    let mut db = b.build().unwrap();
    add_climaxes(rng, &mut db);
    db
}

/// Rebuilds `db` with a random subset of maximal-period ends marked as
/// climaxes of its culminated-activity tuples.
fn add_climaxes(rng: &mut impl Rng, db: &mut Database) {
    let mut b = DatabaseBuilder::new(db.axis().clone());
    for e in db.entities() {
        b.entity(e);
    }
    for rel in db.relations() {
        b.relation(&rel.predicate, rel.arity, rel.class).unwrap();
        for t in &rel.tuples {
            let values: Vec<&str> = t.values.iter().map(String::as_str).collect();
            let merged = normalize(t.valid.periods().to_vec());
            let mut climaxes: Vec<u32> = t.climaxes.iter().copied().collect();
            if rel.class == VerbClass::CulmActivity {
                climaxes.extend(merged.periods().iter().filter(|_| rng.gen_bool(0.6)).map(|p| p.end()));
            }
            b.tuple(&rel.predicate, &values, merged.periods(), &climaxes).unwrap();
        }
    }
    *db = b.build().unwrap();
}

pub fn date_pattern(axis: &Axis, t: u32) -> TemporalPattern {
    let d = axis.origin() + Duration::days(i64::from(t));
    TemporalPattern::parse(&fmt_date(d)).unwrap()
}

struct FormulaGen<'a, R: Rng> {
    rng: &'a mut R,
    db: &'a Database,
    fresh: usize,
    scope: Vec<String>,
}

impl<R: Rng> FormulaGen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn term(&mut self) -> Term {
        if !self.scope.is_empty() && self.rng.gen_bool(0.6) {
            Term::Var(self.scope.choose(self.rng).unwrap().clone())
        } else {
            Term::Const(ENTITIES.choose(self.rng).unwrap().to_string())
        }
    }

    fn atom(&mut self) -> Formula {
        let temporal: Vec<_> = self.db.relations().filter(|r| r.class != VerbClass::Timeless).collect();
        let rel = *temporal.choose(self.rng).unwrap();
        let args = (0..rel.arity).map(|_| self.term()).collect();
        let p = Pred::new(&rel.predicate, args);
        if rel.class == VerbClass::CulmActivity && self.rng.gen_bool(0.5) {
            Formula::Culm(p)
        } else {
            Formula::Pred(p)
        }
    }

    fn restriction(&mut self, x: &str) -> Vec<Pred> {
        match self.db.relation("kind") {
            Some(_) if self.rng.gen_bool(0.5) => vec![Pred::new("kind", vec![Term::Var(x.to_string())])],
            _ => vec![],
        }
    }

    /// A formula with at most `depth` operators above its predicate.
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.atom();
        }
        let axis = self.db.axis();
        match self.rng.gen_range(0..8) {
            0 => {
                let e = self.fresh("e");
                Formula::past(&e, self.formula(depth - 1))
            }
            1 => {
                let e = self.fresh("e");
                Formula::pres(&e, self.formula(depth - 1))
            }
            2 => {
                let e = self.fresh("e");
                Formula::perf(&e, self.formula(depth - 1))
            }
            3 => {
                let t = self.rng.gen_range(0..=axis.horizon());
                Formula::at(date_pattern(axis, t), self.formula(depth - 1))
            }
            4 => {
                let (unit, n) = if self.rng.gen_bool(0.8) {
                    (UnitName::Day, self.rng.gen_range(1..=4))
                } else {
                    (UnitName::Week, 1)
                };
                Formula::for_(unit, n, self.formula(depth - 1))
            }
            5 => Formula::begin(self.formula(depth - 1)),
            6 => Formula::end(self.formula(depth - 1)),
            _ => {
                let x = self.fresh("x");
                let rest = self.restriction(&x);
                self.scope.push(x.clone());
                let body = self.formula(depth - 1);
                self.scope.pop();
                Formula::exists(&x, rest, body)
            }
        }
    }
}

/// The event variable of the Past/Pres reachable from the root through
/// operators that keep the event time.
fn spine_index(f: &Formula) -> Option<String> {
    match f {
        Formula::Past(e, _) | Formula::Pres(e, _) => Some(e.clone()),
        Formula::At(_, g) | Formula::For(_, _, g) | Formula::Exists(_, _, g) | Formula::Interrog(_, _, g) => {
            spine_index(g)
        }
        _ => None,
    }
}

/// A closed formula, well-formed for `db`, of operator depth at most 4,
/// mixing yes/no, interrogative and `?mxl` questions.
pub fn random_formula(rng: &mut impl Rng, db: &Database) -> Formula {
    loop {
        let kind = rng.gen_range(0..10);
        let mut g = FormulaGen {
            rng: &mut *rng,
            db,
            fresh: 0,
            scope: Vec::new(),
        };
        let f = match kind {
            0..=1 => {
                let x = g.fresh("x");
                let rest = g.restriction(&x);
                g.scope.push(x.clone());
                let body = g.formula(3);
                Formula::interrog(&x, rest, body)
            }
            2..=3 => {
                let e = g.fresh("e");
                let at = g.rng.gen_bool(0.3);
                let body = Formula::past(&e, g.formula(if at { 1 } else { 2 }));
                let body = if at {
                    let t = g.rng.gen_range(0..=db.axis().horizon());
                    Formula::at(date_pattern(db.axis(), t), body)
                } else {
                    body
                };
                match spine_index(&body) {
                    Some(e) => Formula::mxl(&e, body),
                    None => continue,
                }
            }
            _ => g.formula(4),
        };
        if well_formed(&f, db as &dyn Schema).is_empty() {
            return f;
        }
    }
}

/// A database, a formula and a speech time drawn from one seed.
pub fn random_case(seed: u64, max_horizon: u32) -> (Database, Formula, u32) {
    let mut r = rng(seed);
    let axis = random_axis(&mut r, max_horizon);
    let db = random_db(&mut r, axis);
    let f = random_formula(&mut r, &db);
    let st = r.gen_range(0..=db.axis().horizon());
    (db, f, st)
}
