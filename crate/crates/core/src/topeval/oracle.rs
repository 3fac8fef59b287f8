//! Point-by-point evaluator used to cross-check the set-based one.
//!
//! Each event time is tested on its own by reading tuples directly, with
//! no period sets and no shared bitsets. Only the existential searches of
//! `Perf`, `Begin` and `End` and the quantifier restrictions are cached.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Answer, AnswerRow, EvalError, Result};
use crate::tdb::Database;
use crate::timecore::{calendar_resolve, duration_points, DurationUnit, Period, TimePoint};
use crate::topast::{Formula, Pred, Term, VerbClass};

/// Largest horizon the oracle accepts; it enumerates every period.
pub const ORACLE_MAX_HORIZON: u32 = 1000;

type Env = BTreeMap<String, String>;

struct Oracle<'a> {
    db: &'a Database,
    st: u32,
    perf: HashMap<(usize, Env), Option<u32>>,
    marks: HashMap<(usize, Env), BTreeSet<u32>>,
    restrictions: HashMap<(usize, Env), bool>,
}

fn inside(et: &Period, w: Option<Period>) -> bool {
    w.is_some_and(|w| w.contains_period(et))
}

fn meet(a: Option<Period>, b: Option<Period>) -> Option<Period> {
    match (a, b) {
        (Some(a), Some(b)) => a.intersect(&b),
        _ => None,
    }
}

impl<'a> Oracle<'a> {
    fn all_periods(&self) -> Vec<Period> {
        let h = self.db.axis().horizon();
        let mut out = Vec::new();
        for s in 0..=h {
            for e in s..=h {
                out.push(Period::new(s, e).expect("ordered"));
            }
        }
        out
    }

    fn values(pred: &Pred, env: &Env) -> Result<Vec<String>> {
        pred.args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Ok(c.clone()),
                Term::Var(x) => env.get(x).cloned().ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            })
            .collect()
    }

    fn relation(&self, pred: &Pred) -> Result<&'a crate::tdb::Relation> {
        let rel = self
            .db
            .relation(&pred.symbol)
            .ok_or_else(|| crate::tdb::DbError::UnknownPredicate(pred.symbol.clone()))?;
        if rel.arity != pred.args.len() {
            return Err(crate::tdb::DbError::ArityMismatch {
                symbol: pred.symbol.clone(),
                arity: rel.arity,
                given: pred.args.len(),
            }
            .into());
        }
        Ok(rel)
    }

    fn full(&self) -> Option<Period> {
        Some(self.db.axis().full())
    }

    fn restriction_holds(&mut self, rest: &[Pred], env: &Env) -> Result<bool> {
        let key = (rest.as_ptr() as usize, env.clone());
        if let Some(v) = self.restrictions.get(&key) {
            return Ok(*v);
        }
        let v = self.scan_restriction(rest, env)?;
        self.restrictions.insert(key, v);
        Ok(v)
    }

    fn scan_restriction(&self, rest: &[Pred], env: &Env) -> Result<bool> {
        let h = self.db.axis().horizon();
        for p in rest {
            let vals = Self::values(p, env)?;
            let mut found = false;
            for t in 0..=h {
                if self.db.snapshot(&p.symbol, TimePoint(t))?.contains(&vals) {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn earliest_end(&mut self, g: &Formula, env: &Env) -> Result<Option<u32>> {
        let key = (g as *const Formula as usize, env.clone());
        if let Some(v) = self.perf.get(&key) {
            return Ok(*v);
        }
        let mut best: Option<u32> = None;
        for p in self.all_periods() {
            if self.holds(g, self.full(), env, p)? {
                best = Some(best.map_or(p.end(), |b| b.min(p.end())));
            }
        }
        self.perf.insert(key, best);
        Ok(best)
    }

    fn boundary_points(&mut self, g: &Formula, begin: bool, env: &Env) -> Result<BTreeSet<u32>> {
        let key = (g as *const Formula as usize, env.clone());
        if let Some(v) = self.marks.get(&key) {
            return Ok(v.clone());
        }
        let mut pts = BTreeSet::new();
        for p in self.all_periods() {
            if self.holds(g, self.full(), env, p)? {
                pts.insert(if begin { p.start() } else { p.end() });
            }
        }
        self.marks.insert(key, pts.clone());
        Ok(pts)
    }

    fn holds(&mut self, f: &Formula, lt: Option<Period>, env: &Env, et: Period) -> Result<bool> {
        match f {
            Formula::Pred(p) => {
                let rel = self.relation(p)?;
                let vals = Self::values(p, env)?;
                if !inside(&et, lt) {
                    return Ok(false);
                }
                Ok(rel.tuples.iter().any(|t| {
                    t.values == vals && (rel.class == VerbClass::Timeless || t.valid.contains(&et))
                }))
            }
            Formula::Culm(p) => {
                let rel = self.relation(p)?;
                let vals = Self::values(p, env)?;
                if !inside(&et, lt) {
                    return Ok(false);
                }
                Ok(rel
                    .tuples
                    .iter()
                    .any(|t| t.values == vals && t.valid.is_maximal(&et) && t.climaxes.contains(&et.end())))
            }
            Formula::Past(_, g) => {
                if self.st == 0 {
                    return Ok(false);
                }
                let w = meet(lt, Some(Period::new(0, self.st - 1).expect("ordered")));
                Ok(inside(&et, w) && self.holds(g, w, env, et)?)
            }
            Formula::Pres(_, g) => {
                let w = meet(lt, Some(Period::point(self.st)));
                Ok(inside(&et, w) && self.holds(g, w, env, et)?)
            }
            Formula::At(pattern, g) => {
                for p in calendar_resolve(&pattern.expr, self.db.axis())? {
                    if self.holds(g, meet(lt, Some(p)), env, et)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Perf(_, g) => {
                if !inside(&et, lt) {
                    return Ok(false);
                }
                Ok(self.earliest_end(g, env)?.is_some_and(|m| m < et.start()))
            }
            Formula::Begin(g) | Formula::End(g) => {
                if et.start() != et.end() || !inside(&et, lt) {
                    return Ok(false);
                }
                let pts = self.boundary_points(g, matches!(f, Formula::Begin(_)), env)?;
                Ok(pts.contains(&et.start()))
            }
            Formula::For(unit, n, g) => {
                let unit = DurationUnit::resolve(*unit, self.db.axis().granularity())?;
                Ok(et.duration() == duration_points(unit, *n) && self.holds(g, lt, env, et)?)
            }
            Formula::Exists(x, rest, g) | Formula::Interrog(x, rest, g) => {
                let candidates: Vec<String> = match (f, env.get(x)) {
                    (Formula::Interrog(..), Some(c)) => vec![c.clone()],
                    _ => self.db.entities().iter().cloned().collect(),
                };
                for c in candidates {
                    let mut inner = env.clone();
                    inner.insert(x.clone(), c);
                    if self.restriction_holds(rest, &inner)? && self.holds(g, lt, &inner, et)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::InterrogMxl(_, g) => self.holds(g, lt, env, et),
        }
    }
}

/// Members not strictly contained in another member: sorted by start
/// ascending and end descending, a period is dominated exactly when an
/// earlier one reaches at least as far.
fn maximal_members(mut members: Vec<Period>) -> Vec<Period> {
    members.sort_by(|a, b| a.start().cmp(&b.start()).then(b.end().cmp(&a.end())));
    members.dedup();
    let mut reach: Option<u32> = None;
    let mut out = Vec::new();
    for p in members {
        if reach.is_none_or(|r| r < p.end()) {
            out.push(p);
            reach = Some(p.end());
        }
    }
    out
}

/// Same contract as [`super::eval`], computed point by point.
pub fn oracle_eval(db: &Database, f: &Formula, st: u32) -> Result<Answer> {
    let horizon = db.axis().horizon();
    if horizon > ORACLE_MAX_HORIZON {
        return Err(EvalError::OracleGuard {
            horizon,
            max: ORACLE_MAX_HORIZON,
        });
    }
    if st > horizon {
        return Err(EvalError::SpeechTime { st, horizon });
    }
    let mut o = Oracle {
        db,
        st,
        perf: HashMap::new(),
        marks: HashMap::new(),
        restrictions: HashMap::new(),
    };
    let interrogatives: Vec<String> = f.interrogatives().iter().map(|(x, _)| x.to_string()).collect();
    let mut assignments: Vec<Env> = vec![Env::new()];
    for x in &interrogatives {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                db.entities().iter().map(move |c| {
                    let mut b = a.clone();
                    b.insert(x.clone(), c.clone());
                    b
                })
            })
            .collect();
    }
    let mxl = f.mxl_var().is_some();
    let periods = o.all_periods();
    let full = o.full();
    if interrogatives.is_empty() && !mxl {
        for p in &periods {
            if o.holds(f, full, &Env::new(), *p)? {
                return Ok(Answer::Boolean(true));
            }
        }
        return Ok(Answer::Boolean(false));
    }
    let mut rows = Vec::new();
    for a in assignments {
        let entities: Vec<String> = interrogatives.iter().map(|x| a[x].clone()).collect();
        if mxl {
            let mut members = Vec::new();
            for p in &periods {
                if o.holds(f, full, &a, *p)? {
                    members.push(*p);
                }
            }
            for p in maximal_members(members) {
                rows.push(AnswerRow {
                    entities: entities.clone(),
                    period: Some(p),
                });
            }
        } else {
            for p in &periods {
                if o.holds(f, full, &a, *p)? {
                    rows.push(AnswerRow {
                        entities,
                        period: None,
                    });
                    break;
                }
            }
        }
    }
    Ok(Answer::rows(rows))
}
