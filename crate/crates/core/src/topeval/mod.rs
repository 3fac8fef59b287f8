//! Reference evaluator for TOP formulae over a bounded axis.
//!
//! Every subformula is evaluated to the set of event times (periods) at
//! which it holds under a given localisation window and variable binding.
//! The sets range over all O(H²) periods of the axis, so this evaluator is
//! meant for transparency, not speed.

mod oracle;
mod periodset;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::tdb::{Database, DbError};
use crate::timecore::{calendar_resolve, duration_points, render_period, Axis, DurationUnit, Period, TimeError};
use crate::topast::{Formula, Pred, Term};

pub use oracle::{oracle_eval, ORACLE_MAX_HORIZON};
use periodset::PeriodSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error(transparent)]
    Db(#[from] DbError),
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error("speech time {st} lies outside the axis [0, {horizon}]")]
    SpeechTime { st: u32, horizon: u32 },
    #[error("oracle refuses axes longer than {max} points (horizon {horizon})")]
    OracleGuard { horizon: u32, max: u32 },
}

pub type Result<T> = std::result::Result<T, EvalError>;

/// Value of a variable: an entity constant or, for event variables, a period.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Entity(String),
    Period(Period),
}

/// Evaluation parameters. `lt` is the localisation window; `None` is the
/// empty window. Windows only ever shrink by intersection with periods, so
/// a single period suffices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub st: u32,
    pub lt: Option<Period>,
    pub bindings: BTreeMap<String, Value>,
}

impl Context {
    /// `lt` covers the whole axis and nothing is bound.
    pub fn initial(axis: &Axis, st: u32) -> Context {
        Context {
            st,
            lt: Some(axis.full()),
            bindings: BTreeMap::new(),
        }
    }
}

/// One answer row: constants for the interrogative variables in quantifier
/// order, and the period for a `?mxl` variable if there is one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnswerRow {
    pub entities: Vec<String>,
    pub period: Option<Period>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Boolean(bool),
    /// Sorted: entities lexicographically, then periods by start and end.
    Rows(Vec<AnswerRow>),
}

impl Answer {
    pub fn rows(mut rows: Vec<AnswerRow>) -> Answer {
        rows.sort();
        rows.dedup();
        Answer::Rows(rows)
    }

    /// `yes`/`no`, or one tab-separated line per row.
    pub fn render(&self, axis: &Axis) -> String {
        match self {
            Answer::Boolean(true) => "yes".to_string(),
            Answer::Boolean(false) => "no".to_string(),
            Answer::Rows(rows) if rows.is_empty() => "none".to_string(),
            Answer::Rows(rows) => rows
                .iter()
                .map(|r| {
                    let mut cols = r.entities.clone();
                    if let Some(p) = r.period {
                        cols.push(render_period(&p, axis));
                    }
                    cols.join("\t")
                })
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Boolean(b) => f.write_str(if *b { "yes" } else { "no" }),
            Answer::Rows(rows) => {
                f.write_str("{")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    f.write_str(&r.entities.join(","))?;
                    if let Some(p) = r.period {
                        if !r.entities.is_empty() {
                            f.write_str(" ")?;
                        }
                        write!(f, "{p}")?;
                    }
                }
                f.write_str("}")
            }
        }
    }
}

type MemoKey = (usize, Option<Period>, Vec<(String, String)>);

struct Evaluator<'a> {
    db: &'a Database,
    st: u32,
    n: usize,
    memo: HashMap<MemoKey, Rc<PeriodSet>>,
    restrictions: HashMap<(usize, String), bool>,
}

fn window(lt: Option<Period>, w: Option<Period>) -> Option<Period> {
    lt.zip(w).and_then(|(a, b)| a.intersect(&b))
}

impl<'a> Evaluator<'a> {
    fn new(db: &'a Database, st: u32) -> Result<Evaluator<'a>> {
        let horizon = db.axis().horizon();
        if st > horizon {
            return Err(EvalError::SpeechTime { st, horizon });
        }
        Ok(Evaluator {
            db,
            st,
            n: horizon as usize + 1,
            memo: HashMap::new(),
            restrictions: HashMap::new(),
        })
    }

    fn full(&self) -> Option<Period> {
        Some(self.db.axis().full())
    }

    fn all_within(&self, w: Option<Period>) -> PeriodSet {
        let mut s = PeriodSet::empty(self.n);
        if let Some(w) = w {
            s.insert_subperiods(w);
        }
        s
    }

    fn ground(pred: &Pred, env: &BTreeMap<String, String>) -> Result<Vec<Term>> {
        pred.args
            .iter()
            .map(|t| match t {
                Term::Var(x) => env
                    .get(x)
                    .map(|c| Term::Const(c.clone()))
                    .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
                c => Ok(c.clone()),
            })
            .collect()
    }

    /// Restriction at a binding: every predicate holds at some period.
    fn restriction(&mut self, node: &Formula, x: &str, rest: &[Pred], c: &str, env: &BTreeMap<String, String>) -> Result<bool> {
        let key = (node as *const Formula as usize, c.to_string());
        if let Some(v) = self.restrictions.get(&key) {
            return Ok(*v);
        }
        let mut env = env.clone();
        env.insert(x.to_string(), c.to_string());
        let mut ok = true;
        for p in rest {
            let terms = Self::ground(p, &env)?;
            let rows = self.db.denotation(&p.symbol, &terms)?;
            if !rows.iter().any(|r| !r.valid.is_empty()) {
                ok = false;
                break;
            }
        }
        self.restrictions.insert(key, ok);
        Ok(ok)
    }

    fn sat(&mut self, f: &Formula, lt: Option<Period>, env: &BTreeMap<String, String>) -> Result<Rc<PeriodSet>> {
        let key = (
            f as *const Formula as usize,
            lt,
            env.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        );
        if let Some(s) = self.memo.get(&key) {
            return Ok(s.clone());
        }
        let result = Rc::new(self.compute(f, lt, env)?);
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    fn compute(&mut self, f: &Formula, lt: Option<Period>, env: &BTreeMap<String, String>) -> Result<PeriodSet> {
        let n = self.n;
        Ok(match f {
            Formula::Pred(p) => {
                let terms = Self::ground(p, env)?;
                let mut out = PeriodSet::empty(n);
                if let Some(lt) = lt {
                    for row in self.db.denotation(&p.symbol, &terms)? {
                        for q in row.valid.intersect_period(&lt).periods() {
                            out.insert_subperiods(*q);
                        }
                    }
                }
                out
            }
            Formula::Culm(p) => {
                let terms = Self::ground(p, env)?;
                let mut out = PeriodSet::empty(n);
                if let Some(lt) = lt {
                    for row in self.db.denotation(&p.symbol, &terms)? {
                        for q in row.valid.periods() {
                            if row.climaxes.contains(&q.end()) && lt.contains_period(q) {
                                out.insert(*q);
                            }
                        }
                    }
                }
                out
            }
            Formula::Past(_, g) | Formula::Pres(_, g) => {
                let w = if matches!(f, Formula::Past(..)) {
                    self.st.checked_sub(1).map(|last| Period::new(0, last).expect("ordered"))
                } else {
                    Some(Period::point(self.st))
                };
                let narrowed = window(lt, w);
                let mut out = (*self.sat(g, narrowed, env)?).clone();
                out.intersect_with(&self.all_within(narrowed));
                out
            }
            Formula::At(pattern, g) => {
                let mut out = PeriodSet::empty(n);
                for p in calendar_resolve(&pattern.expr, self.db.axis())? {
                    out.union_with(&*self.sat(g, window(lt, Some(p)), env)?);
                }
                out
            }
            Formula::Perf(_, g) => {
                let inner = self.sat(g, self.full(), env)?;
                let earliest_end = inner.iter().map(|p| p.end()).min();
                let mut out = PeriodSet::empty(n);
                if let (Some(m), Some(lt)) = (earliest_end, lt) {
                    if m < lt.end() {
                        let first = (m + 1).max(lt.start());
                        out.insert_starting_within(
                            Period::new(first, lt.end()).expect("ordered"),
                            lt.end() as usize,
                        );
                    }
                }
                out
            }
            Formula::Begin(g) | Formula::End(g) => {
                let inner = self.sat(g, self.full(), env)?;
                let mut marks = vec![false; n];
                for p in inner.iter() {
                    let t = if matches!(f, Formula::Begin(_)) { p.start() } else { p.end() };
                    marks[t as usize] = true;
                }
                let mut out = PeriodSet::empty(n);
                if let Some(lt) = lt {
                    for t in lt.points() {
                        if marks[t as usize] {
                            out.insert(Period::point(t));
                        }
                    }
                }
                out
            }
            Formula::For(unit, count, g) => {
                let unit = DurationUnit::resolve(*unit, self.db.axis().granularity())?;
                let len = duration_points(unit, *count);
                let mut out = (*self.sat(g, lt, env)?).clone();
                out.retain(|p| p.duration() == len);
                out
            }
            Formula::Exists(x, rest, g) | Formula::Interrog(x, rest, g) => {
                let mut out = PeriodSet::empty(n);
                let candidates: Vec<String> = match (f, env.get(x)) {
                    (Formula::Interrog(..), Some(c)) => vec![c.clone()],
                    _ => self.db.entities().iter().cloned().collect(),
                };
                for c in candidates {
                    if self.restriction(f, x, rest, &c, env)? {
                        let mut inner_env = env.clone();
                        inner_env.insert(x.clone(), c);
                        out.union_with(&*self.sat(g, lt, &inner_env)?);
                    }
                }
                out
            }
            Formula::InterrogMxl(_, g) => (*self.sat(g, lt, env)?).clone(),
        })
    }
}

/// Truth of `f` at event time `et` under `ctx`. Event-variable bindings in
/// `ctx` are ignored; they only matter for answer extraction.
pub fn holds(db: &Database, f: &Formula, ctx: &Context, et: Period) -> Result<bool> {
    db.axis().check_period(&et)?;
    let mut ev = Evaluator::new(db, ctx.st)?;
    let env: BTreeMap<String, String> = ctx
        .bindings
        .iter()
        .filter_map(|(k, v)| match v {
            Value::Entity(c) => Some((k.clone(), c.clone())),
            Value::Period(_) => None,
        })
        .collect();
    Ok(ev.sat(f, ctx.lt, &env)?.contains(&et))
}

/// Every event time at which `f` holds under `ctx`, in period order.
pub fn satisfying_periods(db: &Database, f: &Formula, ctx: &Context) -> Result<Vec<Period>> {
    let mut ev = Evaluator::new(db, ctx.st)?;
    let env: BTreeMap<String, String> = ctx
        .bindings
        .iter()
        .filter_map(|(k, v)| match v {
            Value::Entity(c) => Some((k.clone(), c.clone())),
            Value::Period(_) => None,
        })
        .collect();
    let mut out: Vec<Period> = ev.sat(f, ctx.lt, &env)?.iter().collect();
    out.sort();
    Ok(out)
}

/// Answers a closed formula at speech time `st`.
pub fn eval(db: &Database, f: &Formula, st: u32) -> Result<Answer> {
    let mut ev = Evaluator::new(db, st)?;
    let full = ev.full();
    let interrogatives: Vec<String> = f.interrogatives().iter().map(|(x, _)| x.to_string()).collect();

    // All assignments of constants to the interrogative variables.
    let mut assignments: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for x in &interrogatives {
        let mut next = Vec::new();
        for a in &assignments {
            for c in db.entities() {
                let mut b = a.clone();
                b.insert(x.clone(), c.clone());
                next.push(b);
            }
        }
        assignments = next;
    }

    let mxl = f.mxl_var().is_some();
    if interrogatives.is_empty() && !mxl {
        return Ok(Answer::Boolean(!ev.sat(f, full, &BTreeMap::new())?.is_empty()));
    }
    let mut rows = Vec::new();
    for a in assignments {
        let s = ev.sat(f, full, &a)?;
        let entities: Vec<String> = interrogatives.iter().map(|x| a[x].clone()).collect();
        if mxl {
            for p in s.maximal() {
                rows.push(AnswerRow {
                    entities: entities.clone(),
                    period: Some(p),
                });
            }
        } else if !s.is_empty() {
            rows.push(AnswerRow {
                entities,
                period: None,
            });
        }
    }
    Ok(Answer::rows(rows))
}
