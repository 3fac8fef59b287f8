//! Compiled evaluation path: TOP formulae are translated into a small
//! temporal relational algebra, evaluated over finite row sets, and can be
//! printed as TSQL2-style query text.
//!
//! Rows describe possibly huge families of event times finitely. A
//! downward-closed row stands for every subperiod of each listed period,
//! an exact row for its listed periods only, and a points row for single
//! time points.
//!
//! Localisation windows are compiled into `WindowRestrict` nodes. Each
//! subformula's satisfying event times under a window are its event times
//! under the full axis that also lie inside the window, so a window node is
//! a pure filter and nested windows commute.

mod dialect;
mod emit;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::tdb::{Database, DbError};
use crate::timecore::{calendar_resolve, duration_points, Axis, DurationUnit, Period, TimeError, UnitName};
use crate::topast::{free_vars, Formula, Pred, TemporalPattern, Term, VarKind, VerbClass};
use crate::topeval::{Answer, AnswerRow};

pub use dialect::{check_dialect, DialectError};
pub use emit::emit_tsql2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TralgError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("speech time {st} lies outside the axis [0, {horizon}]")]
    SpeechTime { st: u32, horizon: u32 },
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Db(#[from] DbError),
}

pub type Result<T> = std::result::Result<T, TralgError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowMode {
    DownwardClosed,
    Exact,
    Points,
}

/// One row of an intermediate result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgRow {
    pub bindings: BTreeMap<String, String>,
    pub et_periods: Vec<Period>,
    pub mode: RowMode,
}

impl AlgRow {
    /// Every event time the row stands for.
    pub fn members(&self) -> Vec<Period> {
        match self.mode {
            RowMode::Exact | RowMode::Points => self.et_periods.clone(),
            RowMode::DownwardClosed => {
                let mut out = BTreeSet::new();
                for q in &self.et_periods {
                    for s in q.points() {
                        for e in s..=q.end() {
                            out.insert(Period::new(s, e).expect("ordered"));
                        }
                    }
                }
                out.into_iter().collect()
            }
        }
    }
}

/// Where a window came from; only used for printing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WindowSource {
    Past,
    Pres,
    At(TemporalPattern),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Exists,
    Interrog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectKind {
    Bool,
    Bindings,
    Maximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AlgExpr {
    Scan(Pred),
    CulmSelect(Box<AlgExpr>),
    BeginPoints(Box<AlgExpr>),
    EndPoints(Box<AlgExpr>),
    WindowRestrict {
        child: Box<AlgExpr>,
        windows: Vec<Period>,
        source: WindowSource,
    },
    SubperiodsOfDuration {
        child: Box<AlgExpr>,
        points: u32,
        unit: UnitName,
        count: u32,
    },
    /// Perf: the outer window is where the later event time may lie.
    PrecedesJoin { window: Period, child: Box<AlgExpr> },
    EntityJoin {
        var: String,
        kind: QuantKind,
        restriction: Vec<Pred>,
        body: Box<AlgExpr>,
    },
    Collect {
        kind: CollectKind,
        /// Interrogative variables, outermost first.
        vars: Vec<String>,
        child: Box<AlgExpr>,
    },
}

impl AlgExpr {
    /// Row mode produced by this node; fixed by the node kinds alone.
    pub fn mode(&self) -> RowMode {
        match self {
            AlgExpr::Scan(_) | AlgExpr::PrecedesJoin { .. } => RowMode::DownwardClosed,
            AlgExpr::CulmSelect(_) | AlgExpr::SubperiodsOfDuration { .. } => RowMode::Exact,
            AlgExpr::BeginPoints(_) | AlgExpr::EndPoints(_) => RowMode::Points,
            AlgExpr::WindowRestrict { child, .. } | AlgExpr::Collect { child, .. } => child.mode(),
            AlgExpr::EntityJoin { body, .. } => body.mode(),
        }
    }

    pub fn child(&self) -> Option<&AlgExpr> {
        match self {
            AlgExpr::Scan(_) => None,
            AlgExpr::CulmSelect(c) | AlgExpr::BeginPoints(c) | AlgExpr::EndPoints(c) => Some(c),
            AlgExpr::WindowRestrict { child, .. }
            | AlgExpr::SubperiodsOfDuration { child, .. }
            | AlgExpr::PrecedesJoin { child, .. }
            | AlgExpr::Collect { child, .. } => Some(child),
            AlgExpr::EntityJoin { body, .. } => Some(body),
        }
    }
}

fn fmt_windows(ws: &[Period]) -> String {
    ws.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for AlgExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgExpr::Scan(p) => {
                let args: Vec<String> = p.args.iter().map(ToString::to_string).collect();
                write!(f, "Scan({}, [{}])", p.symbol, args.join(", "))
            }
            AlgExpr::CulmSelect(c) => write!(f, "CulmSelect({c})"),
            AlgExpr::BeginPoints(c) => write!(f, "BeginPoints({c})"),
            AlgExpr::EndPoints(c) => write!(f, "EndPoints({c})"),
            AlgExpr::WindowRestrict { child, windows, .. } => {
                write!(f, "WindowRestrict({child}, {{{}}})", fmt_windows(windows))
            }
            AlgExpr::SubperiodsOfDuration { child, points, .. } => {
                write!(f, "SubperiodsOfDuration({child}, {points})")
            }
            AlgExpr::PrecedesJoin { window, child } => write!(f, "PrecedesJoin({window}, {child})"),
            AlgExpr::EntityJoin { var, kind, restriction, body } => {
                let k = match kind {
                    QuantKind::Exists => "exists",
                    QuantKind::Interrog => "interrog",
                };
                let r: Vec<String> = restriction.iter().map(ToString::to_string).collect();
                write!(f, "EntityJoin({k} {var} [{}], {body})", r.join(", "))
            }
            AlgExpr::Collect { kind, vars, child } => {
                let k = match kind {
                    CollectKind::Bool => "bool",
                    CollectKind::Bindings => "bindings",
                    CollectKind::Maximal => "maximal",
                };
                if vars.is_empty() {
                    write!(f, "Collect({k}, {child})")
                } else {
                    write!(f, "Collect({k} {}, {child})", vars.join(" "))
                }
            }
        }
    }
}

fn translate_node(f: &Formula, st: u32, axis: &Axis) -> Result<AlgExpr> {
    let sub = |g: &Formula| translate_node(g, st, axis).map(Box::new);
    Ok(match f {
        Formula::Pred(p) => AlgExpr::Scan(p.clone()),
        Formula::Culm(p) => AlgExpr::CulmSelect(Box::new(AlgExpr::Scan(p.clone()))),
        Formula::Past(_, g) => AlgExpr::WindowRestrict {
            child: sub(g)?,
            windows: st.checked_sub(1).map(|l| Period::new(0, l).expect("ordered")).into_iter().collect(),
            source: WindowSource::Past,
        },
        Formula::Pres(_, g) => AlgExpr::WindowRestrict {
            child: sub(g)?,
            windows: vec![Period::point(st)],
            source: WindowSource::Pres,
        },
        Formula::At(pattern, g) => AlgExpr::WindowRestrict {
            child: sub(g)?,
            windows: calendar_resolve(&pattern.expr, axis)?,
            source: WindowSource::At(pattern.clone()),
        },
        Formula::For(unit, n, g) => {
            let u = DurationUnit::resolve(*unit, axis.granularity())?;
            AlgExpr::SubperiodsOfDuration {
                child: sub(g)?,
                points: duration_points(u, *n),
                unit: *unit,
                count: *n,
            }
        }
        Formula::Perf(_, g) => AlgExpr::PrecedesJoin {
            window: axis.full(),
            child: sub(g)?,
        },
        Formula::Begin(g) => AlgExpr::BeginPoints(sub(g)?),
        Formula::End(g) => AlgExpr::EndPoints(sub(g)?),
        Formula::Exists(x, rest, g) | Formula::Interrog(x, rest, g) => AlgExpr::EntityJoin {
            var: x.clone(),
            kind: if matches!(f, Formula::Exists(..)) {
                QuantKind::Exists
            } else {
                QuantKind::Interrog
            },
            restriction: rest.clone(),
            body: sub(g)?,
        },
        Formula::InterrogMxl(_, g) => translate_node(g, st, axis)?,
    })
}

/// Compiles a closed formula for speech time `st`.
pub fn translate(f: &Formula, st: u32, axis: &Axis) -> Result<AlgExpr> {
    if st > axis.horizon() {
        return Err(TralgError::SpeechTime {
            st,
            horizon: axis.horizon(),
        });
    }
    if let Some(v) = free_vars(f).into_iter().find(|v| v.kind == VarKind::Entity) {
        return Err(TralgError::UnboundVariable(v.name));
    }
    let vars: Vec<String> = f.interrogatives().iter().map(|(x, _)| x.to_string()).collect();
    let kind = if f.mxl_var().is_some() {
        CollectKind::Maximal
    } else if vars.is_empty() {
        CollectKind::Bool
    } else {
        CollectKind::Bindings
    };
    Ok(AlgExpr::Collect {
        kind,
        vars,
        child: Box::new(translate_node(f, st, axis)?),
    })
}

fn row(bindings: BTreeMap<String, String>, et_periods: Vec<Period>, mode: RowMode) -> AlgRow {
    AlgRow {
        bindings,
        et_periods,
        mode,
    }
}

/// Rows grouped by their bindings, preserving first-seen order.
fn group(rows: Vec<AlgRow>) -> BTreeMap<BTreeMap<String, String>, Vec<AlgRow>> {
    let mut out: BTreeMap<_, Vec<AlgRow>> = BTreeMap::new();
    for r in rows {
        out.entry(r.bindings.clone()).or_default().push(r);
    }
    out
}

/// Entities satisfying every restriction predicate at some time.
fn restriction_entities(db: &Database, var: &str, rest: &[Pred]) -> Result<BTreeSet<String>> {
    let mut allowed: BTreeSet<String> = db.entities().clone();
    for p in rest {
        let rel = db
            .relation(&p.symbol)
            .ok_or_else(|| DbError::UnknownPredicate(p.symbol.clone()))?;
        if rel.arity != p.args.len() {
            return Err(DbError::ArityMismatch {
                symbol: p.symbol.clone(),
                arity: rel.arity,
                given: p.args.len(),
            }
            .into());
        }
        let mut hits = BTreeSet::new();
        for t in &rel.tuples {
            if rel.class != VerbClass::Timeless && t.valid.is_empty() {
                continue;
            }
            let mut value: Option<&String> = None;
            let matched = p.args.iter().zip(&t.values).all(|(a, v)| match a {
                Term::Const(c) => c == v,
                Term::Var(x) if x == var => match value {
                    Some(prev) => prev == v,
                    None => {
                        value = Some(v);
                        true
                    }
                },
                Term::Var(x) => panic!("restriction of {var} mentions {x}"),
            });
            if matched {
                if let Some(v) = value {
                    hits.insert(v.clone());
                } else {
                    // ground restriction: holds for every candidate
                    hits.extend(db.entities().iter().cloned());
                }
            }
        }
        allowed = allowed.intersection(&hits).cloned().collect();
    }
    Ok(allowed)
}

/// Evaluates any algebra node to its rows.
pub fn eval_rows(db: &Database, a: &AlgExpr) -> Result<Vec<AlgRow>> {
    let horizon = db.axis().horizon();
    Ok(match a {
        AlgExpr::Scan(p) => db
            .denotation(&p.symbol, &p.args)?
            .into_iter()
            .filter(|r| !r.valid.is_empty())
            .map(|r| row(r.bindings, r.valid.periods().to_vec(), RowMode::DownwardClosed))
            .collect(),
        AlgExpr::CulmSelect(child) => {
            let AlgExpr::Scan(p) = child.as_ref() else {
                unreachable!("CulmSelect is only built over Scan")
            };
            db.denotation(&p.symbol, &p.args)?
                .into_iter()
                .filter_map(|r| {
                    let hits: Vec<Period> = r
                        .valid
                        .periods()
                        .iter()
                        .filter(|q| r.climaxes.contains(&q.end()))
                        .copied()
                        .collect();
                    (!hits.is_empty()).then(|| row(r.bindings, hits, RowMode::Exact))
                })
                .collect()
        }
        AlgExpr::WindowRestrict { child, windows, .. } => eval_rows(db, child)?
            .into_iter()
            .filter_map(|r| {
                let kept: Vec<Period> = match r.mode {
                    RowMode::DownwardClosed => r
                        .et_periods
                        .iter()
                        .flat_map(|q| windows.iter().filter_map(move |w| q.intersect(w)))
                        .collect(),
                    RowMode::Exact | RowMode::Points => r
                        .et_periods
                        .iter()
                        .filter(|q| windows.iter().any(|w| w.contains_period(q)))
                        .copied()
                        .collect(),
                };
                (!kept.is_empty()).then(|| row(r.bindings, kept, r.mode))
            })
            .collect(),
        AlgExpr::SubperiodsOfDuration { child, points, .. } => {
            let len = *points;
            eval_rows(db, child)?
                .into_iter()
                .filter_map(|r| {
                    let kept: BTreeSet<Period> = match r.mode {
                        RowMode::DownwardClosed => r
                            .et_periods
                            .iter()
                            .filter(|q| len >= 1 && q.duration() >= len)
                            .flat_map(|q| {
                                (q.start()..=q.end() + 1 - len).map(move |s| Period::new(s, s + len - 1).expect("ordered"))
                            })
                            .collect(),
                        RowMode::Exact | RowMode::Points => {
                            r.et_periods.iter().filter(|q| q.duration() == len).copied().collect()
                        }
                    };
                    (!kept.is_empty()).then(|| row(r.bindings, kept.into_iter().collect(), RowMode::Exact))
                })
                .collect()
        }
        AlgExpr::PrecedesJoin { window, child } => group(eval_rows(db, child)?)
            .into_iter()
            .filter_map(|(bindings, rows)| {
                // earliest end among the member event times
                let m = rows
                    .iter()
                    .flat_map(|r| {
                        r.et_periods.iter().map(move |q| match r.mode {
                            RowMode::DownwardClosed => q.start(),
                            _ => q.end(),
                        })
                    })
                    .min()?;
                let first = (m + 1).max(window.start());
                (first <= window.end()).then(|| {
                    row(
                        bindings,
                        vec![Period::new(first, window.end()).expect("ordered")],
                        RowMode::DownwardClosed,
                    )
                })
            })
            .collect(),
        AlgExpr::BeginPoints(child) | AlgExpr::EndPoints(child) => {
            let begin = matches!(a, AlgExpr::BeginPoints(_));
            group(eval_rows(db, child)?)
                .into_iter()
                .map(|(bindings, rows)| {
                    let mut pts = BTreeSet::new();
                    for r in rows {
                        for q in r.et_periods {
                            match r.mode {
                                // any point of q starts (and ends) some subperiod
                                RowMode::DownwardClosed => pts.extend(q.points()),
                                _ => {
                                    pts.insert(if begin { q.start() } else { q.end() });
                                }
                            }
                        }
                    }
                    row(bindings, pts.into_iter().map(Period::point).collect(), RowMode::Points)
                })
                .collect()
        }
        AlgExpr::EntityJoin {
            var,
            kind,
            restriction,
            body,
        } => {
            let allowed = restriction_entities(db, var, restriction)?;
            let mut out = Vec::new();
            for r in eval_rows(db, body)? {
                let candidates: Vec<String> = match r.bindings.get(var) {
                    Some(c) if allowed.contains(c) => vec![c.clone()],
                    Some(_) => vec![],
                    None => allowed.iter().cloned().collect(),
                };
                for c in candidates {
                    let mut bindings = r.bindings.clone();
                    match kind {
                        QuantKind::Interrog => {
                            bindings.insert(var.clone(), c);
                        }
                        QuantKind::Exists => {
                            bindings.remove(var);
                        }
                    }
                    out.push(row(bindings, r.et_periods.clone(), r.mode));
                }
            }
            out
        }
        AlgExpr::Collect { child, .. } => eval_rows(db, child)?,
    })
    .map(|rows: Vec<AlgRow>| {
        debug_assert!(rows.iter().all(|r| r.et_periods.iter().all(|p| p.end() <= horizon)));
        rows
    })
}

/// Members not strictly inside another candidate. Every member of a row
/// lies inside one of its listed periods, so only listed periods can be
/// maximal.
fn maximal_candidates(rows: &[AlgRow]) -> Vec<Period> {
    let cands: BTreeSet<Period> = rows.iter().flat_map(|r| r.et_periods.iter().copied()).collect();
    cands
        .iter()
        .filter(|p| !cands.iter().any(|q| q != *p && q.contains_period(p)))
        .copied()
        .collect()
}

/// Evaluates a translated query to its answer.
pub fn eval_alg(db: &Database, a: &AlgExpr) -> Result<Answer> {
    let (kind, vars) = match a {
        AlgExpr::Collect { kind, vars, .. } => (*kind, vars.clone()),
        _ => (CollectKind::Bool, vec![]),
    };
    let rows = eval_rows(db, a)?;
    if kind == CollectKind::Bool {
        return Ok(Answer::Boolean(!rows.is_empty()));
    }
    let mut out = Vec::new();
    for (bindings, group_rows) in group(rows) {
        let entities: Vec<String> = vars
            .iter()
            .map(|x| bindings.get(x).cloned().ok_or_else(|| TralgError::UnboundVariable(x.clone())))
            .collect::<Result<_>>()?;
        if kind == CollectKind::Maximal {
            for p in maximal_candidates(&group_rows) {
                out.push(AnswerRow {
                    entities: entities.clone(),
                    period: Some(p),
                });
            }
        } else {
            out.push(AnswerRow { entities, period: None });
        }
    }
    Ok(Answer::rows(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tdb::load_database;
    use crate::topast::parse_formula;
    use crate::topeval::eval;

    const TANK: &str = "\
axis 1/1/1994 9/2/1994 day
relation contain/2 state
tuple contain tank2 water valid=6/1/1994..21/1/1994
relation fixing/2 culm_activity
tuple fixing john eng2 valid=11/1/1994..15/1/1994 climax=15/1/1994
tuple fixing john eng1 valid=23/1/1994..26/1/1994
relation engine/1 timeless
tuple engine eng1
tuple engine eng2
";

    fn p(s: u32, e: u32) -> Period {
        Period::new(s, e).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn past_translation_shape() {
        let db = load_database(TANK).unwrap();
        let a = translate(&f("Past[e1, contain(tank2, water)]"), 30, db.axis()).unwrap();
        assert_eq!(a.to_string(), "Collect(bool, WindowRestrict(Scan(contain, [tank2, water]), {[0,29]}))");
        assert_eq!(eval_alg(&db, &a).unwrap(), Answer::Boolean(true));
    }

    #[test]
    fn mxl_translation_shape() {
        let db = load_database(TANK).unwrap();
        let a = translate(&f("?mxl e1 Past[e1, contain(tank2, water)]"), 30, db.axis()).unwrap();
        assert_eq!(a.to_string(), "Collect(maximal, WindowRestrict(Scan(contain, [tank2, water]), {[0,29]}))");
        assert_eq!(
            eval_alg(&db, &a).unwrap(),
            Answer::rows(vec![AnswerRow {
                entities: vec![],
                period: Some(p(5, 20)),
            }])
        );
    }

    #[test]
    fn at_wraps_the_past_window() {
        let text = "\
axis 1/1/1994 31/12/1994 day
relation fixing/2 culm_activity
tuple fixing john eng2 valid=1/6/1994..1/6/1994
";
        let db = load_database(text).unwrap();
        let a = translate(&f("At[\"1/6/94\", Past[e1, Culm[fixing(john, eng2)]]]"), 300, db.axis()).unwrap();
        assert_eq!(
            a.to_string(),
            "Collect(bool, WindowRestrict(WindowRestrict(CulmSelect(Scan(fixing, [john, eng2])), {[0,299]}), {[151,151]}))"
        );
        // no climax recorded
        assert_eq!(eval_alg(&db, &a).unwrap(), Answer::Boolean(false));
    }

    #[test]
    fn agrees_with_reference_on_examples() {
        let db = load_database(TANK).unwrap();
        for text in [
            "Past[e1, contain(tank2, water)]",
            "?mxl e1 Past[e1, contain(tank2, water)]",
            "? x1 engine(x1) : Past[e1, Culm[fixing(john, x1)]]",
            "? x1 engine(x1) : Past[e1, fixing(john, x1)]",
            "exists x1 engine(x1) : Past[e1, Perf[e2, Culm[fixing(john, x1)]]]",
            "?mxl e1 Past[e1, Perf[e2, contain(tank2, water)]]",
            "Past[e1, For[day, 3, fixing(john, eng1)]]",
            "? x1 : ?mxl e1 Past[e1, End[fixing(john, x1)]]",
            "?mxl e1 Past[e1, Begin[Culm[fixing(john, eng2)]]]",
        ] {
            for st in [0, 3, 12, 30, 39] {
                let formula = f(text);
                let want = eval(&db, &formula, st).unwrap();
                let got = eval_alg(&db, &translate(&formula, st, db.axis()).unwrap()).unwrap();
                assert_eq!(got, want, "{text} at {st}");
            }
        }
    }

    #[test]
    fn unused_interrogative_ranges_over_restriction() {
        let db = load_database(TANK).unwrap();
        let formula = f("? x1 engine(x1) : Past[e1, contain(tank2, water)]");
        let got = eval_alg(&db, &translate(&formula, 30, db.axis()).unwrap()).unwrap();
        assert_eq!(got, eval(&db, &formula, 30).unwrap());
        assert_eq!(got.render(db.axis()), "eng1\neng2");
    }

    #[test]
    fn free_variables_are_rejected() {
        let db = load_database(TANK).unwrap();
        let open = Formula::past("e1", Formula::pred("engine", &[Term::var("x1")]));
        assert_eq!(
            translate(&open, 3, db.axis()),
            Err(TralgError::UnboundVariable("x1".into()))
        );
    }

    #[test]
    fn modes_follow_node_kinds() {
        let db = load_database(TANK).unwrap();
        let a = translate(&f("Past[e1, End[contain(tank2, water)]]"), 30, db.axis()).unwrap();
        assert_eq!(a.mode(), RowMode::Points);
        let rows = eval_rows(&db, &a).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].et_periods.len(), 16);
    }
}
