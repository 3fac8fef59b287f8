//! In-memory valid-time database: coalesced relations of value tuples
//! timestamped with temporal sets, plus climax points for culminated
//! activities.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::timecore::{normalize, Axis, Bound, Granularity, Period, TemporalSet, TimeError, TimePoint};
use crate::topast::{PredicateInfo, Schema, Term, VerbClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Range { line: usize, source: TimeError },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("predicate {symbol} has arity {arity}, pattern has {given} terms")]
    ArityMismatch {
        symbol: String,
        arity: usize,
        given: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    pub values: Vec<String>,
    pub valid: TemporalSet,
    pub climaxes: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub predicate: String,
    pub arity: usize,
    pub class: VerbClass,
    pub tuples: Vec<Tuple>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    axis: Axis,
    relations: BTreeMap<String, Relation>,
    entities: BTreeSet<String>,
}

/// One matching tuple: bindings for the pattern's variables, its valid time
/// and its climax points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenotationRow {
    pub bindings: BTreeMap<String, String>,
    pub valid: TemporalSet,
    pub climaxes: BTreeSet<u32>,
}

impl Schema for Database {
    fn predicate(&self, symbol: &str) -> Option<PredicateInfo> {
        self.relations.get(symbol).map(|r| PredicateInfo {
            arity: r.arity,
            class: r.class,
        })
    }
}

impl Database {
    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn relation(&self, symbol: &str) -> Option<&Relation> {
        self.relations.get(symbol)
    }

    pub fn entities(&self) -> &BTreeSet<String> {
        &self.entities
    }

    fn lookup(&self, pred: &str, arity: usize) -> Result<&Relation, DbError> {
        let rel = self
            .relations
            .get(pred)
            .ok_or_else(|| DbError::UnknownPredicate(pred.to_string()))?;
        if rel.arity != arity {
            return Err(DbError::ArityMismatch {
                symbol: pred.to_string(),
                arity: rel.arity,
                given: arity,
            });
        }
        Ok(rel)
    }

    /// Valid time of a tuple; timeless relations hold over the whole axis.
    pub fn valid_time<'a>(&'a self, rel: &Relation, tuple: &'a Tuple) -> TemporalSet {
        if rel.class == VerbClass::Timeless {
            TemporalSet::from_period(self.axis.full())
        } else {
            tuple.valid.clone()
        }
    }

    pub fn denotation(&self, pred: &str, pattern: &[Term]) -> Result<Vec<DenotationRow>, DbError> {
        let rel = self.lookup(pred, pattern.len())?;
        let mut rows = Vec::new();
        'tuples: for tuple in &rel.tuples {
            let mut bindings = BTreeMap::new();
            for (term, value) in pattern.iter().zip(&tuple.values) {
                match term {
                    Term::Const(c) if c != value => continue 'tuples,
                    Term::Const(_) => {}
                    Term::Var(x) => match bindings.get(x) {
                        Some(v) if v != value => continue 'tuples,
                        Some(_) => {}
                        None => {
                            bindings.insert(x.clone(), value.clone());
                        }
                    },
                }
            }
            rows.push(DenotationRow {
                bindings,
                valid: self.valid_time(rel, tuple),
                climaxes: tuple.climaxes.clone(),
            });
        }
        Ok(rows)
    }

    /// Value lists of the tuples valid at `t`.
    pub fn snapshot(&self, pred: &str, t: TimePoint) -> Result<BTreeSet<Vec<String>>, DbError> {
        let rel = self
            .relations
            .get(pred)
            .ok_or_else(|| DbError::UnknownPredicate(pred.to_string()))?;
        self.axis
            .check_point(t.0)
            .map_err(|source| DbError::Range { line: 0, source })?;
        Ok(rel
            .tuples
            .iter()
            .filter(|tp| rel.class == VerbClass::Timeless || tp.valid.contains_point(t.0))
            .map(|tp| tp.values.clone())
            .collect())
    }
}

/// Incremental construction with the same validation as the file loader.
#[derive(Debug, Clone)]
pub struct DatabaseBuilder {
    axis: Axis,
    relations: BTreeMap<String, Relation>,
    raw: BTreeMap<String, Vec<(usize, Vec<String>, Vec<Period>, Vec<u32>)>>,
    entities: BTreeSet<String>,
}

impl DatabaseBuilder {
    pub fn new(axis: Axis) -> DatabaseBuilder {
        DatabaseBuilder {
            axis,
            relations: BTreeMap::new(),
            raw: BTreeMap::new(),
            entities: BTreeSet::new(),
        }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn relation(&mut self, name: &str, arity: usize, class: VerbClass) -> Result<&mut Self, DbError> {
        self.relation_at(0, name, arity, class)
    }

    fn relation_at(&mut self, line: usize, name: &str, arity: usize, class: VerbClass) -> Result<&mut Self, DbError> {
        if arity == 0 {
            return Err(DbError::Validation {
                line,
                msg: format!("relation {name} must have arity at least 1"),
            });
        }
        if self.relations.contains_key(name) {
            return Err(DbError::Validation {
                line,
                msg: format!("relation {name} declared twice"),
            });
        }
        self.relations.insert(
            name.to_string(),
            Relation {
                predicate: name.to_string(),
                arity,
                class,
                tuples: Vec::new(),
            },
        );
        Ok(self)
    }

    pub fn entity(&mut self, name: &str) -> &mut Self {
        self.entities.insert(name.to_string());
        self
    }

    pub fn tuple(
        &mut self,
        name: &str,
        values: &[&str],
        valid: &[Period],
        climaxes: &[u32],
    ) -> Result<&mut Self, DbError> {
        self.tuple_at(
            0,
            name,
            values.iter().map(|s| s.to_string()).collect(),
            valid.to_vec(),
            climaxes.to_vec(),
        )
    }

    fn tuple_at(
        &mut self,
        line: usize,
        name: &str,
        values: Vec<String>,
        valid: Vec<Period>,
        climaxes: Vec<u32>,
    ) -> Result<&mut Self, DbError> {
        let rel = self.relations.get(name).ok_or_else(|| DbError::Validation {
            line,
            msg: format!("tuple for undeclared relation {name}"),
        })?;
        if values.len() != rel.arity {
            return Err(DbError::Validation {
                line,
                msg: format!("relation {name} has arity {}, tuple has {} values", rel.arity, values.len()),
            });
        }
        match rel.class {
            VerbClass::Timeless if !valid.is_empty() => {
                return Err(DbError::Validation {
                    line,
                    msg: format!("timeless relation {name} takes no valid time"),
                })
            }
            VerbClass::Timeless => {}
            _ if valid.is_empty() => {
                return Err(DbError::Validation {
                    line,
                    msg: format!("tuple of {name} needs a valid time"),
                })
            }
            _ => {}
        }
        if !climaxes.is_empty() && rel.class != VerbClass::CulmActivity {
            return Err(DbError::Validation {
                line,
                msg: format!("climax points on non-culminated-activity relation {name}"),
            });
        }
        for p in &valid {
            self.axis
                .check_period(p)
                .map_err(|source| DbError::Range { line, source })?;
        }
        for &c in &climaxes {
            self.axis
                .check_point(c)
                .map_err(|source| DbError::Range { line, source })?;
        }
        self.entities.extend(values.iter().cloned());
        self.raw
            .entry(name.to_string())
            .or_default()
            .push((line, values, valid, climaxes));
        Ok(self)
    }

    /// Coalesces value-equivalent tuples and checks that every climax ends a
    /// maximal period of the merged valid time.
    pub fn build(self) -> Result<Database, DbError> {
        let DatabaseBuilder {
            axis,
            mut relations,
            raw,
            entities,
        } = self;
        for (name, tuples) in raw {
            let rel = relations.get_mut(&name).expect("declared");
            let mut merged: BTreeMap<Vec<String>, (usize, Vec<Period>, BTreeSet<u32>)> = BTreeMap::new();
            for (line, values, valid, climaxes) in tuples {
                let slot = merged.entry(values).or_insert((line, Vec::new(), BTreeSet::new()));
                slot.0 = line;
                slot.1.extend(valid);
                slot.2.extend(climaxes);
            }
            for (values, (line, periods, climaxes)) in merged {
                let valid = normalize(periods);
                for &c in &climaxes {
                    if !valid.periods().iter().any(|p| p.end() == c) {
                        return Err(DbError::Validation {
                            line,
                            msg: format!(
                                "climax {c} of {name}({}) is not the end of a maximal period of {valid}",
                                values.join(", ")
                            ),
                        });
                    }
                }
                rel.tuples.push(Tuple {
                    values,
                    valid,
                    climaxes,
                });
            }
        }
        Ok(Database {
            axis,
            relations,
            entities,
        })
    }
}

fn parse_day(text: &str, line: usize) -> Result<NaiveDate, DbError> {
    match crate::timecore::parse_date_expr(text) {
        Ok(crate::timecore::DateExpr::Date(d)) => d
            .to_naive()
            .map_err(|source| DbError::Range { line, source }),
        _ => Err(DbError::Syntax {
            line,
            msg: format!("expected a date, found `{text}`"),
        }),
    }
}

fn parse_periods(text: &str, axis: &Axis, line: usize) -> Result<Vec<Period>, DbError> {
    let range = |source| DbError::Range { line, source };
    text.split(';')
        .map(|item| {
            let (a, b) = item.split_once("..").unwrap_or((item, item));
            let start = axis.parse_timestamp(a, Bound::Start).map_err(range)?;
            let end = axis.parse_timestamp(b, Bound::End).map_err(range)?;
            Period::new(start.0, end.0).map_err(range)
        })
        .collect()
}

/// Loads the line-oriented database format:
///
/// ```text
/// axis 1/1/1994 31/12/1995 day
/// relation contain/2 state
/// tuple contain tank2 water valid=1/6/1994..30/6/1994
/// relation fixing/2 culm_activity
/// tuple fixing john eng2 valid=2/6/1994..5/6/1994 climax=5/6/1994
/// relation engine/1 timeless
/// tuple engine eng2
/// ```
///
/// Sub-day timestamps are written `D/M/YYYY@HH:MM`; `entity NAME` declares
/// an entity that occurs in no tuple.
pub fn load_database(text: &str) -> Result<Database, DbError> {
    let mut builder: Option<DatabaseBuilder> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let syntax = |msg: String| DbError::Syntax { line, msg };
        match words[0] {
            "axis" => {
                if builder.is_some() {
                    return Err(syntax("axis declared twice".into()));
                }
                if words.len() != 4 {
                    return Err(syntax("expected `axis FIRST LAST GRANULARITY`".into()));
                }
                let first = parse_day(words[1], line)?;
                let last = parse_day(words[2], line)?;
                let gran = Granularity::parse(words[3])
                    .ok_or_else(|| syntax(format!("unknown granularity `{}`", words[3])))?;
                let axis = Axis::spanning(first, last, gran).map_err(|source| DbError::Range { line, source })?;
                builder = Some(DatabaseBuilder::new(axis));
            }
            kw @ ("relation" | "tuple" | "entity") => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| syntax(format!("`{kw}` before the axis declaration")))?;
                match kw {
                    "relation" => {
                        if words.len() != 3 {
                            return Err(syntax("expected `relation NAME/ARITY CLASS`".into()));
                        }
                        let (name, arity) = words[1]
                            .split_once('/')
                            .and_then(|(n, a)| Some((n, a.parse::<usize>().ok()?)))
                            .ok_or_else(|| syntax(format!("malformed relation head `{}`", words[1])))?;
                        let class = VerbClass::parse(words[2])
                            .ok_or_else(|| syntax(format!("unknown class `{}`", words[2])))?;
                        b.relation_at(line, name, arity, class)?;
                    }
                    "entity" => {
                        if words.len() < 2 {
                            return Err(syntax("expected `entity NAME...`".into()));
                        }
                        for w in &words[1..] {
                            b.entity(w);
                        }
                    }
                    _ => {
                        if words.len() < 2 {
                            return Err(syntax("expected `tuple NAME VALUE...`".into()));
                        }
                        let mut values = Vec::new();
                        let mut valid = Vec::new();
                        let mut climaxes = Vec::new();
                        for w in &words[2..] {
                            if let Some(v) = w.strip_prefix("valid=") {
                                valid.extend(parse_periods(v, b.axis(), line)?);
                            } else if let Some(c) = w.strip_prefix("climax=") {
                                for item in c.split(';') {
                                    let t = b
                                        .axis()
                                        .parse_timestamp(item, Bound::End)
                                        .map_err(|source| DbError::Range { line, source })?;
                                    climaxes.push(t.0);
                                }
                            } else if w.contains('=') {
                                return Err(syntax(format!("unknown attribute `{w}`")));
                            } else {
                                values.push(w.to_string());
                            }
                        }
                        b.tuple_at(line, words[1], values, valid, climaxes)?;
                    }
                }
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    builder
        .ok_or(DbError::Syntax {
            line: 0,
            msg: "missing axis declaration".into(),
        })?
        .build()
}
