//! TOP formulae: abstract syntax, well-formedness, canonical text form and
//! the Culm-cancellation rewrite applied under `For`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::timecore::{parse_date_expr, DateExpr, UnitName};

/// Aspectual class of a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerbClass {
    State,
    Activity,
    CulmActivity,
    Point,
    /// Sortal predicates such as `engine(x)`, true over the whole axis.
    Timeless,
}

impl VerbClass {
    pub fn parse(s: &str) -> Option<VerbClass> {
        Some(match s {
            "state" => VerbClass::State,
            "activity" => VerbClass::Activity,
            "culm_activity" => VerbClass::CulmActivity,
            "point" => VerbClass::Point,
            "timeless" => VerbClass::Timeless,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerbClass::State => "state",
            VerbClass::Activity => "activity",
            VerbClass::CulmActivity => "culm_activity",
            VerbClass::Point => "point",
            VerbClass::Timeless => "timeless",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredicateInfo {
    pub arity: usize,
    pub class: VerbClass,
}

/// Anything that can declare predicate arities and classes: a lexicon or a database.
pub trait Schema {
    fn predicate(&self, symbol: &str) -> Option<PredicateInfo>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Entity,
    Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

impl Variable {
    pub fn entity(name: &str) -> Variable {
        Variable {
            name: name.to_string(),
            kind: VarKind::Entity,
        }
    }

    pub fn event(name: &str) -> Variable {
        Variable {
            name: name.to_string(),
            kind: VarKind::Event,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(s: &str) -> Term {
        Term::Const(s.to_string())
    }

    pub fn var(s: &str) -> Term {
        Term::Var(s.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pred {
    pub symbol: String,
    pub args: Vec<Term>,
}

impl Pred {
    pub fn new(symbol: &str, args: Vec<Term>) -> Pred {
        Pred {
            symbol: symbol.to_string(),
            args,
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.symbol)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// First argument of `At`: a date or a time of day. Equality ignores the
/// surface spelling (`1/6/94` equals `1/6/1994`).
#[derive(Debug, Clone, Eq)]
pub struct TemporalPattern {
    pub text: String,
    pub expr: DateExpr,
}

impl TemporalPattern {
    pub fn parse(text: &str) -> Result<TemporalPattern, crate::timecore::TimeError> {
        Ok(TemporalPattern {
            text: text.to_string(),
            expr: parse_date_expr(text)?,
        })
    }

    pub fn is_time_of_day(&self) -> bool {
        matches!(self.expr, DateExpr::Time(_))
    }
}

impl PartialEq for TemporalPattern {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl std::hash::Hash for TemporalPattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.expr.hash(state)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred(Pred),
    Culm(Pred),
    Begin(Box<Formula>),
    End(Box<Formula>),
    Past(String, Box<Formula>),
    Pres(String, Box<Formula>),
    Perf(String, Box<Formula>),
    At(TemporalPattern, Box<Formula>),
    For(UnitName, u32, Box<Formula>),
    Exists(String, Vec<Pred>, Box<Formula>),
    Interrog(String, Vec<Pred>, Box<Formula>),
    InterrogMxl(String, Box<Formula>),
}

// Small constructors keep test and composition code readable.
impl Formula {
    pub fn pred(symbol: &str, args: &[Term]) -> Formula {
        Formula::Pred(Pred::new(symbol, args.to_vec()))
    }

    pub fn culm(p: Pred) -> Formula {
        Formula::Culm(p)
    }

    pub fn begin(f: Formula) -> Formula {
        Formula::Begin(Box::new(f))
    }

    pub fn end(f: Formula) -> Formula {
        Formula::End(Box::new(f))
    }

    pub fn past(e: &str, f: Formula) -> Formula {
        Formula::Past(e.to_string(), Box::new(f))
    }

    pub fn pres(e: &str, f: Formula) -> Formula {
        Formula::Pres(e.to_string(), Box::new(f))
    }

    pub fn perf(e: &str, f: Formula) -> Formula {
        Formula::Perf(e.to_string(), Box::new(f))
    }

    pub fn at(pattern: TemporalPattern, f: Formula) -> Formula {
        Formula::At(pattern, Box::new(f))
    }

    pub fn for_(unit: UnitName, n: u32, f: Formula) -> Formula {
        Formula::For(unit, n, Box::new(f))
    }

    pub fn exists(x: &str, rest: Vec<Pred>, f: Formula) -> Formula {
        Formula::Exists(x.to_string(), rest, Box::new(f))
    }

    pub fn interrog(x: &str, rest: Vec<Pred>, f: Formula) -> Formula {
        Formula::Interrog(x.to_string(), rest, Box::new(f))
    }

    pub fn mxl(e: &str, f: Formula) -> Formula {
        Formula::InterrogMxl(e.to_string(), Box::new(f))
    }

    pub fn children(&self) -> Option<&Formula> {
        match self {
            Formula::Pred(_) | Formula::Culm(_) => None,
            Formula::Begin(f)
            | Formula::End(f)
            | Formula::Past(_, f)
            | Formula::Pres(_, f)
            | Formula::Perf(_, f)
            | Formula::At(_, f)
            | Formula::For(_, _, f)
            | Formula::Exists(_, _, f)
            | Formula::Interrog(_, _, f)
            | Formula::InterrogMxl(_, f) => Some(f),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map_or(0, Formula::depth)
    }

    /// The single predicate at the bottom of the operator spine.
    pub fn anchor(&self) -> &Pred {
        match self {
            Formula::Pred(p) | Formula::Culm(p) => p,
            _ => self.children().expect("operator has a child").anchor(),
        }
    }

    pub fn mxl_var(&self) -> Option<&str> {
        match self {
            Formula::InterrogMxl(e, _) => Some(e),
            _ => self.children().and_then(Formula::mxl_var),
        }
    }

    pub fn contains_culm(&self) -> bool {
        match self {
            Formula::Culm(_) => true,
            _ => self.children().is_some_and(Formula::contains_culm),
        }
    }

    /// Interrogative entity variables with their restrictions, outermost first.
    pub fn interrogatives(&self) -> Vec<(&str, &[Pred])> {
        let mut out = Vec::new();
        let mut node = Some(self);
        while let Some(f) = node {
            if let Formula::Interrog(x, rest, _) = f {
                out.push((x.as_str(), rest.as_slice()));
            }
            node = f.children();
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Operators whose event time is the event time of their child.
fn preserves_event_time(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Past(..)
            | Formula::Pres(..)
            | Formula::At(..)
            | Formula::For(..)
            | Formula::Exists(..)
            | Formula::Interrog(..)
            | Formula::InterrogMxl(..)
    )
}

/// Returns the violated invariants, empty for a well-formed formula.
pub fn well_formed(f: &Formula, schema: &dyn Schema) -> Vec<String> {
    let mut v = Vec::new();
    let mut bound: Vec<Variable> = Vec::new();
    let mut binders: BTreeSet<String> = BTreeSet::new();
    check(f, schema, &mut bound, &mut binders, &mut v);

    let mxls = count_mxl(f);
    if mxls > 1 {
        v.push("more than one ?mxl quantifier".to_string());
    }
    if let Some(e) = f.mxl_var() {
        let mut indexes = 0;
        let mut reachable = false;
        let mut node = Some(f);
        let mut on_spine = true;
        while let Some(n) = node {
            if let Formula::Past(i, _) | Formula::Pres(i, _) = n {
                if i == e {
                    indexes += 1;
                    reachable |= on_spine;
                }
            }
            on_spine &= preserves_event_time(n);
            node = n.children();
        }
        if indexes != 1 {
            v.push(format!(
                "?mxl variable {e} must index exactly one Past/Pres, found {indexes}"
            ));
        } else if !reachable {
            v.push(format!(
                "?mxl variable {e} is separated from its Past/Pres by an event-time changing operator"
            ));
        }
    }
    v
}

fn count_mxl(f: &Formula) -> usize {
    let here = usize::from(matches!(f, Formula::InterrogMxl(..)));
    here + f.children().map_or(0, count_mxl)
}

fn check_pred(
    p: &Pred,
    schema: &dyn Schema,
    bound: &[Variable],
    out: &mut Vec<String>,
) -> Option<PredicateInfo> {
    for a in &p.args {
        if let Term::Var(x) = a {
            match bound.iter().rev().find(|b| &b.name == x) {
                None => out.push(format!("unbound variable {x}")),
                Some(b) if b.kind == VarKind::Event => {
                    out.push(format!("event variable {x} used as a predicate argument"))
                }
                Some(_) => {}
            }
        }
    }
    match schema.predicate(&p.symbol) {
        None => {
            out.push(format!("unknown predicate {}", p.symbol));
            None
        }
        Some(info) => {
            if info.arity != p.args.len() {
                out.push(format!(
                    "predicate {} expects {} arguments, got {}",
                    p.symbol,
                    info.arity,
                    p.args.len()
                ));
            }
            Some(info)
        }
    }
}

fn bind(
    var: &Variable,
    bound: &mut Vec<Variable>,
    binders: &mut BTreeSet<String>,
    out: &mut Vec<String>,
) {
    if !binders.insert(var.name.clone()) {
        out.push(format!("variable {} bound more than once", var.name));
    }
    bound.push(var.clone());
}

fn check(
    f: &Formula,
    schema: &dyn Schema,
    bound: &mut Vec<Variable>,
    binders: &mut BTreeSet<String>,
    out: &mut Vec<String>,
) {
    match f {
        Formula::Pred(p) => {
            check_pred(p, schema, bound, out);
        }
        Formula::Culm(p) => {
            if let Some(info) = check_pred(p, schema, bound, out) {
                if info.class != VerbClass::CulmActivity {
                    out.push(format!(
                        "Culm over non-culminated-activity predicate {}",
                        p.symbol
                    ));
                }
            }
        }
        Formula::Begin(g) | Formula::End(g) | Formula::At(_, g) => {
            check(g, schema, bound, binders, out)
        }
        Formula::For(_, n, g) => {
            if *n == 0 {
                out.push("For count must be positive".to_string());
            }
            check(g, schema, bound, binders, out)
        }
        Formula::Past(e, g) | Formula::Pres(e, g) | Formula::Perf(e, g) => {
            let n = bound.len();
            // An index already bound by ?mxl is a use, not a new binding.
            let by_mxl = !matches!(f, Formula::Perf(..))
                && bound.iter().any(|b| b.name == format!("?{e}"));
            if by_mxl {
                if !binders.insert(format!("{e}#index")) {
                    out.push(format!("variable {e} bound more than once"));
                }
            } else {
                bind(&Variable::event(e), bound, binders, out);
            }
            check(g, schema, bound, binders, out);
            bound.truncate(n);
        }
        Formula::Exists(x, rest, g) | Formula::Interrog(x, rest, g) => {
            let n = bound.len();
            bind(&Variable::entity(x), bound, binders, out);
            for p in rest {
                check_pred(p, schema, bound, out);
                for a in &p.args {
                    if let Term::Var(y) = a {
                        if y != x {
                            out.push(format!(
                                "restriction of {x} mentions another variable {y}"
                            ));
                        }
                    }
                }
            }
            check(g, schema, bound, binders, out);
            bound.truncate(n);
        }
        Formula::InterrogMxl(e, g) => {
            let n = bound.len();
            bind(&Variable::event(e), bound, binders, out);
            bound.push(Variable::event(&format!("?{e}")));
            check(g, schema, bound, binders, out);
            bound.truncate(n);
        }
    }
}

/// Removes every `Culm` dominated by a `For`.
pub fn cancel_culm_under_for(f: &Formula) -> Formula {
    fn go(f: &Formula, under_for: bool) -> Formula {
        let rec = |g: &Formula| Box::new(go(g, under_for));
        match f {
            Formula::Culm(p) if under_for => Formula::Pred(p.clone()),
            Formula::Pred(_) | Formula::Culm(_) => f.clone(),
            Formula::For(u, n, g) => Formula::For(*u, *n, Box::new(go(g, true))),
            Formula::Begin(g) => Formula::Begin(rec(g)),
            Formula::End(g) => Formula::End(rec(g)),
            Formula::Past(e, g) => Formula::Past(e.clone(), rec(g)),
            Formula::Pres(e, g) => Formula::Pres(e.clone(), rec(g)),
            Formula::Perf(e, g) => Formula::Perf(e.clone(), rec(g)),
            Formula::At(p, g) => Formula::At(p.clone(), rec(g)),
            Formula::Exists(x, r, g) => Formula::Exists(x.clone(), r.clone(), rec(g)),
            Formula::Interrog(x, r, g) => Formula::Interrog(x.clone(), r.clone(), rec(g)),
            Formula::InterrogMxl(e, g) => Formula::InterrogMxl(e.clone(), rec(g)),
        }
    }
    go(f, false)
}

pub fn free_vars(f: &Formula) -> BTreeSet<Variable> {
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<Variable>) {
        let pred = |p: &Pred, bound: &Vec<String>, out: &mut BTreeSet<Variable>| {
            for a in &p.args {
                if let Term::Var(x) = a {
                    if !bound.contains(x) {
                        out.insert(Variable::entity(x));
                    }
                }
            }
        };
        match f {
            Formula::Pred(p) | Formula::Culm(p) => pred(p, bound, out),
            Formula::Exists(x, rest, g) | Formula::Interrog(x, rest, g) => {
                bound.push(x.clone());
                for p in rest {
                    pred(p, bound, out);
                }
                go(g, bound, out);
                bound.pop();
            }
            Formula::Past(e, g)
            | Formula::Pres(e, g)
            | Formula::Perf(e, g)
            | Formula::InterrogMxl(e, g) => {
                bound.push(e.clone());
                go(g, bound, out);
                bound.pop();
            }
            _ => go(f.children().expect("operator"), bound, out),
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Renames bound variables to `x1, x2, ...` / `e1, e2, ...` in binding order.
pub fn canonicalize(f: &Formula) -> Formula {
    struct Namer {
        map: BTreeMap<String, String>,
        scopes: Vec<(String, Option<String>)>,
        entities: usize,
        events: usize,
    }
    impl Namer {
        fn bind(&mut self, name: &str, kind: VarKind) -> String {
            let fresh = match kind {
                VarKind::Entity => {
                    self.entities += 1;
                    format!("x{}", self.entities)
                }
                VarKind::Event => {
                    self.events += 1;
                    format!("e{}", self.events)
                }
            };
            let old = self.map.insert(name.to_string(), fresh.clone());
            self.scopes.push((name.to_string(), old));
            fresh
        }
        fn unbind(&mut self) {
            let (name, old) = self.scopes.pop().expect("scope");
            match old {
                Some(o) => self.map.insert(name, o),
                None => self.map.remove(&name),
            };
        }
        fn term(&self, t: &Term) -> Term {
            match t {
                Term::Var(x) => Term::Var(self.map.get(x).cloned().unwrap_or_else(|| x.clone())),
                c => c.clone(),
            }
        }
        fn pred(&self, p: &Pred) -> Pred {
            Pred {
                symbol: p.symbol.clone(),
                args: p.args.iter().map(|t| self.term(t)).collect(),
            }
        }
        fn index(&mut self, e: &str, g: &Formula, mk: fn(String, Box<Formula>) -> Formula, reuse: bool) -> Formula {
            if reuse {
                if let Some(n) = self.map.get(e).cloned() {
                    return mk(n, Box::new(self.go(g)));
                }
            }
            let n = self.bind(e, VarKind::Event);
            let body = self.go(g);
            self.unbind();
            mk(n, Box::new(body))
        }
        fn go(&mut self, f: &Formula) -> Formula {
            match f {
                Formula::Pred(p) => Formula::Pred(self.pred(p)),
                Formula::Culm(p) => Formula::Culm(self.pred(p)),
                Formula::Begin(g) => Formula::Begin(Box::new(self.go(g))),
                Formula::End(g) => Formula::End(Box::new(self.go(g))),
                Formula::At(p, g) => Formula::At(p.clone(), Box::new(self.go(g))),
                Formula::For(u, n, g) => Formula::For(*u, *n, Box::new(self.go(g))),
                Formula::Past(e, g) => self.index(e, g, Formula::Past, true),
                Formula::Pres(e, g) => self.index(e, g, Formula::Pres, true),
                Formula::Perf(e, g) => self.index(e, g, Formula::Perf, false),
                Formula::InterrogMxl(e, g) => self.index(e, g, Formula::InterrogMxl, false),
                Formula::Exists(x, r, g) | Formula::Interrog(x, r, g) => {
                    let n = self.bind(x, VarKind::Entity);
                    let rest = r.iter().map(|p| self.pred(p)).collect();
                    let body = Box::new(self.go(g));
                    self.unbind();
                    if matches!(f, Formula::Exists(..)) {
                        Formula::Exists(n, rest, body)
                    } else {
                        Formula::Interrog(n, rest, body)
                    }
                }
            }
        }
    }
    Namer {
        map: BTreeMap::new(),
        scopes: Vec::new(),
        entities: 0,
        events: 0,
    }
    .go(f)
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    canonicalize(a) == canonicalize(b)
}

/// Canonical concrete syntax.
pub fn render(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}

fn write_rest(rest: &[Pred], s: &mut String) {
    for (i, p) in rest.iter().enumerate() {
        if i > 0 {
            s.push_str(" and ");
        }
        s.push_str(&p.to_string());
    }
    if !rest.is_empty() {
        s.push(' ');
    }
    s.push_str(": ");
}

fn write_formula(f: &Formula, s: &mut String) {
    use std::fmt::Write;
    match f {
        Formula::Pred(p) => s.push_str(&p.to_string()),
        Formula::Culm(p) => {
            let _ = write!(s, "Culm[{p}]");
        }
        Formula::Begin(g) | Formula::End(g) => {
            s.push_str(if matches!(f, Formula::Begin(_)) { "Begin[" } else { "End[" });
            write_formula(g, s);
            s.push(']');
        }
        Formula::Past(e, g) | Formula::Pres(e, g) | Formula::Perf(e, g) => {
            let op = match f {
                Formula::Past(..) => "Past",
                Formula::Pres(..) => "Pres",
                _ => "Perf",
            };
            let _ = write!(s, "{op}[{e}, ");
            write_formula(g, s);
            s.push(']');
        }
        Formula::At(p, g) => {
            let _ = write!(s, "At[\"{}\", ", p.text);
            write_formula(g, s);
            s.push(']');
        }
        Formula::For(u, n, g) => {
            let _ = write!(s, "For[{u}, {n}, ");
            write_formula(g, s);
            s.push(']');
        }
        Formula::Exists(x, rest, g) => {
            let _ = write!(s, "exists {x} ");
            write_rest(rest, s);
            write_formula(g, s);
        }
        Formula::Interrog(x, rest, g) => {
            let _ = write!(s, "? {x} ");
            write_rest(rest, s);
            write_formula(g, s);
        }
        Formula::InterrogMxl(e, g) => {
            let _ = write!(s, "?mxl {e} ");
            write_formula(g, s);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: expected {expected}, found {found}")]
pub struct FormulaParseError {
    pub pos: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Sym(char),
    Query,
    QueryMxl,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Query => f.write_str("`?`"),
            Tok::QueryMxl => f.write_str("`?mxl`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c == '"' {
            let start = i;
            let close = text[i + 1..].find('"').ok_or(FormulaParseError {
                pos: start,
                expected: "closing `\"`".into(),
                found: "end of input".into(),
            })?;
            out.push((start, Tok::Str(text[i + 1..i + 1 + close].to_string())));
            i += close + 2;
        } else if c == '?' {
            if text[i..].starts_with("?mxl") {
                out.push((i, Tok::QueryMxl));
                i += 4;
            } else {
                out.push((i, Tok::Query));
                i += 1;
            }
        } else if "[](),:".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(FormulaParseError {
                pos: i,
                expected: "a formula token".into(),
                found: format!("`{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    scope: Vec<String>,
}

fn looks_like_var(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some('x' | 'e'))
        && s.len() > 1
        && cs.all(|c| c.is_ascii_digit())
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].1
    }

    fn err<T>(&self, expected: &str) -> Result<T, FormulaParseError> {
        let (pos, tok) = &self.toks[self.i];
        Err(FormulaParseError {
            pos: *pos,
            expected: expected.to_string(),
            found: tok.to_string(),
        })
    }

    fn sym(&mut self, c: char) -> Result<(), FormulaParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.i += 1;
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, FormulaParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.i += 1;
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn pred(&mut self) -> Result<Pred, FormulaParseError> {
        let symbol = self.ident("a predicate name")?;
        self.sym('(')?;
        let mut args = Vec::new();
        loop {
            let t = self.ident("a term")?;
            args.push(if self.scope.contains(&t) || looks_like_var(&t) {
                Term::Var(t)
            } else {
                Term::Const(t)
            });
            if *self.peek() == Tok::Sym(',') {
                self.i += 1;
            } else {
                break;
            }
        }
        self.sym(')')?;
        Ok(Pred { symbol, args })
    }

    fn rest(&mut self) -> Result<Vec<Pred>, FormulaParseError> {
        let mut rest = Vec::new();
        if *self.peek() == Tok::Sym(':') {
            self.i += 1;
            return Ok(rest);
        }
        rest.push(self.pred()?);
        while *self.peek() == Tok::Ident("and".into()) {
            self.i += 1;
            rest.push(self.pred()?);
        }
        if *self.peek() == Tok::Sym(':') {
            self.i += 1;
        }
        Ok(rest)
    }

    fn scoped<T>(
        &mut self,
        var: &str,
        f: impl FnOnce(&mut Self) -> Result<T, FormulaParseError>,
    ) -> Result<T, FormulaParseError> {
        self.scope.push(var.to_string());
        let r = f(self);
        self.scope.pop();
        r
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek().clone() {
            Tok::Query | Tok::QueryMxl => {
                let mxl = *self.peek() == Tok::QueryMxl;
                self.i += 1;
                let x = self.ident("a variable")?;
                if mxl {
                    let body = self.scoped(&x, Self::formula)?;
                    Ok(Formula::InterrogMxl(x, Box::new(body)))
                } else {
                    let (rest, body) = self.scoped(&x, |p| Ok((p.rest()?, p.formula()?)))?;
                    Ok(Formula::Interrog(x, rest, Box::new(body)))
                }
            }
            Tok::Ident(w) if w == "exists" && !matches!(self.peek2(), Tok::Sym('(')) => {
                self.i += 1;
                let x = self.ident("a variable")?;
                let (rest, body) = self.scoped(&x, |p| Ok((p.rest()?, p.formula()?)))?;
                Ok(Formula::Exists(x, rest, Box::new(body)))
            }
            Tok::Ident(w) if *self.peek2() == Tok::Sym('[') => {
                self.i += 2;
                let f = match w.as_str() {
                    "Culm" => {
                        let p = self.pred()?;
                        Formula::Culm(p)
                    }
                    "Begin" => Formula::Begin(Box::new(self.formula()?)),
                    "End" => Formula::End(Box::new(self.formula()?)),
                    "Past" | "Pres" | "Perf" => {
                        let e = self.ident("an event variable")?;
                        self.sym(',')?;
                        let body = self.scoped(&e, Self::formula)?;
                        let body = Box::new(body);
                        match w.as_str() {
                            "Past" => Formula::Past(e, body),
                            "Pres" => Formula::Pres(e, body),
                            _ => Formula::Perf(e, body),
                        }
                    }
                    "At" => {
                        let text = match self.peek().clone() {
                            Tok::Str(s) => s,
                            _ => return self.err("a quoted date or time"),
                        };
                        let pos = self.toks[self.i].0;
                        let pattern = TemporalPattern::parse(&text).map_err(|_| FormulaParseError {
                            pos,
                            expected: "a date or time of day".into(),
                            found: format!("\"{text}\""),
                        })?;
                        self.i += 1;
                        self.sym(',')?;
                        Formula::At(pattern, Box::new(self.formula()?))
                    }
                    "For" => {
                        let pos = self.toks[self.i].0;
                        let u = self.ident("a duration unit")?;
                        let unit = UnitName::parse(&u).ok_or(FormulaParseError {
                            pos,
                            expected: "a duration unit".into(),
                            found: format!("`{u}`"),
                        })?;
                        self.sym(',')?;
                        let pos = self.toks[self.i].0;
                        let n = self.ident("a count")?;
                        let n: u32 = n.parse().map_err(|_| FormulaParseError {
                            pos,
                            expected: "a count".into(),
                            found: format!("`{n}`"),
                        })?;
                        self.sym(',')?;
                        Formula::For(unit, n, Box::new(self.formula()?))
                    }
                    _ => {
                        self.i -= 2;
                        return self.err("an operator name");
                    }
                };
                self.sym(']')?;
                Ok(f)
            }
            Tok::Ident(_) => Ok(Formula::Pred(self.pred()?)),
            _ => self.err("a formula"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        scope: Vec::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err("end of input");
    }
    Ok(f)
}
