//! TSQL2-style text for a translated query, one SELECT block per algebra
//! node. The text is for inspection only and is never executed.

use super::{translate, AlgExpr, CollectKind, QuantKind, Result, RowMode, WindowSource};
use crate::timecore::{render_period, Axis, Period};
use crate::topast::{Pred, Term};

const KEYWORDS: &[&str] = &[
    "SELECT", "SNAPSHOT", "DISTINCT", "VALID", "FROM", "WHERE", "GROUP", "BY", "WITH", "AS", "AND", "OR", "NOT",
    "EXISTS", "TRUE", "FALSE", "PERIOD", "INTERVAL", "BEGIN", "END", "INTERSECT", "DURATION", "MIN", "PRECEDES",
    "CONTAINS", "OVERLAPS", "EQUALS", "MEETS", "DAY", "HOUR", "MINUTE",
];

pub(crate) fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn table(symbol: &str) -> String {
    let up = symbol.to_ascii_uppercase();
    if is_keyword(&up) {
        format!("\"{up}\"")
    } else {
        up
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

struct Emitter<'a> {
    axis: &'a Axis,
    st: u32,
    next: usize,
}

struct Block {
    lines: Vec<String>,
    /// Entity variables exported as columns.
    cols: Vec<String>,
}

fn nest(child: Block, alias: &str) -> (Vec<String>, Vec<String>) {
    let mut lines = vec!["FROM (".to_string()];
    lines.extend(child.lines.into_iter().map(|l| format!("  {l}")));
    lines.push(format!(") {alias}"));
    (lines, child.cols)
}

fn select_list(alias: &str, cols: &[String]) -> String {
    if cols.is_empty() {
        "*".to_string()
    } else {
        cols.iter().map(|c| format!("{alias}.{c}")).collect::<Vec<_>>().join(", ")
    }
}

impl Emitter<'_> {
    fn alias(&mut self) -> usize {
        self.next += 1;
        self.next
    }

    fn period(&self, p: &Period) -> String {
        format!("PERIOD {}", quote(&render_period(p, self.axis)))
    }

    fn unit(&self) -> &'static str {
        match self.axis.granularity() {
            crate::timecore::Granularity::Day => "DAY",
            crate::timecore::Granularity::Hour => "HOUR",
            crate::timecore::Granularity::Minute => "MINUTE",
        }
    }

    fn scan(&mut self, p: &Pred) -> Block {
        let t = format!("t{}", self.alias());
        let mut items: Vec<String> = (1..=p.args.len()).map(|i| format!("{t}.ARG{i}")).collect();
        let mut conds = Vec::new();
        let mut cols: Vec<String> = Vec::new();
        let mut first_col: Vec<(String, usize)> = Vec::new();
        for (i, a) in p.args.iter().enumerate() {
            match a {
                Term::Const(c) => conds.push(format!("{t}.ARG{} = {}", i + 1, quote(c))),
                Term::Var(x) => match first_col.iter().find(|(v, _)| v == x) {
                    Some((_, j)) => conds.push(format!("{t}.ARG{} = {t}.ARG{}", i + 1, j)),
                    None => {
                        first_col.push((x.clone(), i + 1));
                        items.push(format!("{t}.ARG{} AS {x}", i + 1));
                        cols.push(x.clone());
                    }
                },
            }
        }
        let mut lines = vec![
            format!("-- TOP: {p}"),
            format!("SELECT {}", items.join(", ")),
            format!("VALID VALID({t})"),
            format!("FROM {} {t}", table(&p.symbol)),
        ];
        if !conds.is_empty() {
            lines.push(format!("WHERE {}", conds.join(" AND ")));
        }
        Block { lines, cols }
    }

    fn block(&mut self, a: &AlgExpr) -> Block {
        match a {
            AlgExpr::Scan(p) => self.scan(p),
            AlgExpr::CulmSelect(child) => {
                let AlgExpr::Scan(p) = child.as_ref() else {
                    unreachable!("CulmSelect is only built over Scan")
                };
                let n = self.alias();
                let (t, c) = (format!("t{n}"), format!("c{n}"));
                let inner = self.block(child);
                let (mut from, cols) = nest(inner, &t);
                let last = from.pop().expect("alias line");
                from.push(format!("{last}, {}_CLIMAX {c}", p.symbol.to_ascii_uppercase()));
                let mut conds: Vec<String> = (1..=p.args.len()).map(|i| format!("{c}.ARG{i} = {t}.ARG{i}")).collect();
                conds.push(format!("END(VALID({t})) = {c}.CLIMAX"));
                let mut lines = vec![
                    format!("-- TOP: Culm[{p}]"),
                    format!("SELECT {}", select_list(&t, &cols)),
                    format!("VALID VALID({t})"),
                ];
                lines.extend(from);
                lines.push(format!("WHERE {}", conds.join(" AND ")));
                Block { lines, cols }
            }
            AlgExpr::WindowRestrict { child, windows, source } => {
                let n = self.alias();
                let t = format!("t{n}");
                let dc = child.mode() == RowMode::DownwardClosed;
                let comment = match source {
                    WindowSource::Past => "-- TOP: Past, event time before speech time".to_string(),
                    WindowSource::Pres => "-- TOP: Pres, event time at speech time".to_string(),
                    WindowSource::At(pat) => format!("-- TOP: At[{}]", quote(&pat.text)),
                };
                let inner = self.block(child);
                let (mut from, cols) = nest(inner, &t);
                let valid_of = format!("VALID({t})");
                let (valid, cond) = match (source, windows.as_slice()) {
                    (_, []) => (format!("VALID {valid_of}"), "FALSE".to_string()),
                    (WindowSource::Past, [w]) => {
                        let now = self.period(&Period::point(self.st));
                        if dc {
                            (
                                format!("VALID INTERSECT({valid_of}, {})", self.period(w)),
                                format!("BEGIN({valid_of}) PRECEDES {now}"),
                            )
                        } else {
                            (format!("VALID {valid_of}"), format!("{valid_of} PRECEDES {now}"))
                        }
                    }
                    (_, [w]) => {
                        let w = self.period(w);
                        if dc {
                            (format!("VALID INTERSECT({valid_of}, {w})"), format!("{valid_of} OVERLAPS {w}"))
                        } else {
                            (format!("VALID {valid_of}"), format!("{w} CONTAINS {valid_of}"))
                        }
                    }
                    (_, ws) => {
                        let w = format!("w{n}");
                        let lits: Vec<String> = ws.iter().map(|p| self.period(p)).collect();
                        let last = from.pop().expect("alias line");
                        from.push(format!("{last}, WINDOWS({}) {w}", lits.join(", ")));
                        if dc {
                            (format!("VALID INTERSECT({valid_of}, {w}.P)"), format!("{valid_of} OVERLAPS {w}.P"))
                        } else {
                            (format!("VALID {valid_of}"), format!("{w}.P CONTAINS {valid_of}"))
                        }
                    }
                };
                let mut lines = vec![comment, format!("SELECT {}", select_list(&t, &cols)), valid];
                lines.extend(from);
                lines.push(format!("WHERE {cond}"));
                Block { lines, cols }
            }
            AlgExpr::SubperiodsOfDuration {
                child,
                points,
                unit,
                count,
            } => {
                let n = self.alias();
                let t = format!("t{n}");
                let dc = child.mode() == RowMode::DownwardClosed;
                let inner = self.block(child);
                let (mut from, cols) = nest(inner, &t);
                let interval = format!("INTERVAL {points} {}", self.unit());
                let mut lines = vec![
                    format!("-- TOP: For[{}, {count}]", unit.as_str()),
                    format!("SELECT {}", select_list(&t, &cols)),
                ];
                if dc {
                    let s = format!("s{n}");
                    let last = from.pop().expect("alias line");
                    from.push(format!("{last}, SUBPERIODS(VALID({t}), {interval}) {s}"));
                    lines.push(format!("VALID {s}.P"));
                    lines.extend(from);
                } else {
                    lines.push(format!("VALID VALID({t})"));
                    lines.extend(from);
                    lines.push(format!("WHERE DURATION(VALID({t})) = {interval}"));
                }
                Block { lines, cols }
            }
            AlgExpr::PrecedesJoin { window, child } => {
                let n = self.alias();
                let t = format!("t{n}");
                let earliest = if child.mode() == RowMode::DownwardClosed {
                    format!("MIN(BEGIN(VALID({t})))")
                } else {
                    format!("MIN(END(VALID({t})))")
                };
                let inner = self.block(child);
                let (from, cols) = nest(inner, &t);
                let mut lines = vec![
                    "-- TOP: Perf, an earlier event time anywhere on the axis".to_string(),
                    format!("SELECT {}", select_list(&t, &cols)),
                    format!(
                        "VALID PERIOD({earliest} + INTERVAL 1 {}, END({}))",
                        self.unit(),
                        self.period(window)
                    ),
                ];
                lines.extend(from);
                if !cols.is_empty() {
                    lines.push(format!("GROUP BY {}", select_list(&t, &cols)));
                }
                Block { lines, cols }
            }
            AlgExpr::BeginPoints(child) | AlgExpr::EndPoints(child) => {
                let n = self.alias();
                let t = format!("t{n}");
                let (name, acc) = if matches!(a, AlgExpr::BeginPoints(_)) {
                    ("Begin", "BEGIN")
                } else {
                    ("End", "END")
                };
                let dc = child.mode() == RowMode::DownwardClosed;
                let inner = self.block(child);
                let (mut from, cols) = nest(inner, &t);
                let mut lines = vec![format!("-- TOP: {name}"), format!("SELECT {}", select_list(&t, &cols))];
                if dc {
                    let p = format!("p{n}");
                    let last = from.pop().expect("alias line");
                    from.push(format!("{last}, POINTS(VALID({t})) {p}"));
                    lines.push(format!("VALID {p}.P"));
                } else {
                    lines.push(format!("VALID PERIOD({acc}(VALID({t})), {acc}(VALID({t})))"));
                }
                lines.extend(from);
                Block { lines, cols }
            }
            AlgExpr::EntityJoin {
                var,
                kind,
                restriction,
                body,
            } => {
                let n = self.alias();
                let (t, e) = (format!("t{n}"), format!("n{n}"));
                let inner = self.block(body);
                let (mut from, body_cols) = nest(inner, &t);
                let last = from.pop().expect("alias line");
                from.push(format!("{last}, ENTITIES {e}"));
                let in_body = body_cols.contains(var);
                let mut items: Vec<String> = body_cols
                    .iter()
                    .filter(|c| *c != var || *kind == QuantKind::Interrog)
                    .map(|c| format!("{t}.{c}"))
                    .collect();
                let mut cols: Vec<String> = body_cols
                    .iter()
                    .filter(|c| *c != var || *kind == QuantKind::Interrog)
                    .cloned()
                    .collect();
                if *kind == QuantKind::Interrog && !in_body {
                    items.push(format!("{e}.NAME AS {var}"));
                    cols.push(var.clone());
                }
                let mut conds = Vec::new();
                if in_body {
                    conds.push(format!("{e}.NAME = {t}.{var}"));
                }
                let mut sub_lines = Vec::new();
                for (i, p) in restriction.iter().enumerate() {
                    let r = format!("r{n}_{}", i + 1);
                    let wh: Vec<String> = p
                        .args
                        .iter()
                        .enumerate()
                        .map(|(j, a)| match a {
                            Term::Const(c) => format!("{r}.ARG{} = {}", j + 1, quote(c)),
                            Term::Var(_) => format!("{r}.ARG{} = {e}.NAME", j + 1),
                        })
                        .collect();
                    sub_lines.push((r, p, wh));
                }
                let kw = match kind {
                    QuantKind::Exists => "exists",
                    QuantKind::Interrog => "?",
                };
                let rest: Vec<String> = restriction.iter().map(ToString::to_string).collect();
                let mut lines = vec![
                    if rest.is_empty() {
                        format!("-- TOP: {kw} {var}")
                    } else {
                        format!("-- TOP: {kw} {var} {}", rest.join(" and "))
                    },
                    format!(
                        "SELECT {}",
                        if items.is_empty() {
                            "*".to_string()
                        } else {
                            items.join(", ")
                        }
                    ),
                    format!("VALID VALID({t})"),
                ];
                lines.extend(from);
                let mut where_lines: Vec<String> = Vec::new();
                let mut first = true;
                let mut push_cond = |text: String, lines: &mut Vec<String>| {
                    if first {
                        lines.push(format!("WHERE {text}"));
                        first = false;
                    } else {
                        lines.push(format!("  AND {text}"));
                    }
                };
                for c in conds {
                    push_cond(c, &mut where_lines);
                }
                for (r, p, wh) in sub_lines {
                    push_cond("EXISTS (".to_string(), &mut where_lines);
                    where_lines.push("    SELECT *".to_string());
                    where_lines.push(format!("    FROM {} {r}", table(&p.symbol)));
                    if !wh.is_empty() {
                        where_lines.push(format!("    WHERE {}", wh.join(" AND ")));
                    }
                    where_lines.push("  )".to_string());
                }
                lines.extend(where_lines);
                Block { lines, cols }
            }
            AlgExpr::Collect { kind, vars, child } => {
                let n = self.alias();
                let t = format!("t{n}");
                let inner = self.block(child);
                match kind {
                    CollectKind::Bool | CollectKind::Bindings => {
                        let (from, _) = nest(inner, &t);
                        let items = if *kind == CollectKind::Bool {
                            "'yes' AS answer".to_string()
                        } else {
                            select_list(&t, vars)
                        };
                        let mut lines = vec![
                            if *kind == CollectKind::Bool {
                                "-- TOP: yes/no answer".to_string()
                            } else {
                                format!("-- TOP: answers for {}", vars.join(", "))
                            },
                            format!("SELECT SNAPSHOT DISTINCT {items}"),
                        ];
                        lines.extend(from);
                        Block { lines, cols: vars.clone() }
                    }
                    CollectKind::Maximal => {
                        let (c, u) = (format!("c{n}"), format!("u{n}"));
                        let mut lines = vec![
                            "-- TOP: ?mxl, maximal event times".to_string(),
                            format!("WITH {c} AS ("),
                        ];
                        lines.extend(inner.lines.into_iter().map(|l| format!("  {l}")));
                        lines.push(")".to_string());
                        lines.push(format!("SELECT DISTINCT {}", select_list(&t, vars)));
                        lines.push(format!("VALID VALID({t})"));
                        lines.push(format!("FROM {c} {t}"));
                        lines.push("WHERE NOT EXISTS (".to_string());
                        lines.push("  SELECT *".to_string());
                        lines.push(format!("  FROM {c} {u}"));
                        let mut conds: Vec<String> = vars.iter().map(|v| format!("{u}.{v} = {t}.{v}")).collect();
                        conds.push(format!("VALID({u}) CONTAINS VALID({t})"));
                        conds.push(format!("NOT VALID({u}) EQUALS VALID({t})"));
                        lines.push(format!("  WHERE {}", conds.join(" AND ")));
                        lines.push(")".to_string());
                        Block { lines, cols: vars.clone() }
                    }
                }
            }
        }
    }
}

/// Query text for `f` at speech time `st`; identical input gives identical
/// output.
pub fn emit_tsql2(f: &crate::topast::Formula, st: u32, axis: &Axis) -> Result<String> {
    let alg = translate(f, st, axis)?;
    let mut e = Emitter { axis, st, next: 0 };
    let block = e.block(&alg);
    let mut out = block.lines.join("\n");
    out.push_str(";\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timecore::Granularity;
    use crate::topast::parse_formula;
    use chrono::NaiveDate;

    fn axis() -> Axis {
        Axis::new(NaiveDate::from_ymd_opt(1994, 1, 1).unwrap(), Granularity::Day, 39).unwrap()
    }

    #[test]
    fn past_uses_a_precedes_window() {
        let f = parse_formula("Past[e1, contain(tank2, water)]").unwrap();
        let text = emit_tsql2(&f, 30, &axis()).unwrap();
        assert!(text.contains("FROM CONTAIN t3"), "{text}");
        assert!(text.contains("WHERE BEGIN(VALID(t2)) PRECEDES PERIOD '31/1/1994..31/1/1994'"), "{text}");
    }

    #[test]
    fn culm_joins_the_climax_table() {
        let f = parse_formula("Past[e1, Culm[fixing(john, eng2)]]").unwrap();
        let text = emit_tsql2(&f, 30, &axis()).unwrap();
        assert!(text.contains("FIXING_CLIMAX c3"), "{text}");
        assert!(text.contains("END(VALID(t3)) = c3.CLIMAX"), "{text}");
    }

    #[test]
    fn output_reparses() {
        for text in [
            "Past[e1, contain(tank2, water)]",
            "?mxl e1 Past[e1, contain(tank2, water)]",
            "? x1 engine(x1) : ? x2 : Past[e1, Culm[fixing(x2, x1)]]",
            "exists x1 engine(x1) : At[\"1/1/94\", Past[e1, Perf[e2, fixing(john, x1)]]]",
            "Pres[e1, For[day, 2, End[Culm[fixing(john, eng2)]]]]",
            "Past[e1, Begin[For[week, 1, contain(tank2, x1)]]]",
            "Past[e1, Perf[e2, Culm[fixing(john, john)]]]",
        ] {
            let f = parse_formula(text).unwrap();
            let out = emit_tsql2(&f, 30, &axis());
            let Ok(out) = out else { continue };
            crate::tralg::check_dialect(&out).unwrap_or_else(|e| panic!("{e}\n{out}"));
            assert_eq!(emit_tsql2(&f, 30, &axis()).unwrap(), out);
        }
    }

    #[test]
    fn keyword_tables_are_quoted() {
        assert_eq!(table("end"), "\"END\"");
        assert_eq!(table("fixing"), "FIXING");
    }
}
