//! Syntax check for the emitted query dialect.
//!
//! ```text
//! query   := [WITH id AS "(" query ")"] SELECT [SNAPSHOT] [DISTINCT] items
//!            [VALID expr] FROM source {"," source} [WHERE cond]
//!            [GROUP BY expr {"," expr}]
//! items   := "*" | expr [AS id] {"," expr [AS id]}
//! source  := "(" query ")" id | id "(" expr {"," expr} ")" id | id id
//! cond    := conj {OR conj}
//! conj    := neg {AND neg}
//! neg     := NOT neg | EXISTS "(" query ")" | TRUE | FALSE | "(" cond ")"
//!          | expr relop expr
//! relop   := "=" | "<>" | "<" | "<=" | ">" | ">=" | PRECEDES | CONTAINS
//!          | OVERLAPS | EQUALS | MEETS
//! expr    := term {("+" | "-") term}
//! term    := string | number | PERIOD string | PERIOD "(" expr "," expr ")"
//!          | INTERVAL number unit | func "(" expr {"," expr} ")"
//!          | id ["." (id | "*")]
//! func    := VALID | BEGIN | END | INTERSECT | DURATION | MIN
//! ```
//!
//! A query is followed by a single `;`. Comments run from `--` to the end
//! of the line.

use thiserror::Error;

use super::emit::is_keyword;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct DialectError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Kw(String),
    Id(String),
    Str,
    Num,
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, DialectError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let err = |msg: String| DialectError { line: line_no, msg };
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            } else if c == '\'' {
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err("unterminated string".into())),
                        Some('\'') if chars.get(i + 1) == Some(&'\'') => i += 2,
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                out.push((Tok::Str, line_no));
            } else if c == '"' {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err("unterminated quoted identifier".into()));
                }
                out.push((Tok::Id(chars[start..i].iter().collect()), line_no));
                i += 1;
            } else if c.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num, line_no));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if is_keyword(&word) {
                    out.push((Tok::Kw(word), line_no));
                } else {
                    out.push((Tok::Id(word), line_no));
                }
            } else {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let sym = match two.as_str() {
                    "<=" => Some("<="),
                    ">=" => Some(">="),
                    "<>" => Some("<>"),
                    _ => None,
                };
                if let Some(s) = sym {
                    out.push((Tok::Sym(s), line_no));
                    i += 2;
                    continue;
                }
                let s = match c {
                    '(' => "(",
                    ')' => ")",
                    ',' => ",",
                    '.' => ".",
                    '=' => "=",
                    '<' => "<",
                    '>' => ">",
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    ';' => ";",
                    other => return Err(err(format!("unexpected character {other:?}"))),
                };
                out.push((Tok::Sym(s), line_no));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult = Result<(), DialectError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |(_, l)| *l)
    }

    fn fail<T>(&self, msg: &str) -> Result<T, DialectError> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        };
        Err(DialectError {
            line: self.line(),
            msg: format!("expected {msg}, found {found}"),
        })
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Kw(w)) if w == k)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn kw(&mut self, k: &str) -> PResult {
        if self.is_kw(k) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(k)
        }
    }

    fn sym(&mut self, s: &str) -> PResult {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("'{s}'"))
        }
    }

    fn id(&mut self) -> PResult {
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail("identifier")
        }
    }

    fn query(&mut self) -> PResult {
        if self.is_kw("WITH") {
            self.pos += 1;
            self.id()?;
            self.kw("AS")?;
            self.sym("(")?;
            self.query()?;
            self.sym(")")?;
        }
        self.kw("SELECT")?;
        if self.is_kw("SNAPSHOT") {
            self.pos += 1;
        }
        if self.is_kw("DISTINCT") {
            self.pos += 1;
        }
        if self.is_sym("*") {
            self.pos += 1;
        } else {
            loop {
                self.expr()?;
                if self.is_kw("AS") {
                    self.pos += 1;
                    self.id()?;
                }
                if !self.is_sym(",") {
                    break;
                }
                self.pos += 1;
            }
        }
        if self.is_kw("VALID") {
            self.pos += 1;
            self.expr()?;
        }
        self.kw("FROM")?;
        loop {
            self.source()?;
            if !self.is_sym(",") {
                break;
            }
            self.pos += 1;
        }
        if self.is_kw("WHERE") {
            self.pos += 1;
            self.cond()?;
        }
        if self.is_kw("GROUP") {
            self.pos += 1;
            self.kw("BY")?;
            loop {
                self.expr()?;
                if !self.is_sym(",") {
                    break;
                }
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn source(&mut self) -> PResult {
        if self.is_sym("(") {
            self.pos += 1;
            self.query()?;
            self.sym(")")?;
            return self.id();
        }
        self.id()?;
        if self.is_sym("(") {
            self.pos += 1;
            self.args()?;
        }
        self.id()
    }

    fn args(&mut self) -> PResult {
        loop {
            self.expr()?;
            if !self.is_sym(",") {
                break;
            }
            self.pos += 1;
        }
        self.sym(")")
    }

    fn cond(&mut self) -> PResult {
        self.conj()?;
        while self.is_kw("OR") {
            self.pos += 1;
            self.conj()?;
        }
        Ok(())
    }

    fn conj(&mut self) -> PResult {
        self.neg()?;
        while self.is_kw("AND") {
            self.pos += 1;
            self.neg()?;
        }
        Ok(())
    }

    fn neg(&mut self) -> PResult {
        if self.is_kw("NOT") {
            self.pos += 1;
            return self.neg();
        }
        if self.is_kw("EXISTS") {
            self.pos += 1;
            self.sym("(")?;
            self.query()?;
            return self.sym(")");
        }
        if self.is_kw("TRUE") || self.is_kw("FALSE") {
            self.pos += 1;
            return Ok(());
        }
        if self.is_sym("(") {
            self.pos += 1;
            self.cond()?;
            return self.sym(")");
        }
        self.expr()?;
        let rel = ["=", "<>", "<", "<=", ">", ">="].iter().any(|s| self.is_sym(s))
            || ["PRECEDES", "CONTAINS", "OVERLAPS", "EQUALS", "MEETS"].iter().any(|k| self.is_kw(k));
        if !rel {
            return self.fail("comparison");
        }
        self.pos += 1;
        self.expr()
    }

    fn expr(&mut self) -> PResult {
        self.term()?;
        while self.is_sym("+") || self.is_sym("-") {
            self.pos += 1;
            self.term()?;
        }
        Ok(())
    }

    fn term(&mut self) -> PResult {
        match self.peek().cloned() {
            Some(Tok::Str) | Some(Tok::Num) => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::Kw(k)) if k == "PERIOD" => {
                self.pos += 1;
                if matches!(self.peek(), Some(Tok::Str)) {
                    self.pos += 1;
                    return Ok(());
                }
                self.sym("(")?;
                self.expr()?;
                self.sym(",")?;
                self.expr()?;
                self.sym(")")
            }
            Some(Tok::Kw(k)) if k == "INTERVAL" => {
                self.pos += 1;
                if !matches!(self.peek(), Some(Tok::Num)) {
                    return self.fail("number");
                }
                self.pos += 1;
                if self.is_kw("DAY") || self.is_kw("HOUR") || self.is_kw("MINUTE") {
                    self.pos += 1;
                    Ok(())
                } else {
                    self.fail("time unit")
                }
            }
            Some(Tok::Kw(k)) if ["VALID", "BEGIN", "END", "INTERSECT", "DURATION", "MIN"].contains(&k.as_str()) => {
                self.pos += 1;
                self.sym("(")?;
                self.args()
            }
            Some(Tok::Id(_)) => {
                self.pos += 1;
                if self.is_sym(".") {
                    self.pos += 1;
                    if self.is_sym("*") {
                        self.pos += 1;
                    } else {
                        self.id()?;
                    }
                }
                Ok(())
            }
            _ => self.fail("expression"),
        }
    }
}

/// Checks that `text` is one query of the dialect followed by `;`.
pub fn check_dialect(text: &str) -> Result<(), DialectError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.query()?;
    p.sym(";")?;
    if p.pos != p.toks.len() {
        return p.fail("end of input");
    }
    Ok(())
}
