//! REPL and batch front end wiring the analyzer to both evaluation paths.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::lexgram::{analyze, load_lexicon, Lexicon, LexiconError};
use crate::tdb::{load_database, Database, DbError};
use crate::timecore::{Bound, TimeError};
use crate::topast::render;
use crate::topeval::eval;
use crate::tralg::{emit_tsql2, eval_alg, translate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Readings {
    All,
    First,
}

/// Command line flags.
#[derive(Debug, Clone, Parser)]
#[command(name = "top-nlidb", about = "Answer English questions about a valid-time database")]
pub struct SessionConfig {
    /// Database file
    #[arg(long = "db")]
    pub db_path: PathBuf,
    /// Lexicon file
    #[arg(long = "lexicon")]
    pub lexicon_path: PathBuf,
    /// Speech time, "D/M/YYYY" or "D/M/YYYY HH:MM"
    #[arg(long)]
    pub now: String,
    /// Print the TOP formula of each reading
    #[arg(long)]
    pub show_top: bool,
    /// Print the generated TSQL2 query of each reading
    #[arg(long)]
    pub show_tsql2: bool,
    /// Also evaluate through the algebra and compare
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value = "all")]
    pub readings: Readings,
    /// Answer every line of FILE instead of reading a REPL
    #[arg(long)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("database: {0}")]
    Db(#[from] DbError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("--now: {0}")]
    Now(TimeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub show_top: bool,
    pub show_tsql2: bool,
    pub check: bool,
    pub readings: Readings,
}

/// A loaded database and lexicon with a fixed speech time.
#[derive(Debug)]
pub struct Session {
    pub db: Database,
    pub lexicon: Lexicon,
    pub st: u32,
    pub options: Options,
    /// Lexicon entries that disagree with the database schema.
    pub warnings: Vec<String>,
}

/// Outcome of one question.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<String>,
    pub failed: bool,
    pub internal_errors: usize,
    pub divergences: usize,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl Session {
    pub fn load(config: &SessionConfig) -> Result<Session, CliError> {
        let db = load_database(&read(&config.db_path)?)?;
        let lexicon = load_lexicon(&read(&config.lexicon_path)?)?;
        Session::new(
            db,
            lexicon,
            &config.now,
            Options {
                show_top: config.show_top,
                show_tsql2: config.show_tsql2,
                check: config.check,
                readings: config.readings,
            },
        )
    }

    pub fn new(db: Database, lexicon: Lexicon, now: &str, options: Options) -> Result<Session, CliError> {
        let st = db.axis().parse_timestamp(now, Bound::Start).map_err(CliError::Now)?.0;
        let warnings = lexicon.check_against(&db);
        Ok(Session {
            db,
            lexicon,
            st,
            options,
            warnings,
        })
    }

    pub fn answer(&self, question: &str) -> Report {
        let mut r = Report::default();
        let formulas = match analyze(question, &self.lexicon) {
            Ok(fs) => fs,
            Err(e) => {
                r.lines.push(format!("error: {e}"));
                r.failed = true;
                return r;
            }
        };
        let n = match self.options.readings {
            Readings::All => formulas.len(),
            Readings::First => 1,
        };
        let axis = self.db.axis();
        for (i, f) in formulas.iter().take(n).enumerate() {
            if n > 1 {
                r.lines.push(format!("reading {}/{n}:", i + 1));
            }
            if self.options.show_top {
                r.lines.push(format!("TOP: {}", render(f)));
            }
            if self.options.show_tsql2 {
                match emit_tsql2(f, self.st, axis) {
                    Ok(text) => {
                        r.lines.push("TSQL2:".to_string());
                        r.lines.extend(text.lines().map(|l| format!("  {l}")));
                    }
                    Err(e) => r.lines.push(format!("TSQL2 error: {e}")),
                }
            }
            let main = match eval(&self.db, f, self.st) {
                Ok(a) => a,
                Err(e) => {
                    r.lines.push(format!("error: {e}"));
                    r.failed = true;
                    r.internal_errors += 1;
                    continue;
                }
            };
            r.lines.extend(main.render(axis).lines().map(str::to_string));
            if self.options.check {
                let compiled = translate(f, self.st, axis).and_then(|a| eval_alg(&self.db, &a));
                match compiled {
                    Ok(b) if b == main => r.lines.push("CHECK OK".to_string()),
                    Ok(b) => {
                        r.divergences += 1;
                        r.lines.push(format!(
                            "CHECK DIVERGENCE question=\"{question}\" reading={}: topeval={main} tralg={b}",
                            i + 1
                        ));
                    }
                    Err(e) => {
                        r.divergences += 1;
                        r.lines.push(format!(
                            "CHECK DIVERGENCE question=\"{question}\" reading={}: topeval={main} tralg error: {e}",
                            i + 1
                        ));
                    }
                }
            }
        }
        r
    }
}

/// Totals of a batch run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub questions: usize,
    pub failures: usize,
    pub internal_errors: usize,
    pub divergences: usize,
}

impl BatchSummary {
    /// 0 on success, 1 after internal errors, 2 after divergences.
    pub fn exit_code(&self) -> u8 {
        if self.divergences > 0 {
            2
        } else if self.internal_errors > 0 {
            1
        } else {
            0
        }
    }
}

/// Answers one question per non-blank line; `#` lines are comments.
pub fn run_batch(session: &Session, questions: &str, out: &mut dyn Write) -> io::Result<BatchSummary> {
    let mut s = BatchSummary::default();
    for line in questions.lines() {
        let q = line.trim();
        if q.is_empty() || q.starts_with('#') {
            continue;
        }
        if s.questions > 0 {
            writeln!(out)?;
        }
        s.questions += 1;
        writeln!(out, "Q: {q}")?;
        let r = session.answer(q);
        for l in &r.lines {
            writeln!(out, "{l}")?;
        }
        s.failures += usize::from(r.failed);
        s.internal_errors += r.internal_errors;
        s.divergences += r.divergences;
    }
    Ok(s)
}

/// Reads questions until `:quit` or end of input.
pub fn run_repl(session: &Session, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<()> {
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let q = line.trim();
        if q == ":quit" {
            return Ok(());
        }
        if q.is_empty() {
            continue;
        }
        for l in session.answer(q).lines {
            writeln!(out, "{l}")?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DB: &str = "\
axis 1/1/1994 31/12/1994 day
relation contain/2 state
tuple contain tank2 water valid=6/1/1994..21/1/1994
";
    const LEX: &str = "verb contain state contain(subj,obj)\nname tank_2 tank2\nname water water\n";

    fn session(check: bool) -> Session {
        Session::new(
            load_database(DB).unwrap(),
            load_lexicon(LEX).unwrap(),
            "31/1/1994",
            Options {
                show_top: true,
                show_tsql2: false,
                check,
                readings: Readings::All,
            },
        )
        .unwrap()
    }

    #[test]
    fn answers_with_formula() {
        let r = session(true).answer("Did tank 2 contain water?");
        assert_eq!(r.lines, ["TOP: Past[e1, contain(tank2, water)]", "yes", "CHECK OK"]);
    }

    #[test]
    fn when_questions_render_periods() {
        let r = session(false).answer("When did tank 2 contain water?");
        assert_eq!(r.lines[1], "6/1/1994..21/1/1994");
    }

    #[test]
    fn repl_survives_errors() {
        let s = session(false);
        let mut input = io::Cursor::new("Colourless green ideas sleep\nDid tank 2 contain water?\n:quit\nDid tank 2 contain water?\n");
        let mut out = Vec::new();
        run_repl(&s, &mut input, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("error: unknown word \"colourless\""), "{text}");
        assert_eq!(text.matches("yes").count(), 1, "{text}");
    }

    #[test]
    fn empty_batch_prints_nothing() {
        let mut out = Vec::new();
        let s = run_batch(&session(true), "", &mut out).unwrap();
        assert!(out.is_empty());
        assert_eq!(s.exit_code(), 0);
    }

    #[test]
    fn speech_time_must_be_on_axis() {
        let e = Session::new(
            load_database(DB).unwrap(),
            load_lexicon(LEX).unwrap(),
            "1/1/1995",
            Options {
                show_top: false,
                show_tsql2: false,
                check: false,
                readings: Readings::First,
            },
        )
        .unwrap_err();
        assert!(matches!(e, CliError::Now(_)));
    }
}
