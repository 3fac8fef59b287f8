//! Batch mode against the golden outputs, in process and through the binary.

mod common;

use std::path::PathBuf;
use std::process::Command;

use rand::seq::SliceRandom;
use rand::Rng;

use top_nlidb::cli::{run_batch, Options, Readings, Session};
use top_nlidb::lexgram::load_lexicon;
use top_nlidb::tdb::load_database;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

/// (scenario, speech time) pairs; each has `.db`, `.txt` and a golden `.out`.
const SCENARIOS: [(&str, &str); 3] = [
    ("scenario", "31/12/1994"),
    ("remote", "31/12/1985"),
    ("workshop", "7/6/1994 23:00"),
];

fn session(name: &str, now: &str, check: bool) -> Session {
    Session::new(
        load_database(&read(&format!("{name}.db"))).unwrap(),
        load_lexicon(&read("lexicon.lex")).unwrap(),
        now,
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
fn batch_output_matches_golden_files() {
    for (name, now) in SCENARIOS {
        let mut out = Vec::new();
        let summary = run_batch(&session(name, now, true), &read(&format!("{name}.txt")), &mut out).unwrap();
        assert_eq!(summary.exit_code(), 0);
        assert_eq!(String::from_utf8(out).unwrap(), read(&format!("golden/{name}.out")), "{name}");
    }
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_top-nlidb")).args(args).output().unwrap()
}

#[test]
fn binary_reproduces_golden_output() {
    for (name, now) in SCENARIOS {
        let db = data(&format!("{name}.db"));
        let lex = data("lexicon.lex");
        let questions = data(&format!("{name}.txt"));
        let out = binary(&[
            "--db",
            db.to_str().unwrap(),
            "--lexicon",
            lex.to_str().unwrap(),
            "--now",
            now,
            "--show-top",
            "--check",
            "--batch",
            questions.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), read(&format!("golden/{name}.out")));
    }
}

#[test]
fn load_errors_exit_with_status_one() {
    let lex = data("lexicon.lex");
    let db = data("scenario.db");
    let missing = binary(&["--db", "/nonexistent.db", "--lexicon", lex.to_str().unwrap(), "--now", "1/1/1994"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("cannot read"));
    let off_axis = binary(&["--db", db.to_str().unwrap(), "--lexicon", lex.to_str().unwrap(), "--now", "1/1/2001"]);
    assert_eq!(off_axis.status.code(), Some(1));
}

#[test]
fn empty_question_file_gives_empty_output() {
    let dir = std::env::temp_dir().join(format!("top-nlidb-empty-{}", std::process::id()));
    std::fs::write(&dir, "").unwrap();
    let out = binary(&[
        "--db",
        data("scenario.db").to_str().unwrap(),
        "--lexicon",
        data("lexicon.lex").to_str().unwrap(),
        "--now",
        "31/12/1994",
        "--check",
        "--batch",
        dir.to_str().unwrap(),
    ]);
    std::fs::remove_file(&dir).unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn repl_reads_until_quit() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_top-nlidb"))
        .args([
            "--db",
            data("scenario.db").to_str().unwrap(),
            "--lexicon",
            data("lexicon.lex").to_str().unwrap(),
            "--now",
            "31/12/1994",
        ])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"Colourless green ideas sleep\nWhen did tank 2 contain water?\n:quit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("error: unknown word"));
    assert!(text.contains("5/1/1994..20/1/1994\n1/3/1994..10/3/1994"), "{text}");
}

/// Questions assembled from the lexicon's words in every tense form the
/// grammar covers.
fn random_question(rng: &mut impl Rng) -> String {
    let subjects = ["John", "engineer 1", "an engineer", "which engineer", "who", "IBI", "Housecorp", "tank 2"];
    let objects = ["engine 2", "an engine", "what", "which engine", "PPC", "water", "bridge 2"];
    let verbs = [
        ("fix", "fixed", "fixing", "fixed", true),
        ("advertise", "advertised", "advertising", "advertised", true),
        ("contain", "contained", "containing", "contained", true),
        ("build", "built", "building", "built", true),
        ("run", "ran", "running", "run", false),
    ];
    let adjuncts = ["", " on 1/6/94", " on 12/4/94", " for two days", " for three weeks", " on 3/7/94"];
    let (base, past, ing, pp, transitive) = *verbs.choose(rng).unwrap();
    let subj = *subjects.choose(rng).unwrap();
    let obj = if transitive { format!(" {}", objects.choose(rng).unwrap()) } else { String::new() };
    let adj = *adjuncts.choose(rng).unwrap();
    let when = rng.gen_bool(0.2);
    let prefix = if when { "When " } else { "" };
    let wh_obj = obj.starts_with(" what") || obj.starts_with(" which");
    let core = match rng.gen_range(0..4) {
        0 => format!("did {subj} {base}"),
        1 => format!("was {subj} {ing}"),
        2 => format!("had {subj} {pp}"),
        _ => format!("{subj} {past}"),
    };
    if wh_obj {
        let o = obj.trim();
        format!("{o} {core}{adj}?")
    } else {
        format!("{prefix}{core}{obj}{adj}?")
    }
}

#[test]
fn check_mode_over_random_questions_finds_no_divergence() {
    let mut rng = common::rng(99);
    let qs: Vec<String> = (0..250).map(|_| random_question(&mut rng)).collect();
    let s = session("scenario", "31/12/1994", true);
    let mut out = Vec::new();
    let summary = run_batch(&s, &qs.join("\n"), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(summary.divergences, 0, "{text}");
    assert_eq!(summary.exit_code(), 0, "{text}");
    // enough of the generated questions must be understood to mean something
    let answered = text.matches("CHECK OK").count();
    assert!(answered > 100, "only {answered} readings checked\n{text}");
}
