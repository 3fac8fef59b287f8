//! English questions to TOP formulae.

mod compose;
mod lexicon;
mod parse;

use thiserror::Error;

use crate::topast::{alpha_eq, Formula};

pub use compose::{compose, QStoreItem};
pub use lexicon::{
    analyses, load_lexicon, plural, present_participle, regular_past, third_singular, AuxKind, DetKind, Form,
    IrregularForms, LexEntry, LexItem, Lexicon, LexiconError, Prep, Slot, Tense, VerbEntry,
};
pub use parse::{parse, tokenize, Cat, ParseError, ParseTree, Role, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{}", .0.join("; "))]
    Compose(Vec<String>),
}

/// Every reading of a question: low adjunct attachment first, duplicates
/// (up to variable renaming) removed.
pub fn analyze(question: &str, lexicon: &Lexicon) -> Result<Vec<Formula>, AnalyzeError> {
    let mut trees = parse(question, lexicon)?;
    trees.sort_by_key(|t| !t.has_low_attachment());
    let mut out: Vec<Formula> = Vec::new();
    let mut errors = Vec::new();
    for t in &trees {
        match compose(t, lexicon) {
            Ok(fs) => {
                for f in fs {
                    if !out.iter().any(|g| alpha_eq(g, &f)) {
                        out.push(f);
                    }
                }
            }
            Err(e) => {
                if !errors.contains(&e) {
                    errors.push(e);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(AnalyzeError::Compose(errors));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topast::{parse_formula, render};

    fn lex() -> Lexicon {
        load_lexicon(
            "verb contain state contain(subj,obj)\n\
             verb fix culm_activity fixing(subj,obj)\n\
             verb run activity run(subj) past=ran pastpart=run\n\
             verb advertise activity advertise(subj,obj)\n\
             verb build culm_activity building(subj,obj) past=built\n\
             noun engine engine\nnoun engineer engineer\n\
             name tank_2 tank2\nname engine_2 eng2\nname bridge_2 bridge2\nname john john\n\
             name water water\nname ibi ibi\nname ppc ppc\nname housecorp housecorp\n",
        )
        .unwrap()
    }

    fn readings(q: &str) -> Vec<String> {
        analyze(q, &lex()).unwrap().iter().map(render).collect()
    }

    fn same(q: &str, want: &[&str]) {
        let got = analyze(q, &lex()).unwrap();
        assert_eq!(got.len(), want.len(), "{q}: {:?}", readings(q));
        for (g, w) in got.iter().zip(want) {
            assert!(alpha_eq(g, &parse_formula(w).unwrap()), "{q}: got {g}, want {w}");
        }
    }

    #[test]
    fn simple_questions() {
        same("Did tank 2 contain water?", &["Past[e1, contain(tank2, water)]"]);
        same("Did tank 2 ever contain water?", &["Past[e1, contain(tank2, water)]"]);
        same("Did John run on 1/6/94?", &["At[\"1/6/94\", Past[e1, run(john)]]"]);
        same("Was John fixing engine 2 on 1/6/94?", &["At[\"1/6/94\", Past[e1, fixing(john, eng2)]]"]);
        same("Did John fix engine 2 on 1/6/94?", &["At[\"1/6/94\", Past[e1, Culm[fixing(john, eng2)]]]"]);
    }

    #[test]
    fn wh_questions() {
        same("What did John fix?", &["? x1 : Past[e1, Culm[fixing(john, x1)]]"]);
        same("When did tank 2 contain water?", &["?mxl e1 Past[e1, contain(tank2, water)]"]);
        same(
            "Which engineer fixed an engine?",
            &["? x1 engineer(x1) : exists x2 engine(x2) : Past[e1, Culm[fixing(x1, x2)]]"],
        );
        same(
            "An engineer fixed an engine.",
            &["exists x1 engineer(x1) : exists x2 engine(x2) : Past[e1, Culm[fixing(x1, x2)]]"],
        );
    }

    #[test]
    fn perfect_gives_two_readings() {
        same(
            "Had IBI advertised PPC on 1/1/85?",
            &[
                "Past[e1, Perf[e2, At[\"1/1/85\", advertise(ibi, ppc)]]]",
                "At[\"1/1/85\", Past[e1, Perf[e2, advertise(ibi, ppc)]]]",
            ],
        );
    }

    #[test]
    fn adjunct_position_does_not_matter() {
        let want = "exists x1 engine(x1) : At[\"1/6/94\", Past[e1, Culm[fixing(john, x1)]]]";
        same("John fixed an engine on 1/6/94.", &[want]);
        same("On 1/6/94 John fixed an engine.", &[want]);
        same("On 1/6/94, did IBI advertise PPC?", &["At[\"1/6/94\", Past[e1, advertise(ibi, ppc)]]"]);
    }

    #[test]
    fn for_cancels_culm() {
        let want = "For[year, 2, Past[e1, building(housecorp, bridge2)]]";
        same("Housecorp built bridge 2 for two years.", &[want]);
        same("Housecorp was building bridge 2 for two years.", &[want]);
    }

    #[test]
    fn point_adjuncts_coerce_by_class() {
        same("Did John run at 5:00pm?", &["At[\"5:00pm\", Past[e1, Begin[run(john)]]]"]);
        same("Was John running at 5:00pm?", &["At[\"5:00pm\", Past[e1, run(john)]]"]);
        same(
            "Did tank 2 contain water at 5:00pm?",
            &["At[\"5:00pm\", Past[e1, contain(tank2, water)]]"],
        );
        same(
            "Who fixed an engine at 5:00pm?",
            &[
                "? x1 : exists x2 engine(x2) : At[\"5:00pm\", Past[e1, End[Culm[fixing(x1, x2)]]]]",
                "? x1 : exists x2 engine(x2) : At[\"5:00pm\", Past[e1, Begin[Culm[fixing(x1, x2)]]]]",
            ],
        );
    }

    #[test]
    fn present_tense() {
        same("Does tank 2 contain water?", &["Pres[e1, contain(tank2, water)]"]);
        same("Is John fixing engine 2?", &["Pres[e1, fixing(john, eng2)]"]);
        same("Has IBI advertised PPC?", &["Pres[e1, Perf[e2, advertise(ibi, ppc)]]"]);
        let e = analyze("Does John fix engine 2?", &lex()).unwrap_err();
        assert!(e.to_string().contains("simple present"), "{e}");
    }

    #[test]
    fn two_whens_are_rejected() {
        let e = analyze("When when did tank 2 contain water?", &lex()).unwrap_err();
        assert!(e.to_string().contains("more than one"), "{e}");
    }

    #[test]
    fn readings_are_well_formed() {
        let l = lex();
        for q in [
            "Which engineer fixed an engine on 1/6/94?",
            "When had John fixed engine 2?",
            "What had John fixed on 1/1/85?",
        ] {
            for f in analyze(q, &l).unwrap() {
                assert!(crate::topast::well_formed(&f, &l).is_empty(), "{q}: {f}");
            }
        }
    }
}
