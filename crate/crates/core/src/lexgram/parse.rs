//! Tokenizer and chart parser for the question fragment.
//!
//! Heads combine with their complements, then with their subjects;
//! temporal adjuncts attach to sentences, either before or after them.
//! Past participle phrases additionally accept trailing adjuncts before
//! they meet their subject.

use std::fmt;

use super::lexicon::{analyses, AuxKind, Form, LexItem, Lexicon, Prep, Tense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cat {
    Name,
    Det,
    N,
    WhPro,
    WhDet,
    When,
    Ever,
    Aux(AuxKind, Tense),
    V { form: Form, transitive: bool },
    P(Prep),
    Date,
    Time,
    Num,
    Unit,
    NP,
    WhNP,
    Dur,
    PP,
    VP(Form),
    /// Transitive verb phrase missing its object.
    VPGap(Form),
    /// Tensed verb phrase in declarative order.
    TVP,
    /// Fronted auxiliary with its subject.
    InvHead(AuxKind),
    Core,
    /// Inverted sentence missing its object.
    CoreGap,
    Clause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Head,
    Subject,
    Complement,
    Adjunct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    /// 1-based position after multi-word gluing.
    pub position: usize,
    pub item: LexItem,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParseTree {
    pub cat: Cat,
    pub role: Role,
    pub children: Vec<ParseTree>,
    pub word: Option<Token>,
}

impl ParseTree {
    fn leaf(tok: Token) -> ParseTree {
        let cat = match &tok.item {
            LexItem::Verb { form, .. } => Cat::V {
                form: *form,
                transitive: false,
            },
            LexItem::Noun { .. } => Cat::N,
            LexItem::Name { .. } => Cat::Name,
            LexItem::Det(_) => Cat::Det,
            LexItem::WhPro => Cat::WhPro,
            LexItem::WhDet => Cat::WhDet,
            LexItem::When => Cat::When,
            LexItem::Ever => Cat::Ever,
            LexItem::Aux(k, t) => Cat::Aux(*k, *t),
            LexItem::Prep(p) => Cat::P(*p),
            LexItem::Date(_) => Cat::Date,
            LexItem::Time(_) => Cat::Time,
            LexItem::Num(_) => Cat::Num,
            LexItem::Unit(_) => Cat::Unit,
        };
        ParseTree {
            cat,
            role: Role::Head,
            children: vec![],
            word: Some(tok),
        }
    }

    fn node(cat: Cat, parts: Vec<(ParseTree, Role)>) -> ParseTree {
        ParseTree {
            cat,
            role: Role::Head,
            children: parts
                .into_iter()
                .map(|(mut t, r)| {
                    t.role = r;
                    t
                })
                .collect(),
            word: None,
        }
    }

    pub fn head(&self) -> Option<&ParseTree> {
        self.children.iter().find(|c| c.role == Role::Head)
    }

    /// Whether a temporal adjunct attaches below the subject.
    pub fn has_low_attachment(&self) -> bool {
        (matches!(self.cat, Cat::VP(_) | Cat::VPGap(_)) && self.children.iter().any(|c| c.role == Role::Adjunct && c.cat == Cat::PP))
            || self.children.iter().any(ParseTree::has_low_attachment)
    }

    /// Leaves in surface order.
    pub fn tokens(&self) -> Vec<&Token> {
        match &self.word {
            Some(t) => vec![t],
            None => self.children.iter().flat_map(ParseTree::tokens).collect(),
        }
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.word {
            return write!(f, "{}", t.text);
        }
        write!(f, "({:?}", self.cat)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

/// Lowercases, strips punctuation around words and glues multi-word
/// lexicon keys and `5:00 pm` style times.
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Vec<String> {
    let strip: &[char] = &['?', '.', ',', '!', ';', ':', '"', '\'', '(', ')'];
    let raw: Vec<String> = text
        .split_whitespace()
        .map(|w| w.trim_matches(strip).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect();

    let mut merged: Vec<String> = Vec::new();
    for w in raw {
        if (w == "am" || w == "pm") && merged.last().is_some_and(|p| p.contains(':') && p.ends_with(|c: char| c.is_ascii_digit())) {
            merged.last_mut().expect("checked").push_str(&w);
        } else {
            merged.push(w);
        }
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < merged.len() {
        let longest = (2..=4.min(merged.len() - i))
            .rev()
            .find(|len| lexicon.is_compound(&merged[i..i + len].join("_")));
        match longest {
            Some(len) => {
                out.push(merged[i..i + len].join("_"));
                i += len;
            }
            None => {
                out.push(merged[i].clone());
                i += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    UnknownWord { word: String, position: usize },
    /// `covered` leading tokens form some constituent; the sentence as a
    /// whole does not.
    NoParse { covered: usize, next: Option<String> },
    Empty,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnknownWord { word, position } => write!(f, "unknown word \"{word}\" at position {position}"),
            ParseError::NoParse { covered, next: Some(w) } => {
                write!(f, "no parse: longest parsable prefix has {covered} word(s), stuck at \"{w}\"")
            }
            ParseError::NoParse { covered, next: None } => {
                write!(f, "no parse: all {covered} word(s) combine but do not form a question")
            }
            ParseError::Empty => f.write_str("empty question"),
        }
    }
}

impl std::error::Error for ParseError {}

fn unary(t: &ParseTree) -> Option<Cat> {
    Some(match t.cat {
        Cat::Name => Cat::NP,
        Cat::WhPro => Cat::WhNP,
        Cat::V { form, transitive: false } => Cat::VP(form),
        Cat::V { form, transitive: true } => Cat::VPGap(form),
        Cat::VP(Form::Past | Form::Third | Form::Base) => Cat::TVP,
        Cat::Core => Cat::Clause,
        _ => return None,
    })
}

fn aux_takes(kind: AuxKind, form: Form) -> bool {
    matches!(
        (kind, form),
        (AuxKind::Do, Form::Base) | (AuxKind::Be, Form::PresPart) | (AuxKind::Have, Form::PastPart)
    )
}

fn binary(a: Cat, b: Cat) -> Option<(Cat, Role, Role)> {
    use Cat::*;
    use Role::*;
    Some(match (a, b) {
        (Det, N) => (NP, Complement, Head),
        (WhDet, N) => (WhNP, Complement, Head),
        (Num, Unit) => (Dur, Complement, Head),
        (P(Prep::On), Date) | (P(Prep::At), Time) | (P(Prep::For), Dur) => (PP, Head, Complement),
        (V { form, transitive: true }, NP) => (VP(form), Head, Complement),
        (Ever, VP(f)) => (VP(f), Adjunct, Head),
        (Ever, VPGap(f)) => (VPGap(f), Adjunct, Head),
        (VP(Form::PastPart), PP) => (VP(Form::PastPart), Head, Adjunct),
        (VPGap(Form::PastPart), PP) => (VPGap(Form::PastPart), Head, Adjunct),
        (Aux(AuxKind::Be, _), VP(Form::PresPart)) | (Aux(AuxKind::Have, _), VP(Form::PastPart)) => {
            (TVP, Head, Complement)
        }
        (NP | WhNP, TVP) => (Core, Subject, Head),
        (Aux(k, _), NP) => (InvHead(k), Head, Subject),
        (InvHead(k), VP(f)) if aux_takes(k, f) => (Core, Head, Complement),
        (InvHead(k), VPGap(f)) if aux_takes(k, f) => (CoreGap, Head, Complement),
        (Core, PP) => (Core, Head, Adjunct),
        (CoreGap, PP) => (CoreGap, Head, Adjunct),
        (WhNP, CoreGap) => (Clause, Complement, Head),
        (PP | When, Clause) => (Clause, Adjunct, Head),
        _ => return None,
    })
}

fn close_unary(cell: &mut Vec<ParseTree>) {
    let mut i = 0;
    while i < cell.len() {
        if let Some(cat) = unary(&cell[i]) {
            let t = ParseTree::node(cat, vec![(cell[i].clone(), Role::Head)]);
            if !cell.contains(&t) {
                cell.push(t);
            }
        }
        i += 1;
    }
}

/// All complete parses of a question, in a fixed order.
pub fn parse(question: &str, lexicon: &Lexicon) -> Result<Vec<ParseTree>, ParseError> {
    let words = tokenize(question, lexicon);
    let n = words.len();
    if n == 0 {
        return Err(ParseError::Empty);
    }
    // chart[i][j] holds trees spanning words i..=j
    let mut chart: Vec<Vec<Vec<ParseTree>>> = vec![vec![Vec::new(); n]; n];
    for (i, w) in words.iter().enumerate() {
        let items = analyses(w, lexicon);
        if items.is_empty() {
            return Err(ParseError::UnknownWord {
                word: w.clone(),
                position: i + 1,
            });
        }
        let cell = &mut chart[i][i];
        for item in items {
            let mut leaf = ParseTree::leaf(Token {
                text: w.clone(),
                position: i + 1,
                item: item.clone(),
            });
            if let LexItem::Verb { entry, .. } = item {
                if let Cat::V { transitive, .. } = &mut leaf.cat {
                    *transitive = lexicon.verb(entry).transitive();
                }
            }
            cell.push(leaf);
        }
        close_unary(cell);
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut cell = Vec::new();
            for k in i..j {
                for a in &chart[i][k] {
                    for b in &chart[k + 1][j] {
                        if let Some((cat, ra, rb)) = binary(a.cat, b.cat) {
                            cell.push(ParseTree::node(cat, vec![(a.clone(), ra), (b.clone(), rb)]));
                        }
                    }
                }
            }
            close_unary(&mut cell);
            chart[i][j] = cell;
        }
    }
    let trees: Vec<ParseTree> = chart[0][n - 1].iter().filter(|t| t.cat == Cat::Clause).cloned().collect();
    if trees.is_empty() {
        let covered = (0..n).rev().find(|j| !chart[0][*j].is_empty()).map_or(0, |j| j + 1);
        return Err(ParseError::NoParse {
            covered,
            next: words.get(covered).cloned(),
        });
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexgram::lexicon::load_lexicon;

    fn lex() -> Lexicon {
        load_lexicon(
            "verb contain state contain(subj,obj)\n\
             verb fix culm_activity fixing(subj,obj)\n\
             verb run activity run(subj) past=ran pastpart=run\n\
             verb advertise activity advertise(subj,obj)\n\
             noun engine engine\n\
             noun new_computer computer\n\
             name tank_2 tank2\nname john john\nname water water\nname ibi ibi\nname ppc ppc\n",
        )
        .unwrap()
    }

    #[test]
    fn tokenizer_glues_names_and_times() {
        let l = lex();
        assert_eq!(tokenize("Did tank 2 (ever) contain water?", &l), ["did", "tank_2", "ever", "contain", "water"]);
        assert_eq!(tokenize("at 5:00 pm.", &l), ["at", "5:00pm"]);
        assert_eq!(tokenize("a new computer", &l), ["a", "new_computer"]);
    }

    #[test]
    fn tree_counts() {
        let l = lex();
        assert_eq!(parse("Did John run on 1/6/94?", &l).unwrap().len(), 1);
        assert_eq!(parse("On 1/6/94 John fixed an engine.", &l).unwrap().len(), 1);
        assert_eq!(parse("Had IBI advertised PPC on 1/1/85?", &l).unwrap().len(), 2);
        assert_eq!(parse("What did John fix?", &l).unwrap().len(), 1);
        assert_eq!(parse("When did tank 2 contain water?", &l).unwrap().len(), 1);
    }

    #[test]
    fn exactly_one_head_per_node() {
        fn check(t: &ParseTree) {
            if t.word.is_none() {
                assert_eq!(t.children.iter().filter(|c| c.role == Role::Head).count(), 1, "{t}");
                t.children.iter().for_each(check);
            }
        }
        for t in parse("Had IBI ever advertised PPC on 1/1/85?", &lex()).unwrap() {
            check(&t);
        }
    }

    #[test]
    fn errors_name_the_problem() {
        let l = lex();
        assert_eq!(
            parse("Colourless green ideas sleep", &l),
            Err(ParseError::UnknownWord {
                word: "colourless".into(),
                position: 1
            })
        );
        assert_eq!(
            parse("John fixed an engine water", &l),
            Err(ParseError::NoParse {
                covered: 4,
                next: Some("water".into())
            })
        );
    }
}
