//! Lexicon files and word-form analysis.
//!
//! Only base verb forms are listed in a lexicon file. Inflected forms are
//! generated by regular spelling rules unless an irregular form is given.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::timecore::{DateExpr, UnitName};
use crate::topast::{PredicateInfo, Schema, TemporalPattern, VerbClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lexicon line {line}: {msg}")]
pub struct LexiconError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Form {
    Base,
    Third,
    Past,
    PastPart,
    PresPart,
}

/// Argument role filled by a predicate position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Subj,
    Obj,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IrregularForms {
    pub past: Option<String>,
    pub past_participle: Option<String>,
    pub present_participle: Option<String>,
    pub third_singular: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbEntry {
    pub base: String,
    pub class: VerbClass,
    pub predicate: String,
    /// Predicate argument positions in order.
    pub template: Vec<Slot>,
    pub irregular: IrregularForms,
}

impl VerbEntry {
    pub fn transitive(&self) -> bool {
        self.template.contains(&Slot::Obj)
    }

    pub fn form(&self, form: Form) -> String {
        let b = &self.base;
        let ir = &self.irregular;
        match form {
            Form::Base => b.clone(),
            Form::Third => ir.third_singular.clone().unwrap_or_else(|| third_singular(b)),
            Form::Past => ir.past.clone().unwrap_or_else(|| regular_past(b)),
            Form::PastPart => ir
                .past_participle
                .clone()
                .or_else(|| ir.past.clone())
                .unwrap_or_else(|| regular_past(b)),
            Form::PresPart => ir.present_participle.clone().unwrap_or_else(|| present_participle(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexEntry {
    Verb(VerbEntry),
    Noun { word: String, predicate: String },
    Name { word: String, constant: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxKind {
    Do,
    Be,
    Have,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tense {
    Past,
    Pres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prep {
    On,
    At,
    For,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetKind {
    A,
    The,
}

/// One reading of a single token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LexItem {
    Verb { entry: usize, form: Form },
    Noun { predicate: String },
    Name { constant: String },
    Det(DetKind),
    WhPro,
    WhDet,
    When,
    Ever,
    Aux(AuxKind, Tense),
    Prep(Prep),
    Date(TemporalPattern),
    Time(TemporalPattern),
    Num(u32),
    Unit(UnitName),
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    verbs: Vec<VerbEntry>,
    verb_forms: HashMap<String, Vec<(usize, Form)>>,
    nouns: HashMap<String, String>,
    names: BTreeMap<String, String>,
}

fn ends_with_any(w: &str, tails: &[&str]) -> bool {
    tails.iter().any(|t| w.ends_with(t))
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Short words ending consonant-vowel-consonant double the final letter.
fn doubles_final(w: &str) -> bool {
    let cs: Vec<char> = w.chars().collect();
    let n = cs.len();
    if n < 3 {
        return false;
    }
    let groups = cs
        .iter()
        .enumerate()
        .filter(|(i, c)| is_vowel(**c) && (*i == 0 || !is_vowel(cs[i - 1])))
        .count();
    groups == 1 && !is_vowel(cs[n - 1]) && !matches!(cs[n - 1], 'w' | 'x' | 'y') && is_vowel(cs[n - 2]) && !is_vowel(cs[n - 3])
}

fn consonant_y(w: &str) -> bool {
    let cs: Vec<char> = w.chars().collect();
    cs.len() >= 2 && cs[cs.len() - 1] == 'y' && !is_vowel(cs[cs.len() - 2])
}

pub fn third_singular(w: &str) -> String {
    if consonant_y(w) {
        format!("{}ies", &w[..w.len() - 1])
    } else if ends_with_any(w, &["s", "sh", "ch", "x", "z", "o"]) {
        format!("{w}es")
    } else {
        format!("{w}s")
    }
}

pub fn regular_past(w: &str) -> String {
    if w.ends_with('e') {
        format!("{w}d")
    } else if consonant_y(w) {
        format!("{}ied", &w[..w.len() - 1])
    } else if doubles_final(w) {
        format!("{w}{}ed", &w[w.len() - 1..])
    } else {
        format!("{w}ed")
    }
}

pub fn present_participle(w: &str) -> String {
    if w.ends_with("ie") {
        format!("{}ying", &w[..w.len() - 2])
    } else if w.ends_with('e') && !ends_with_any(w, &["ee", "ye", "oe"]) && w.len() > 2 {
        format!("{}ing", &w[..w.len() - 1])
    } else if doubles_final(w) {
        format!("{w}{}ing", &w[w.len() - 1..])
    } else {
        format!("{w}ing")
    }
}

pub fn plural(w: &str) -> String {
    if consonant_y(w) {
        format!("{}ies", &w[..w.len() - 1])
    } else if ends_with_any(w, &["s", "sh", "ch", "x", "z"]) {
        format!("{w}es")
    } else {
        format!("{w}s")
    }
}

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
];

fn closed_class(word: &str) -> Vec<LexItem> {
    use LexItem as L;
    let one = |i: LexItem| vec![i];
    match word {
        "did" => one(L::Aux(AuxKind::Do, Tense::Past)),
        "does" | "do" => one(L::Aux(AuxKind::Do, Tense::Pres)),
        "was" | "were" => one(L::Aux(AuxKind::Be, Tense::Past)),
        "is" | "are" | "am" => one(L::Aux(AuxKind::Be, Tense::Pres)),
        "had" => one(L::Aux(AuxKind::Have, Tense::Past)),
        "has" | "have" => one(L::Aux(AuxKind::Have, Tense::Pres)),
        "a" | "an" => one(L::Det(DetKind::A)),
        "the" => one(L::Det(DetKind::The)),
        "who" | "what" => one(L::WhPro),
        "which" => one(L::WhDet),
        "when" => one(L::When),
        "ever" => one(L::Ever),
        "on" => one(L::Prep(Prep::On)),
        "at" => one(L::Prep(Prep::At)),
        "for" => one(L::Prep(Prep::For)),
        _ => vec![],
    }
}

fn parse_template(text: &str) -> Option<(String, Vec<Slot>)> {
    let open = text.find('(')?;
    let inner = text[open + 1..].strip_suffix(')')?;
    let name = text[..open].to_string();
    if name.is_empty() {
        return None;
    }
    let slots = inner
        .split(',')
        .map(|s| match s.trim() {
            "subj" => Some(Slot::Subj),
            "obj" => Some(Slot::Obj),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some((name, slots))
}

impl Lexicon {
    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn verb(&self, index: usize) -> &VerbEntry {
        &self.verbs[index]
    }

    pub fn verbs(&self) -> &[VerbEntry] {
        &self.verbs
    }

    /// Multi-word keys (joined with `_`) that the tokenizer glues together.
    pub(crate) fn is_compound(&self, key: &str) -> bool {
        key.contains('_') && (self.names.contains_key(key) || self.nouns.contains_key(key) || self.verb_forms.contains_key(key))
    }

    fn add(&mut self, entry: LexEntry, line: usize) -> Result<(), LexiconError> {
        let dup = |w: &str| LexiconError {
            line,
            msg: format!("duplicate entry for {w}"),
        };
        match &entry {
            LexEntry::Verb(v) => {
                if self.verbs.iter().any(|o| o.base == v.base) {
                    return Err(dup(&v.base));
                }
                let idx = self.verbs.len();
                for form in [Form::Base, Form::Third, Form::Past, Form::PastPart, Form::PresPart] {
                    let list = self.verb_forms.entry(v.form(form)).or_default();
                    if !list.contains(&(idx, form)) {
                        list.push((idx, form));
                    }
                }
                self.verbs.push(v.clone());
            }
            LexEntry::Noun { word, predicate } => {
                if self.nouns.contains_key(word) {
                    return Err(dup(word));
                }
                self.nouns.insert(word.clone(), predicate.clone());
                self.nouns.entry(plural(word)).or_insert_with(|| predicate.clone());
            }
            LexEntry::Name { word, constant } => {
                if self.names.contains_key(word) {
                    return Err(dup(word));
                }
                self.names.insert(word.clone(), constant.clone());
            }
        }
        self.entries.push(entry);
        Ok(())
    }
}

/// Parses a lexicon file.
///
/// ```text
/// verb <base> <class> <pred>(subj[,obj]) [past=w] [pastpart=w] [prespart=w] [third=w]
/// noun <word> <pred>
/// name <word> <constant>
/// ```
pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| LexiconError { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let entry = match fields[0] {
            "verb" => {
                if fields.len() < 4 {
                    return Err(err("verb needs a base form, a class and a predicate".into()));
                }
                let class = VerbClass::parse(fields[2])
                    .filter(|c| *c != VerbClass::Timeless)
                    .ok_or_else(|| err(format!("unknown class {}", fields[2])))?;
                let (predicate, template) =
                    parse_template(fields[3]).ok_or_else(|| err(format!("bad predicate template {}", fields[3])))?;
                let subjects = template.iter().filter(|s| **s == Slot::Subj).count();
                let objects = template.iter().filter(|s| **s == Slot::Obj).count();
                if subjects != 1 || objects > 1 {
                    return Err(err(format!(
                        "template {} needs one subj and at most one obj",
                        fields[3]
                    )));
                }
                let mut irregular = IrregularForms::default();
                for opt in &fields[4..] {
                    let (k, v) = opt.split_once('=').ok_or_else(|| err(format!("bad option {opt}")))?;
                    let slot = match k {
                        "past" => &mut irregular.past,
                        "pastpart" => &mut irregular.past_participle,
                        "prespart" => &mut irregular.present_participle,
                        "third" => &mut irregular.third_singular,
                        _ => return Err(err(format!("unknown option {k}"))),
                    };
                    *slot = Some(v.to_ascii_lowercase());
                }
                LexEntry::Verb(VerbEntry {
                    base: fields[1].to_ascii_lowercase(),
                    class,
                    predicate,
                    template,
                    irregular,
                })
            }
            "noun" if fields.len() == 3 => LexEntry::Noun {
                word: fields[1].to_ascii_lowercase(),
                predicate: fields[2].to_string(),
            },
            "name" if fields.len() == 3 => LexEntry::Name {
                word: fields[1].to_ascii_lowercase(),
                constant: fields[2].to_string(),
            },
            "noun" | "name" => return Err(err(format!("{} needs a word and a symbol", fields[0]))),
            other => return Err(err(format!("unknown entry kind {other}"))),
        };
        lex.add(entry, line)?;
    }
    Ok(lex)
}

/// Every reading of a (lowercased) token.
pub fn analyses(word: &str, lexicon: &Lexicon) -> Vec<LexItem> {
    let mut out = closed_class(word);
    if let Some(forms) = lexicon.verb_forms.get(word) {
        out.extend(forms.iter().map(|(entry, form)| LexItem::Verb {
            entry: *entry,
            form: *form,
        }));
    }
    if let Some(p) = lexicon.nouns.get(word) {
        out.push(LexItem::Noun { predicate: p.clone() });
    }
    if let Some(c) = lexicon.names.get(word) {
        out.push(LexItem::Name { constant: c.clone() });
    }
    if let Some(u) = UnitName::parse(word) {
        out.push(LexItem::Unit(u));
    }
    if let Some(n) = NUMBER_WORDS.iter().position(|w| *w == word) {
        out.push(LexItem::Num(n as u32));
    } else if !word.is_empty() && word.chars().all(|c| c.is_ascii_digit()) {
        if let Ok(n) = word.parse() {
            out.push(LexItem::Num(n));
        }
    }
    if word.contains('/') || word.contains(':') {
        if let Ok(pattern) = TemporalPattern::parse(word) {
            match pattern.expr {
                DateExpr::Date(_) => out.push(LexItem::Date(pattern)),
                DateExpr::Time(_) => out.push(LexItem::Time(pattern)),
            }
        }
    }
    out
}

impl Schema for Lexicon {
    fn predicate(&self, symbol: &str) -> Option<PredicateInfo> {
        if let Some(v) = self.verbs.iter().find(|v| v.predicate == symbol) {
            return Some(PredicateInfo {
                arity: v.template.len(),
                class: v.class,
            });
        }
        self.nouns.values().any(|p| p == symbol).then_some(PredicateInfo {
            arity: 1,
            class: VerbClass::Timeless,
        })
    }
}

impl Lexicon {
    /// Disagreements between the lexicon's predicates and a database schema.
    pub fn check_against(&self, schema: &dyn Schema) -> Vec<String> {
        let mut out = Vec::new();
        for v in &self.verbs {
            match schema.predicate(&v.predicate) {
                None => out.push(format!("verb {}: predicate {} is not in the database", v.base, v.predicate)),
                Some(info) if info.arity != v.template.len() => out.push(format!(
                    "verb {}: predicate {} has arity {} in the database, {} in the lexicon",
                    v.base,
                    v.predicate,
                    info.arity,
                    v.template.len()
                )),
                Some(info) if info.class != v.class => out.push(format!(
                    "verb {}: predicate {} is {} in the database, {} in the lexicon",
                    v.base,
                    v.predicate,
                    info.class.as_str(),
                    v.class.as_str()
                )),
                Some(_) => {}
            }
        }
        let mut nouns: Vec<(&String, &String)> = self.nouns.iter().collect();
        nouns.sort();
        for (word, p) in nouns {
            match schema.predicate(p) {
                None => out.push(format!("noun {word}: predicate {p} is not in the database")),
                Some(info) if info.arity != 1 => out.push(format!("noun {word}: predicate {p} is not unary")),
                Some(_) => {}
            }
        }
        out.dedup();
        out
    }
}
