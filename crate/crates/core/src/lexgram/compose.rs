//! Semantic composition of parse trees into TOP formulae.

use super::lexicon::{AuxKind, DetKind, Form, LexItem, Lexicon, Prep, Slot, Tense};
use super::parse::{Cat, ParseTree, Role};
use crate::timecore::UnitName;
use crate::topast::{canonicalize, cancel_culm_under_for, Formula, Pred, TemporalPattern, Term, VerbClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QuantKind {
    Exists,
    Interrog,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QStoreItem {
    kind: QuantKind,
    var: String,
    restriction: Vec<Pred>,
    position: usize,
}

#[derive(Debug, Clone)]
enum Adjunct {
    At { pattern: TemporalPattern, point: bool },
    For { unit: UnitName, count: u32 },
}

#[derive(Debug, Default)]
struct Collected {
    verb: Option<(usize, Form)>,
    aux: Option<(AuxKind, Tense)>,
    subject: Option<Term>,
    object: Option<Term>,
    /// Adjuncts inside the participle phrase, innermost first.
    low: Vec<Adjunct>,
    /// Sentence adjuncts, innermost first.
    high: Vec<Adjunct>,
    whens: usize,
    store: Vec<QStoreItem>,
}

fn item(t: &ParseTree) -> &LexItem {
    &t.word.as_ref().expect("leaf").item
}

fn position(t: &ParseTree) -> usize {
    t.tokens().first().map_or(0, |tok| tok.position)
}

impl Collected {
    fn np(&mut self, t: &ParseTree) -> Term {
        let var = format!("x{}", position(t));
        let (kind, restriction) = match t.children.as_slice() {
            [] => match item(t) {
                LexItem::Name { constant } => return Term::Const(constant.clone()),
                LexItem::WhPro => (QuantKind::Interrog, vec![]),
                other => unreachable!("noun phrase leaf {other:?}"),
            },
            [only] => return self.np(only),
            [det, noun] => {
                let LexItem::Noun { predicate } = item(noun) else {
                    unreachable!("determiner without noun")
                };
                let kind = match item(det) {
                    LexItem::Det(DetKind::A | DetKind::The) => QuantKind::Exists,
                    _ => QuantKind::Interrog,
                };
                (kind, vec![Pred::new(predicate, vec![Term::Var(var.clone())])])
            }
            _ => unreachable!("noun phrase shape"),
        };
        self.store.push(QStoreItem {
            kind,
            var: var.clone(),
            restriction,
            position: position(t),
        });
        Term::Var(var)
    }

    fn adjunct(t: &ParseTree) -> Adjunct {
        let prep = t.children.iter().find(|c| c.role == Role::Head).map(item);
        let comp = t.children.iter().find(|c| c.role == Role::Complement).expect("complement");
        match (prep, &comp.word) {
            (Some(LexItem::Prep(p)), Some(tok)) => match &tok.item {
                LexItem::Date(pattern) | LexItem::Time(pattern) => Adjunct::At {
                    pattern: pattern.clone(),
                    point: *p == Prep::At,
                },
                other => unreachable!("adjunct complement {other:?}"),
            },
            _ => {
                let (LexItem::Num(count), LexItem::Unit(unit)) = (item(&comp.children[0]), item(&comp.children[1])) else {
                    unreachable!("duration shape")
                };
                Adjunct::For {
                    unit: *unit,
                    count: *count,
                }
            }
        }
    }

    fn visit(&mut self, t: &ParseTree) {
        if let Some(tok) = &t.word {
            match &tok.item {
                LexItem::Verb { entry, form } => self.verb = Some((*entry, *form)),
                LexItem::Aux(k, tense) => self.aux = Some((*k, *tense)),
                LexItem::When => self.whens += 1,
                _ => {}
            }
            return;
        }
        // heads first, so adjuncts are recorded innermost first
        if let Some(h) = t.head() {
            self.visit(h);
        }
        for c in t.children.iter().filter(|c| c.role != Role::Head) {
            match (c.role, c.cat) {
                (Role::Subject, _) if matches!(c.cat, Cat::NP | Cat::WhNP) => self.subject = Some(self.np(c)),
                (Role::Subject, _) => self.visit(c),
                (Role::Complement, Cat::NP | Cat::WhNP) => self.object = Some(self.np(c)),
                (Role::Adjunct, Cat::PP) => {
                    let adj = Self::adjunct(c);
                    if matches!(t.cat, Cat::VP(_) | Cat::VPGap(_)) {
                        self.low.push(adj);
                    } else {
                        self.high.push(adj);
                    }
                }
                _ => self.visit(c),
            }
        }
    }
}

fn wrap(adj: &Adjunct, f: Formula) -> Formula {
    match adj {
        Adjunct::At { pattern, .. } => Formula::at(pattern.clone(), f),
        Adjunct::For { unit, count } => Formula::for_(*unit, *count, f),
    }
}

/// Formulae for one parse tree. A point adjunct ("at 5:00pm") on a
/// non-progressive culminated activity gives two readings.
pub fn compose(tree: &ParseTree, lexicon: &Lexicon) -> Result<Vec<Formula>, String> {
    let mut c = Collected::default();
    c.visit(tree);
    if c.whens > 1 {
        return Err("more than one \"when\"".into());
    }
    let (entry, form) = c.verb.ok_or("no verb")?;
    let verb = lexicon.verb(entry);
    let (tense, progressive, perfect) = match (c.aux, form) {
        (None, Form::Past) => (Tense::Past, false, false),
        (None, _) => (Tense::Pres, false, false),
        (Some((AuxKind::Do, t)), _) => (t, false, false),
        (Some((AuxKind::Be, t)), _) => (t, true, false),
        (Some((AuxKind::Have, t)), _) => (t, false, true),
    };
    if tense == Tense::Pres && !progressive && !perfect && verb.class != VerbClass::State {
        return Err(format!(
            "simple present needs a state verb; \"{}\" is {}",
            verb.base,
            verb.class.as_str()
        ));
    }
    let args = verb
        .template
        .iter()
        .map(|slot| match slot {
            Slot::Subj => c.subject.clone().ok_or_else(|| format!("\"{}\" has no subject", verb.base)),
            Slot::Obj => c.object.clone().ok_or_else(|| format!("\"{}\" has no object", verb.base)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if c.object.is_some() && !verb.transitive() {
        return Err(format!("\"{}\" takes no object", verb.base));
    }
    let pred = Pred::new(&verb.predicate, args);
    let bare = if verb.class == VerbClass::CulmActivity && !progressive {
        Formula::Culm(pred)
    } else {
        Formula::Pred(pred)
    };

    let event_level = if perfect { &c.low } else { &c.high };
    let point_adjunct = event_level.iter().any(|a| matches!(a, Adjunct::At { point: true, .. }));
    let variants = match (point_adjunct && !progressive, verb.class) {
        (true, VerbClass::Activity) => vec![Formula::begin(bare)],
        (true, VerbClass::CulmActivity) => vec![Formula::end(bare.clone()), Formula::begin(bare)],
        _ => vec![bare],
    };

    let mut store = c.store.clone();
    store.sort_by_key(|q| q.position);
    let mut out = Vec::new();
    for v in variants {
        let mut f = c.low.iter().fold(v, |acc, a| wrap(a, acc));
        if perfect {
            f = Formula::perf("e2", f);
        }
        f = match tense {
            Tense::Past => Formula::past("e1", f),
            Tense::Pres => Formula::pres("e1", f),
        };
        f = c.high.iter().fold(f, |acc, a| wrap(a, acc));
        for q in store.iter().rev() {
            f = match q.kind {
                QuantKind::Exists => Formula::exists(&q.var, q.restriction.clone(), f),
                QuantKind::Interrog => Formula::interrog(&q.var, q.restriction.clone(), f),
            };
        }
        if c.whens == 1 {
            f = Formula::mxl("e1", f);
        }
        out.push(canonicalize(&cancel_culm_under_for(&f)));
    }
    Ok(out)
}
