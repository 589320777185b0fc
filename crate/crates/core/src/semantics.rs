//! Case-grammar role assignment: f-structures become predicate-argument
//! propositions carrying a modality.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{LexCategory, Lexicon, Necessity, VerbCategory};
use crate::ontology::UNKNOWN;
use crate::syntax::{FStructure, FValue, Feature};

/// The closed thematic-role inventory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ThematicRole {
    Agnt,
    Obj,
    Src,
    Dest,
    Loc,
    Inst,
    Benf,
    Time,
    Manr,
}

impl ThematicRole {
    pub const ALL: [ThematicRole; 9] = [
        ThematicRole::Agnt,
        ThematicRole::Obj,
        ThematicRole::Src,
        ThematicRole::Dest,
        ThematicRole::Loc,
        ThematicRole::Inst,
        ThematicRole::Benf,
        ThematicRole::Time,
        ThematicRole::Manr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ThematicRole::Agnt => "AGNT",
            ThematicRole::Obj => "OBJ",
            ThematicRole::Src => "SRC",
            ThematicRole::Dest => "DEST",
            ThematicRole::Loc => "LOC",
            ThematicRole::Inst => "INST",
            ThematicRole::Benf => "BENF",
            ThematicRole::Time => "TIME",
            ThematicRole::Manr => "MANR",
        }
    }

    /// Spatial roles, whose filler is the object a region noun is relative to.
    pub fn is_locative(self) -> bool {
        matches!(self, ThematicRole::Loc | ThematicRole::Src | ThematicRole::Dest)
    }
}

impl fmt::Display for ThematicRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ThematicRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_uppercase();
        ThematicRole::ALL
            .into_iter()
            .find(|r| r.as_str() == upper)
            .ok_or_else(|| format!("unknown thematic role `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Time {
    Past,
    Present,
    Future,
    #[default]
    Unspecified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Obligation,
    Possibility,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Modality {
    pub negation: bool,
    pub interrogation: bool,
    pub time: Time,
    /// Sorted, without duplicates.
    pub mode: Vec<Mode>,
}

impl Modality {
    pub fn has(&self, mode: Mode) -> bool {
        self.mode.contains(&mode)
    }

    fn add(&mut self, mode: Mode) {
        if !self.has(mode) {
            self.mode.push(mode);
            self.mode.sort();
        }
    }

    /// Reads the modal markers of an f-structure.
    pub fn from_fstructure(f: &FStructure) -> Modality {
        let mut m = Modality {
            negation: f.get(&Feature::Neg).is_some(),
            interrogation: f.get(&Feature::Q).is_some(),
            ..Modality::default()
        };
        let marker = f.atom(&Feature::Modal).unwrap_or("");
        let words: Vec<&str> = marker.split_whitespace().collect();
        for w in &words {
            match *w {
                "must" | "shall" | "should" => m.add(Mode::Obligation),
                "can" | "may" | "could" => m.add(Mode::Possibility),
                "cannot" => {
                    m.add(Mode::Possibility);
                    m.negation = true;
                }
                "will" => m.time = Time::Future,
                _ => {}
            }
        }
        if words.windows(3).any(|w| w == ["be", "able", "to"]) {
            m.add(Mode::Possibility);
        }
        m
    }
}

/// Object voices; recorded on stative propositions only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Voice {
    Existential,
    Situative,
    Equative,
    Descriptive,
    Subjective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub lemma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determiner: Option<String>,
    pub concept_type: String,
    /// Possessive `of` complements, innermost last.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qualifiers: Vec<Argument>,
}

impl Argument {
    pub fn new(lemma: &str, determiner: Option<&str>, concept_type: &str) -> Self {
        Argument {
            lemma: lemma.to_string(),
            determiner: determiner.map(str::to_string),
            concept_type: concept_type.to_string(),
            qualifiers: Vec::new(),
        }
    }

    pub fn with_qualifier(mut self, q: Argument) -> Self {
        self.qualifiers.push(q);
        self
    }

    /// The argument a concept is built for when it fills `role`: locative
    /// roles skip over region nouns (`the interior of the car`) to the object.
    pub fn anchor(&self, role: ThematicRole) -> &Argument {
        if role.is_locative() {
            if let Some(q) = self.qualifiers.last() {
                return q.anchor(role);
            }
        }
        self
    }

    fn attach(&mut self, q: Argument) {
        match self.qualifiers.last_mut() {
            Some(inner) => inner.attach(q),
            None => self.qualifiers.push(q),
        }
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lemma)?;
        for q in &self.qualifiers {
            write!(f, "-of-{q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposition {
    pub predicate: String,
    pub predicate_type: String,
    pub verb_category: VerbCategory,
    pub bindings: IndexMap<ThematicRole, Argument>,
    pub modality: Modality,
    pub source_sentence: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unsatisfied_roles: Vec<ThematicRole>,
    /// Constituents no role could take, e.g. `OBL-with: body`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unattached: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voice: Option<Voice>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("`{0}` has no verb entry with a case frame")]
    NoCaseFrame(String),
    #[error("`{predicate}`: {first} and {second} both map to required role {role}")]
    RoleClash { predicate: String, role: ThematicRole, first: String, second: String },
    #[error("preposition table line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Preposition to candidate roles, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleTable {
    map: IndexMap<String, Vec<ThematicRole>>,
}

impl RoleTable {
    pub fn parse(text: &str) -> Result<Self, SemanticsError> {
        let mut map: IndexMap<String, Vec<ThematicRole>> = IndexMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SemanticsError::Syntax { line: idx + 1, message };
            let (prep, role) = line
                .split_once('\t')
                .ok_or_else(|| err(format!("expected `preposition<TAB>role`, got `{line}`")))?;
            let role: ThematicRole = role.parse().map_err(err)?;
            map.entry(prep.trim().to_lowercase()).or_default().push(role);
        }
        Ok(RoleTable { map })
    }

    pub fn candidates(&self, preposition: &str) -> &[ThematicRole] {
        self.map.get(preposition).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn classify_verb(lemma: &str, lexicon: &Lexicon) -> Result<VerbCategory, SemanticsError> {
    lexicon
        .verb_entry(lemma)
        .and_then(|e| e.verb_category)
        .ok_or_else(|| SemanticsError::NoCaseFrame(lemma.to_string()))
}

fn concept_type_of(lemma: &str, lexicon: &Lexicon) -> String {
    let entries = lexicon.lookup(lemma);
    entries
        .iter()
        .find(|e| e.category == LexCategory::Noun)
        .or_else(|| entries.first())
        .and_then(|e| e.concept_type.clone())
        .unwrap_or_else(|| UNKNOWN.to_string())
}

fn argument_of(f: &FStructure, lexicon: &Lexicon) -> Argument {
    Argument::new(&f.pred, f.spec.as_deref(), &concept_type_of(&f.pred, lexicon))
}

/// Assigns thematic roles for the governing predicate and every predicate
/// coordinated with it. Coordinated predicates share arguments and modality.
pub fn assign_roles(
    f: &FStructure,
    lexicon: &Lexicon,
    table: &RoleTable,
    source_sentence: &str,
) -> Result<Vec<Proposition>, SemanticsError> {
    let mut predicates = vec![f.pred.clone()];
    if let Some(FValue::Set(items)) = f.get(&Feature::Coord) {
        predicates.extend(items.iter().map(|i| i.pred.clone()));
    }
    let modality = Modality::from_fstructure(f);
    predicates
        .iter()
        .map(|p| proposition_for(p, f, lexicon, table, &modality, source_sentence))
        .collect()
}

enum Slot {
    Role(ThematicRole),
    Unattached(usize),
}

fn proposition_for(
    predicate: &str,
    f: &FStructure,
    lexicon: &Lexicon,
    table: &RoleTable,
    modality: &Modality,
    source_sentence: &str,
) -> Result<Proposition, SemanticsError> {
    let entry = lexicon
        .verb_entry(predicate)
        .filter(|e| e.case_frame.is_some())
        .ok_or_else(|| SemanticsError::NoCaseFrame(predicate.to_string()))?;
    let verb_category = entry.verb_category.unwrap_or(VerbCategory::Factive);
    let mut bindings: IndexMap<ThematicRole, Argument> = IndexMap::new();
    let mut unattached: Vec<(String, Argument)> = Vec::new();
    let mut previous: Option<Slot> = None;

    for (feature, value) in &f.features {
        let FValue::F(sub) = value else { continue };
        let arg = argument_of(sub, lexicon);
        let candidates: Vec<ThematicRole> = match feature {
            Feature::Subj => match verb_category {
                VerbCategory::Stative => vec![ThematicRole::Obj, ThematicRole::Agnt],
                _ => vec![ThematicRole::Agnt],
            },
            Feature::Obj => vec![ThematicRole::Obj],
            Feature::Obl(p) if p == "of" => {
                match &previous {
                    Some(Slot::Role(r)) => bindings[r].attach(arg),
                    Some(Slot::Unattached(i)) => unattached[*i].1.attach(arg),
                    None => {
                        unattached.push((feature.to_string(), arg));
                        previous = Some(Slot::Unattached(unattached.len() - 1));
                    }
                }
                continue;
            }
            Feature::Obl(p) => table.candidates(p).to_vec(),
            _ => continue,
        };
        let in_frame: Vec<ThematicRole> =
            candidates.into_iter().filter(|r| entry.role_necessity(*r).is_some()).collect();
        match in_frame.iter().find(|r| !bindings.contains_key(*r)) {
            Some(&role) => {
                bindings.insert(role, arg);
                previous = Some(Slot::Role(role));
            }
            None => {
                if let Some(&role) = in_frame.first() {
                    if entry.role_necessity(role) == Some(Necessity::Required) {
                        return Err(SemanticsError::RoleClash {
                            predicate: predicate.to_string(),
                            role,
                            first: bindings[&role].to_string(),
                            second: arg.to_string(),
                        });
                    }
                }
                unattached.push((feature.to_string(), arg));
                previous = Some(Slot::Unattached(unattached.len() - 1));
            }
        }
    }

    let frame = entry.case_frame.as_deref().unwrap_or(&[]);
    let unsatisfied_roles = frame
        .iter()
        .filter(|slot| slot.necessity == Necessity::Required && !bindings.contains_key(&slot.role))
        .map(|slot| slot.role)
        .collect();
    Ok(Proposition {
        predicate: predicate.to_string(),
        predicate_type: entry.concept_type.clone().unwrap_or_else(|| predicate.to_string()),
        verb_category,
        bindings,
        modality: modality.clone(),
        source_sentence: source_sentence.to_string(),
        unsatisfied_roles,
        unattached: unattached.into_iter().map(|(f, a)| format!("{f}: {a}")).collect(),
        voice: (verb_category == VerbCategory::Stative).then_some(Voice::Descriptive),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::segment;
    use crate::resources::{FIXTURE_GRAMMAR, FIXTURE_LEXICON, FIXTURE_PREPOSITIONS, BASE_GRAMMAR};
    use crate::syntax::{derive_fstructure, load_grammar, parse};

    fn lex() -> Lexicon {
        Lexicon::parse(FIXTURE_LEXICON).unwrap()
    }

    fn table() -> RoleTable {
        RoleTable::parse(FIXTURE_PREPOSITIONS).unwrap()
    }

    fn fs(text: &str, grammar: &str) -> FStructure {
        let tokens = segment(text, "t").unwrap();
        let tree = parse(&tokens, &lex(), &load_grammar(grammar).unwrap()).unwrap().remove(0);
        derive_fstructure(&tree).unwrap()
    }

    #[test]
    fn access_binds_location_and_beneficiary() {
        let f = fs("access to the interior of the car for the driver", BASE_GRAMMAR);
        let props = assign_roles(&f, &lex(), &table(), "s1").unwrap();
        assert_eq!(props.len(), 1);
        let p = &props[0];
        assert_eq!(p.predicate, "access");
        let loc = &p.bindings[&ThematicRole::Loc];
        assert_eq!(loc.to_string(), "interior-of-car");
        assert_eq!(loc.anchor(ThematicRole::Loc).lemma, "car");
        assert_eq!(p.bindings[&ThematicRole::Benf], Argument::new("driver", Some("the"), "driver"));
        assert_eq!(p.bindings.len(), 2);
        assert!(p.unsatisfied_roles.is_empty());
    }

    #[test]
    fn coordination_splits_into_parallel_propositions() {
        let f = fs("A driver must be able to open and close the door", FIXTURE_GRAMMAR);
        let props = assign_roles(&f, &lex(), &table(), "s2").unwrap();
        let preds: Vec<_> = props.iter().map(|p| p.predicate.as_str()).collect();
        assert_eq!(preds, ["open", "close"]);
        for p in &props {
            assert_eq!(p.bindings[&ThematicRole::Agnt], Argument::new("driver", Some("a"), "driver"));
            assert_eq!(p.bindings[&ThematicRole::Obj], Argument::new("door", Some("the"), "door"));
            assert_eq!(p.modality.mode, [Mode::Obligation, Mode::Possibility]);
        }
        assert_eq!(props[0].modality, props[1].modality);
    }

    #[test]
    fn bare_predicate_reports_unsatisfied_roles() {
        let props = assign_roles(&FStructure::new("rotate"), &lex(), &table(), "s").unwrap();
        assert!(props[0].bindings.is_empty());
        assert_eq!(props[0].unsatisfied_roles, [ThematicRole::Agnt, ThematicRole::Obj]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            assign_roles(&FStructure::new("door"), &lex(), &table(), "s"),
            Err(SemanticsError::NoCaseFrame("door".into()))
        );
        let f = fs("the hinge must open the door", FIXTURE_GRAMMAR);
        let mut clash = f.clone();
        clash.features.insert(Feature::Obl("by".into()), f.get(&Feature::Subj).unwrap().clone());
        assert!(matches!(
            assign_roles(&clash, &lex(), &table(), "s"),
            Err(SemanticsError::RoleClash { role: ThematicRole::Agnt, .. })
        ));
    }

    #[test]
    fn verb_classes() {
        assert_eq!(classify_verb("open", &lex()), Ok(VerbCategory::Factive));
        assert_eq!(classify_verb("be", &lex()), Ok(VerbCategory::Stative));
        assert_eq!(classify_verb("state", &lex()), Ok(VerbCategory::Declarative));
        assert!(classify_verb("door", &lex()).is_err());
    }

    #[test]
    fn modality_markers() {
        let m = |marker: &str| {
            Modality::from_fstructure(&FStructure::new("x").with(Feature::Modal, FValue::Atom(marker.into()))).mode
        };
        assert_eq!(m("must"), [Mode::Obligation]);
        assert_eq!(m("can"), [Mode::Possibility]);
        assert_eq!(m("must be able to"), [Mode::Obligation, Mode::Possibility]);
        assert!(Modality::from_fstructure(&FStructure::new("x")).mode.is_empty());
        let f = fs("the driver must not open the door", FIXTURE_GRAMMAR);
        assert!(Modality::from_fstructure(&f).negation);
    }

    #[test]
    fn stative_voice_annotation() {
        let f = fs("the door is on the body", FIXTURE_GRAMMAR);
        let props = assign_roles(&f, &lex(), &table(), "s").unwrap();
        assert_eq!(props[0].voice, Some(Voice::Descriptive));
        assert_eq!(props[0].bindings[&ThematicRole::Obj].lemma, "door");
        assert_eq!(props[0].bindings[&ThematicRole::Loc].lemma, "body");
    }
}
