//! Segmentation, lemmatization and the domain lexicon.
//!
//! The lexicon is a tab-separated file with one entry per line:
//!
//! ```text
//! lemma  category  concept_type  verb_category  case_frame  inflections
//! open   verb      open          factive        agnt:req,obj:req  opens|opened|opening
//! ```
//!
//! Absent fields are written `-`; lines starting with `#` are comments.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::ThematicRole;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("empty input")]
    EmptyInput,
    #[error("lexicon line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// One whitespace-delimited word of a requirement sentence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub position: usize,
    pub sentence_id: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexCategory {
    Noun,
    Verb,
    Preposition,
    Determiner,
    Adjective,
    Adverb,
    /// Modal auxiliaries (`must`, `can`, ...).
    Auxiliary,
    /// Coordinating conjunctions.
    Conjunction,
}

impl LexCategory {
    pub const ALL: [LexCategory; 8] = [
        LexCategory::Noun,
        LexCategory::Verb,
        LexCategory::Preposition,
        LexCategory::Determiner,
        LexCategory::Adjective,
        LexCategory::Adverb,
        LexCategory::Auxiliary,
        LexCategory::Conjunction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LexCategory::Noun => "noun",
            LexCategory::Verb => "verb",
            LexCategory::Preposition => "preposition",
            LexCategory::Determiner => "determiner",
            LexCategory::Adjective => "adjective",
            LexCategory::Adverb => "adverb",
            LexCategory::Auxiliary => "auxiliary",
            LexCategory::Conjunction => "conjunction",
        }
    }
}

impl fmt::Display for LexCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

/// The three verbal categories of propositional analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbCategory {
    Stative,
    Factive,
    Declarative,
}

impl VerbCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            VerbCategory::Stative => "stative",
            VerbCategory::Factive => "factive",
            VerbCategory::Declarative => "declarative",
        }
    }
}

impl fmt::Display for VerbCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VerbCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stative" => Ok(VerbCategory::Stative),
            "factive" => Ok(VerbCategory::Factive),
            "declarative" => Ok(VerbCategory::Declarative),
            _ => Err(format!("unknown verb category `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Necessity {
    Required,
    Optional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseSlot {
    pub role: ThematicRole,
    pub necessity: Necessity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalEntry {
    pub lemma: String,
    pub category: LexCategory,
    pub concept_type: Option<String>,
    pub verb_category: Option<VerbCategory>,
    pub case_frame: Option<Vec<CaseSlot>>,
    pub inflections: Vec<String>,
}

impl LexicalEntry {
    pub fn is_verb(&self) -> bool {
        self.category == LexCategory::Verb
    }

    pub fn role_necessity(&self, role: ThematicRole) -> Option<Necessity> {
        self.case_frame
            .as_ref()?
            .iter()
            .find(|slot| slot.role == role)
            .map(|slot| slot.necessity)
    }

    /// Synthetic entry for a word the lexicon does not know: a noun typed `UNKNOWN`.
    pub fn unknown(surface: &str) -> Self {
        LexicalEntry {
            lemma: surface.to_lowercase(),
            category: LexCategory::Noun,
            concept_type: Some(crate::ontology::UNKNOWN.to_string()),
            verb_category: None,
            case_frame: None,
            inflections: Vec::new(),
        }
    }

    fn to_line(&self) -> String {
        let dash = |s: Option<String>| s.unwrap_or_else(|| "-".to_string());
        let frame = self.case_frame.as_ref().map(|frame| {
            frame
                .iter()
                .map(|slot| {
                    let n = match slot.necessity {
                        Necessity::Required => "req",
                        Necessity::Optional => "opt",
                    };
                    format!("{}:{n}", slot.role.as_str().to_lowercase())
                })
                .collect::<Vec<_>>()
                .join(",")
        });
        let inflections = if self.inflections.is_empty() {
            None
        } else {
            Some(self.inflections.join("|"))
        };
        [
            self.lemma.clone(),
            self.category.to_string(),
            dash(self.concept_type.clone()),
            dash(self.verb_category.map(|v| v.to_string())),
            dash(frame),
            dash(inflections),
        ]
        .join("\t")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: IndexMap<String, Vec<LexicalEntry>>,
    inflection_index: HashMap<String, String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: LexicalEntry) {
        for surface in &entry.inflections {
            self.inflection_index
                .entry(surface.to_lowercase())
                .or_insert_with(|| entry.lemma.clone());
        }
        self.entries.entry(entry.lemma.clone()).or_default().push(entry);
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            lexicon.insert(parse_entry(trimmed, line)?);
        }
        Ok(lexicon)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from("# lemma\tcategory\tconcept_type\tverb_category\tcase_frame\tinflections\n");
        for entry in self.entries.values().flatten() {
            out.push_str(&entry.to_line());
            out.push('\n');
        }
        out
    }

    /// All entries for `lemma`, in file order.
    pub fn lookup(&self, lemma: &str) -> &[LexicalEntry] {
        self.entries.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.entries.contains_key(lemma)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values().flatten()
    }

    pub fn verb_entry(&self, lemma: &str) -> Option<&LexicalEntry> {
        self.lookup(lemma).iter().find(|e| e.is_verb())
    }

    fn inflected_lemma(&self, surface: &str) -> Option<&str> {
        self.inflection_index.get(surface).map(String::as_str)
    }

}

fn parse_entry(line: &str, line_no: usize) -> Result<LexicalEntry, LexiconError> {
    let err = |message: String| LexiconError::Syntax { line: line_no, message };
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != 6 {
        return Err(err(format!("expected 6 tab-separated fields, found {}", fields.len())));
    }
    let opt = |s: &str| (s != "-").then(|| s.to_string());
    let lemma = fields[0].to_lowercase();
    if lemma.is_empty() || lemma == "-" || lemma.chars().any(char::is_whitespace) {
        return Err(err(format!("invalid lemma `{}`", fields[0])));
    }
    let category: LexCategory = fields[1].parse().map_err(err)?;
    let concept_type = opt(fields[2]);
    let verb_category = opt(fields[3])
        .map(|v| v.parse::<VerbCategory>())
        .transpose()
        .map_err(err)?;
    let case_frame = opt(fields[4])
        .map(|frame| parse_case_frame(&frame))
        .transpose()
        .map_err(err)?;
    let inflections = opt(fields[5])
        .map(|s| s.split('|').map(|i| i.trim().to_lowercase()).filter(|i| !i.is_empty()).collect())
        .unwrap_or_default();

    let is_verb = category == LexCategory::Verb;
    if is_verb != verb_category.is_some() || is_verb != case_frame.is_some() {
        return Err(err(format!(
            "`{lemma}`: verb_category and case_frame must be given exactly for verbs"
        )));
    }
    Ok(LexicalEntry {
        lemma,
        category,
        concept_type,
        verb_category,
        case_frame,
        inflections,
    })
}

fn parse_case_frame(text: &str) -> Result<Vec<CaseSlot>, String> {
    let mut slots: Vec<CaseSlot> = Vec::new();
    for item in text.split(',') {
        let (role, necessity) = item
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("case frame item `{item}` is not `role:req|opt`"))?;
        let role: ThematicRole = role.parse()?;
        let necessity = match necessity {
            "req" => Necessity::Required,
            "opt" => Necessity::Optional,
            other => return Err(format!("case frame necessity `{other}` is not req|opt")),
        };
        if slots.iter().any(|s| s.role == role) {
            return Err(format!("role {role} listed twice in case frame"));
        }
        slots.push(CaseSlot { role, necessity });
    }
    Ok(slots)
}

/// Splits a raw sentence into lowercase tokens.
///
/// Whitespace separates tokens, terminal `.`, `?` and `!` are stripped and
/// hyphenated compounds stay whole.
pub fn segment(text: &str, sentence_id: &str) -> Result<Vec<Token>, LexiconError> {
    let trimmed = text.trim().trim_end_matches(['.', '?', '!']).trim_end();
    if trimmed.is_empty() {
        return Err(LexiconError::EmptyInput);
    }
    Ok(trimmed
        .split_whitespace()
        .enumerate()
        .map(|(position, surface)| Token {
            surface: surface.to_lowercase(),
            position,
            sentence_id: sentence_id.to_string(),
        })
        .collect())
}

/// True when the sentence ends in a question mark.
pub fn is_interrogative(text: &str) -> bool {
    text.trim_end().ends_with('?')
}

/// Maps a surface form to its lemma via the lexicon's inflection tables.
pub fn lemmatize(token: &Token, lexicon: &Lexicon) -> String {
    let folded = token.surface.to_lowercase();
    if lexicon.contains(&folded) {
        return folded;
    }
    lexicon.inflected_lemma(&folded).map(str::to_string).unwrap_or(folded)
}

pub fn lookup<'a>(lemma: &str, lexicon: &'a Lexicon) -> &'a [LexicalEntry] {
    lexicon.lookup(lemma)
}
