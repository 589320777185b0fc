//! Functional descriptions derived from constituent trees.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{CStructure, Category};
use crate::lexicon::LexCategory;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FStructureError {
    #[error("more than one governing predicate: {0:?}")]
    MultipleHeads(Vec<String>),
    #[error("no governing predicate")]
    NoHead,
    #[error("grammatical function {0} filled twice")]
    DuplicateFunction(String),
}

/// Closed set of feature names. Grammatical functions are upper case,
/// atomic features lower case.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Subj,
    Obj,
    /// Oblique introduced by the given preposition, e.g. `OBL-to`.
    Obl(String),
    /// Adjective adjuncts.
    Adj,
    /// Further coordinated predicates sharing this structure's arguments.
    Coord,
    Modal,
    Neg,
    /// Interrogative clause marker.
    Q,
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Subj => f.write_str("SUBJ"),
            Feature::Obj => f.write_str("OBJ"),
            Feature::Obl(p) => write!(f, "OBL-{p}"),
            Feature::Adj => f.write_str("ADJ"),
            Feature::Coord => f.write_str("COORD"),
            Feature::Modal => f.write_str("modal"),
            Feature::Neg => f.write_str("neg"),
            Feature::Q => f.write_str("q"),
        }
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "SUBJ" => Feature::Subj,
            "OBJ" => Feature::Obj,
            "ADJ" => Feature::Adj,
            "COORD" => Feature::Coord,
            "modal" => Feature::Modal,
            "neg" => Feature::Neg,
            "q" => Feature::Q,
            _ => match s.strip_prefix("OBL-") {
                Some(p) if !p.is_empty() => Feature::Obl(p.to_string()),
                _ => return Err(format!("unknown feature `{s}`")),
            },
        })
    }
}

impl Serialize for Feature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Feature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Sg,
    Pl,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FValue {
    Atom(String),
    F(Box<FStructure>),
    Set(Vec<FStructure>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FStructure {
    pub pred: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<Number>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub features: IndexMap<Feature, FValue>,
}

impl FStructure {
    pub fn new(pred: impl Into<String>) -> Self {
        FStructure { pred: pred.into(), spec: None, num: None, features: IndexMap::new() }
    }

    pub fn with_spec(mut self, spec: &str) -> Self {
        self.spec = Some(spec.to_string());
        self
    }

    pub fn with_num(mut self, num: Number) -> Self {
        self.num = Some(num);
        self
    }

    pub fn with(mut self, feature: Feature, value: FValue) -> Self {
        self.features.insert(feature, value);
        self
    }

    pub fn get(&self, feature: &Feature) -> Option<&FValue> {
        self.features.get(feature)
    }

    pub fn atom(&self, feature: &Feature) -> Option<&str> {
        match self.features.get(feature)? {
            FValue::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn nested(&self, feature: &Feature) -> Option<&FStructure> {
        match self.features.get(feature)? {
            FValue::F(f) => Some(f),
            _ => None,
        }
    }

    fn insert_unique(&mut self, feature: Feature, value: FValue) -> Result<(), FStructureError> {
        if self.features.contains_key(&feature) {
            return Err(FStructureError::DuplicateFunction(feature.to_string()));
        }
        self.features.insert(feature, value);
        Ok(())
    }

    fn append_modal(&mut self, marker: &str) {
        let joined = match self.atom(&Feature::Modal) {
            Some(prev) => format!("{prev} {marker}"),
            None => marker.to_string(),
        };
        self.features.insert(Feature::Modal, FValue::Atom(joined));
    }
}

/// Attribute-value matrix rendering, one feature per line.
impl fmt::Display for FStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_avm(fs: &FStructure, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
            let pad = " ".repeat(indent + 2);
            writeln!(f, "[")?;
            writeln!(f, "{pad}PRED '{}'", fs.pred)?;
            if let Some(spec) = &fs.spec {
                writeln!(f, "{pad}spec {spec}")?;
            }
            if let Some(num) = fs.num {
                writeln!(f, "{pad}num {}", if num == Number::Sg { "sg" } else { "pl" })?;
            }
            for (k, v) in &fs.features {
                write!(f, "{pad}{k} ")?;
                match v {
                    FValue::Atom(a) => writeln!(f, "{a}")?,
                    FValue::F(inner) => write_avm(inner, f, indent + 2)?,
                    FValue::Set(items) => {
                        writeln!(f, "{{")?;
                        for item in items {
                            write!(f, "{pad}  ")?;
                            write_avm(item, f, indent + 4)?;
                        }
                        writeln!(f, "{pad}}}")?;
                    }
                }
            }
            writeln!(f, "{}]", " ".repeat(indent))
        }
        write_avm(self, f, 0)
    }
}

/// Derives the functional description of a sentence tree.
///
/// Noun phrases before the governing verb become `SUBJ`, bare noun phrases
/// after it `OBJ`, and prepositional ones `OBL-<preposition>`. Auxiliaries and
/// periphrases wrapping an embedded verb phrase (`be able to`) accumulate in
/// the `modal` feature; `v conj v` yields `COORD`.
pub fn derive_fstructure(tree: &CStructure) -> Result<FStructure, FStructureError> {
    let mut builder = Builder::default();
    if tree.category != Category::S {
        return Err(FStructureError::NoHead);
    }
    builder.clause(tree)?;
    builder.finish()
}

#[derive(Default)]
struct Builder {
    heads: Vec<String>,
    modal: Vec<String>,
    neg: bool,
    adjuncts: Vec<FStructure>,
    slots: Vec<(Feature, FStructure)>,
    head_seen: bool,
}

impl Builder {
    fn clause(&mut self, s: &CStructure) -> Result<(), FStructureError> {
        for child in &s.children {
            match child.category {
                Category::Vp => self.verb_phrase(child)?,
                Category::V => self.verbs(&[child], false)?,
                Category::Np => self.noun_phrase_slot(child)?,
                Category::Aux => self.modal.extend(child.lemma().map(str::to_string)),
                Category::Adv => self.adverb(child),
                _ => {}
            }
        }
        Ok(())
    }

    fn adverb(&mut self, node: &CStructure) {
        match node.lemma() {
            Some("not") => self.neg = true,
            Some(other) => self.adjuncts.push(FStructure::new(other)),
            None => {}
        }
    }

    fn verb_phrase(&mut self, vp: &CStructure) -> Result<(), FStructureError> {
        let embedded: Vec<&CStructure> = vp.children.iter().filter(|c| c.category == Category::Vp).collect();
        if embedded.len() > 1 {
            return Err(FStructureError::MultipleHeads(
                embedded.iter().filter_map(|vp| head_lemma(vp)).collect(),
            ));
        }
        if let Some(inner) = embedded.first() {
            // Material around an embedded vp is a modal periphrasis.
            let periphrasis: Vec<&str> = vp
                .children
                .iter()
                .filter(|c| matches!(c.category, Category::V | Category::Adj | Category::P | Category::Aux))
                .filter_map(CStructure::lemma)
                .collect();
            if !periphrasis.is_empty() {
                self.modal.push(periphrasis.join(" "));
            }
            self.verb_phrase(inner)?;
            for c in vp.children.iter().filter(|c| c.category == Category::Np) {
                self.noun_phrase_slot(c)?;
            }
            return Ok(());
        }
        let verbs: Vec<&CStructure> = vp.children.iter().filter(|c| c.category == Category::V).collect();
        if !verbs.is_empty() {
            let has_conj = vp.children.iter().any(|c| c.category == Category::Conj);
            self.verbs(&verbs, has_conj)?;
        }
        for child in &vp.children {
            match child.category {
                Category::Np => self.noun_phrase_slot(child)?,
                Category::Aux => self.modal.extend(child.lemma().map(str::to_string)),
                Category::Adv => self.adverb(child),
                _ => {}
            }
        }
        Ok(())
    }

    /// Registers verb heads; `v -> v conj v` nodes are unpacked.
    fn verbs(&mut self, nodes: &[&CStructure], has_conj: bool) -> Result<(), FStructureError> {
        if self.head_seen {
            let mut all = self.heads.clone();
            all.extend(nodes.iter().filter_map(|n| head_lemma(n)));
            return Err(FStructureError::MultipleHeads(all));
        }
        let mut lemmas = Vec::new();
        let mut coordinated = has_conj;
        for node in nodes {
            collect_verbs(node, &mut lemmas, &mut coordinated);
        }
        if lemmas.len() > 1 && !coordinated {
            return Err(FStructureError::MultipleHeads(lemmas));
        }
        self.heads = lemmas;
        self.head_seen = true;
        Ok(())
    }

    fn noun_phrase_slot(&mut self, np: &CStructure) -> Result<(), FStructureError> {
        if np.children.iter().any(|c| c.category == Category::Np) {
            for c in &np.children {
                if c.category == Category::Np {
                    self.noun_phrase_slot(c)?;
                }
            }
            return Ok(());
        }
        let mut fs: Option<FStructure> = None;
        let mut spec = None;
        let mut prep = None;
        let mut adjs = Vec::new();
        for leaf in &np.children {
            let Some(l) = &leaf.leaf else { continue };
            match leaf.category {
                Category::P => prep = Some(l.entry.lemma.clone()),
                Category::D => spec = Some(l.entry.lemma.clone()),
                Category::Adj => adjs.push(FStructure::new(l.entry.lemma.clone())),
                Category::N => {
                    // The last noun heads a compound; earlier nouns modify it.
                    if let Some(prev) = fs.take() {
                        adjs.push(FStructure::new(prev.pred));
                    }
                    let num = if l.entry.category == LexCategory::Noun && l.token.surface != l.entry.lemma {
                        Number::Pl
                    } else {
                        Number::Sg
                    };
                    fs = Some(FStructure::new(l.entry.lemma.clone()).with_num(num));
                }
                _ => {}
            }
        }
        let Some(mut fs) = fs else {
            return Ok(());
        };
        fs.spec = spec;
        if !adjs.is_empty() {
            fs.features.insert(Feature::Adj, FValue::Set(adjs));
        }
        let feature = match prep {
            Some(p) => Feature::Obl(p),
            None if self.head_seen => Feature::Obj,
            None => Feature::Subj,
        };
        if self.slots.iter().any(|(f, _)| *f == feature) {
            return Err(FStructureError::DuplicateFunction(feature.to_string()));
        }
        self.slots.push((feature, fs));
        Ok(())
    }

    fn finish(self) -> Result<FStructure, FStructureError> {
        let mut heads = self.heads.into_iter();
        let pred = heads.next().ok_or(FStructureError::NoHead)?;
        let mut out = FStructure::new(pred);
        let coord: Vec<FStructure> = heads.map(FStructure::new).collect();
        // SUBJ first, then the modal markers, then the post-verbal functions.
        let (pre, post): (Vec<_>, Vec<_>) = self.slots.into_iter().partition(|(f, _)| *f == Feature::Subj);
        for (f, v) in pre {
            out.insert_unique(f, FValue::F(Box::new(v)))?;
        }
        for m in &self.modal {
            out.append_modal(m);
        }
        if self.neg {
            out.features.insert(Feature::Neg, FValue::Atom("+".into()));
        }
        if !coord.is_empty() {
            out.features.insert(Feature::Coord, FValue::Set(coord));
        }
        for (f, v) in post {
            out.insert_unique(f, FValue::F(Box::new(v)))?;
        }
        if !self.adjuncts.is_empty() {
            out.features.insert(Feature::Adj, FValue::Set(self.adjuncts));
        }
        Ok(out)
    }
}

fn collect_verbs(node: &CStructure, out: &mut Vec<String>, coordinated: &mut bool) {
    if let Some(l) = node.lemma() {
        if node.category == Category::V {
            out.push(l.to_string());
        } else if node.category == Category::Conj {
            *coordinated = true;
        }
        return;
    }
    for c in &node.children {
        collect_verbs(c, out, coordinated);
    }
}

fn head_lemma(node: &CStructure) -> Option<String> {
    if node.category == Category::V {
        if let Some(l) = node.lemma() {
            return Some(l.to_string());
        }
    }
    node.children.iter().find_map(head_lemma)
}
