//! Engineering ontology: the concept-type hierarchy, the canonical base of
//! defining graphs, and candidate-term extraction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cg::{CgError, ConceptualGraph};
use crate::lexicon::segment;

/// Universal type at the top of every hierarchy.
pub const TOP: &str = "Entity";
/// Absurd type below every other type.
pub const BOTTOM: &str = "Absurdity";
/// Type given to out-of-lexicon words.
pub const UNKNOWN: &str = "UNKNOWN";

#[derive(Debug, Error, PartialEq)]
pub enum OntologyError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("adding `{child} < {parent}` would create a cycle")]
    Cycle { child: String, parent: String },
    #[error("hierarchy line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("a definition for `{0}` already exists")]
    DuplicateDefinition(String),
    #[error("invalid definition for `{term}`: {source}")]
    InvalidDefinition { term: String, source: CgError },
    #[error("empty corpus")]
    EmptyCorpus,
}

/// Partial order of concept types with [`TOP`] and [`BOTTOM`].
///
/// Types may have several parents. The ancestor sets are kept transitively
/// closed so `subsumes` is a set lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeHierarchy {
    parents: BTreeMap<String, BTreeSet<String>>,
    ancestors: HashMap<String, BTreeSet<String>>,
}

impl Default for TypeHierarchy {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeHierarchy {
    pub fn new() -> Self {
        let mut h = TypeHierarchy { parents: BTreeMap::new(), ancestors: HashMap::new() };
        h.parents.insert(TOP.to_string(), BTreeSet::new());
        h.parents.insert(UNKNOWN.to_string(), BTreeSet::from([TOP.to_string()]));
        h.recompute();
        h
    }

    /// Parses `child < parent` lines. Types that never appear as a child sit directly under the top.
    pub fn parse(text: &str) -> Result<Self, OntologyError> {
        let mut h = TypeHierarchy::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (child, parent) = line.split_once('<').ok_or_else(|| OntologyError::Syntax {
                line: idx + 1,
                message: format!("expected `child < parent`, got `{line}`"),
            })?;
            let (child, parent) = (child.trim(), parent.trim());
            if child.is_empty() || parent.is_empty() || child.contains(char::is_whitespace) || parent.contains(char::is_whitespace) {
                return Err(OntologyError::Syntax { line: idx + 1, message: format!("bad type names in `{line}`") });
            }
            h.add_subtype(child, parent)?;
        }
        Ok(h)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (child, parents) in &self.parents {
            for parent in parents {
                if child == UNKNOWN && parent == TOP {
                    continue;
                }
                out.push_str(&format!("{child} < {parent}\n"));
            }
        }
        out
    }

    pub fn contains(&self, ty: &str) -> bool {
        ty == BOTTOM || self.parents.contains_key(ty)
    }

    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    /// Registers `ty` directly under the top if it is new.
    pub fn register(&mut self, ty: &str) {
        if !self.contains(ty) {
            self.parents.insert(ty.to_string(), BTreeSet::from([TOP.to_string()]));
            self.recompute();
        }
    }

    pub fn add_subtype(&mut self, child: &str, parent: &str) -> Result<(), OntologyError> {
        if child == TOP || child == BOTTOM || parent == BOTTOM {
            return Err(OntologyError::Cycle { child: child.into(), parent: parent.into() });
        }
        if parent != TOP && !self.parents.contains_key(parent) {
            self.parents.insert(parent.to_string(), BTreeSet::from([TOP.to_string()]));
        }
        if child == parent || self.ancestors.get(parent).is_some_and(|a| a.contains(child)) {
            return Err(OntologyError::Cycle { child: child.into(), parent: parent.into() });
        }
        let entry = self.parents.entry(child.to_string()).or_default();
        if parent != TOP {
            entry.remove(TOP);
        }
        entry.insert(parent.to_string());
        self.recompute();
        Ok(())
    }

    fn recompute(&mut self) {
        fn visit(
            ty: &str,
            parents: &BTreeMap<String, BTreeSet<String>>,
            memo: &mut HashMap<String, BTreeSet<String>>,
        ) -> BTreeSet<String> {
            if let Some(done) = memo.get(ty) {
                return done.clone();
            }
            let mut set = BTreeSet::from([ty.to_string()]);
            for p in parents.get(ty).into_iter().flatten() {
                set.extend(visit(p, parents, memo));
            }
            memo.insert(ty.to_string(), set.clone());
            set
        }
        let mut memo = HashMap::new();
        for ty in self.parents.keys() {
            visit(ty, &self.parents, &mut memo);
        }
        self.ancestors = memo;
    }

    /// True iff `b ≤ a`.
    pub fn subsumes(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        for t in [a, b] {
            if !self.contains(t) {
                return Err(OntologyError::UnknownType(t.to_string()));
            }
        }
        Ok(self.leq(b, a))
    }

    /// `b ≤ a`, treating unregistered types as incomparable to everything but themselves.
    pub fn leq(&self, b: &str, a: &str) -> bool {
        if a == b || b == BOTTOM || a == TOP {
            return true;
        }
        self.ancestors.get(b).is_some_and(|anc| anc.contains(a))
    }

    /// The more specific of two comparable types.
    pub fn meet_comparable<'a>(&self, a: &'a str, b: &'a str) -> Option<&'a str> {
        if self.leq(a, b) {
            Some(a)
        } else if self.leq(b, a) {
            Some(b)
        } else {
            None
        }
    }

    pub fn parents_of(&self, ty: &str) -> impl Iterator<Item = &str> {
        self.parents.get(ty).into_iter().flatten().map(String::as_str)
    }
}

/// Defining graphs per concept type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CanonicalBase {
    definitions: BTreeMap<String, ConceptualGraph>,
}

impl CanonicalBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.definitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.definitions.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&ConceptualGraph> {
        self.definitions.get(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ConceptualGraph)> {
        self.definitions.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Type of the individual carrying `marker` in any defining graph.
    pub fn individual_type(&self, marker: u32) -> Option<&str> {
        self.definitions
            .values()
            .flat_map(|g| g.concepts())
            .find(|c| c.referent.marker() == Some(marker))
            .map(|c| c.type_label.as_str())
    }
}

/// Hierarchy plus canonical base, the two halves of the ontology.
#[derive(Clone, Debug, Default)]
pub struct Ontology {
    pub hierarchy: TypeHierarchy,
    pub base: CanonicalBase,
}

/// Stores `definition` as the defining graph of `term`.
pub fn add_definition(
    term: &str,
    definition: ConceptualGraph,
    hierarchy: &mut TypeHierarchy,
    base: &mut CanonicalBase,
    overwrite: bool,
) -> Result<(), OntologyError> {
    definition
        .validate()
        .map_err(|source| OntologyError::InvalidDefinition { term: term.to_string(), source })?;
    if !overwrite && base.definitions.contains_key(term) {
        return Err(OntologyError::DuplicateDefinition(term.to_string()));
    }
    hierarchy.register(term);
    for c in definition.concepts() {
        hierarchy.register(&c.type_label);
    }
    base.definitions.insert(term.to_string(), definition);
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermCandidate {
    pub term: String,
    pub density: f64,
    pub pmi: Option<f64>,
}

/// Sentence-level occurrence statistics over a tokenized corpus.
pub struct CooccurrenceStats {
    sentences: Vec<Vec<String>>,
    doc_freq: HashMap<String, usize>,
}

impl CooccurrenceStats {
    pub fn new(corpus: &[&str]) -> Result<Self, OntologyError> {
        let sentences: Vec<Vec<String>> = corpus
            .iter()
            .filter_map(|s| segment(s, "").ok())
            .map(|toks| toks.into_iter().map(|t| t.surface).collect())
            .collect();
        if sentences.is_empty() {
            return Err(OntologyError::EmptyCorpus);
        }
        let mut doc_freq = HashMap::new();
        for s in &sentences {
            for w in s.iter().collect::<BTreeSet<_>>() {
                *doc_freq.entry(w.clone()).or_insert(0) += 1;
            }
        }
        Ok(CooccurrenceStats { sentences, doc_freq })
    }

    fn n(&self) -> f64 {
        self.sentences.len() as f64
    }

    /// `log2(p(w1,w2) / (p(w1) p(w2)))` with sentence co-occurrence probabilities.
    /// `None` when either word or the pair never occurs.
    pub fn pmi(&self, w1: &str, w2: &str) -> Option<f64> {
        let p1 = *self.doc_freq.get(w1)? as f64 / self.n();
        let p2 = *self.doc_freq.get(w2)? as f64 / self.n();
        let joint = self
            .sentences
            .iter()
            .filter(|s| s.iter().any(|w| w == w1) && s.iter().any(|w| w == w2))
            .count();
        if joint == 0 {
            return None;
        }
        Some((joint as f64 / self.n() / (p1 * p2)).log2())
    }
}

/// Ranks words and adjacent word pairs of `corpus` as candidate domain terms.
///
/// Density is occurrences per sentence. Bigrams additionally carry their PMI.
/// Ordering: density descending, then PMI descending (unigrams last), then term.
pub fn extract_terms(corpus: &[&str]) -> Result<Vec<TermCandidate>, OntologyError> {
    let stats = CooccurrenceStats::new(corpus)?;
    let mut unigrams: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bigrams: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for s in &stats.sentences {
        for w in s {
            *unigrams.entry(w).or_default() += 1;
        }
        for pair in s.windows(2) {
            *bigrams.entry((&pair[0], &pair[1])).or_default() += 1;
        }
    }
    let n = stats.n();
    let mut out: Vec<TermCandidate> = unigrams
        .into_iter()
        .map(|(w, c)| TermCandidate { term: w.to_string(), density: c as f64 / n, pmi: None })
        .collect();
    out.extend(bigrams.into_iter().map(|((a, b), c)| TermCandidate {
        term: format!("{a} {b}"),
        density: c as f64 / n,
        pmi: stats.pmi(a, b),
    }));
    out.sort_by(|x, y| {
        y.density
            .total_cmp(&x.density)
            .then_with(|| match (x.pmi, y.pmi) {
                (Some(a), Some(b)) => b.total_cmp(&a),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
            .then_with(|| x.term.cmp(&y.term))
    });
    Ok(out)
}
