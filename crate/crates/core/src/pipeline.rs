//! The staged compilation of one requirement sentence, and the resource
//! bundle every stage reads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cadlink::{BomNode, Bindings, CadError};
use crate::cg::{build_cg, Allocator, CgError, ConceptualGraph};
use crate::lexicon::{is_interrogative, lemmatize, segment, Lexicon, LexiconError, Token};
use crate::logic::{phi, Formula};
use crate::network::{AntonymSyntaxError, AntonymTable};
use crate::ontology::{add_definition, Ontology, OntologyError, TypeHierarchy};
use crate::resources;
use crate::semantics::{assign_roles, Proposition, RoleTable, SemanticsError};
use crate::syntax::{derive_fstructure, load_grammar, parse, CStructure, FStructure, FValue, Feature, GrammarRule, GrammarSyntaxError, ParseError};
use crate::zspec::ModalFormula;

/// Resource files as text, keyed like the files of a project directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceTexts {
    pub lexicon: String,
    pub grammar: String,
    pub hierarchy: String,
    pub prepositions: String,
    pub antonyms: String,
    /// `(type, linear form)` canonical definitions.
    pub base: Vec<(String, String)>,
    pub bom: Option<String>,
    pub bindings: Option<String>,
}

impl ResourceTexts {
    pub fn fixture() -> Self {
        ResourceTexts {
            lexicon: resources::FIXTURE_LEXICON.into(),
            grammar: resources::FIXTURE_GRAMMAR.into(),
            hierarchy: resources::FIXTURE_HIERARCHY.into(),
            prepositions: resources::FIXTURE_PREPOSITIONS.into(),
            antonyms: resources::FIXTURE_ANTONYMS.into(),
            base: resources::FIXTURE_BASE.iter().map(|(t, g)| (t.to_string(), g.to_string())).collect(),
            bom: Some(resources::FIXTURE_BOM.into()),
            bindings: Some(resources::FIXTURE_BINDINGS.into()),
        }
    }

    pub fn compile(&self) -> Result<Resources, ResourceError> {
        let mut ontology = Ontology { hierarchy: TypeHierarchy::parse(&self.hierarchy)?, ..Default::default() };
        for (term, text) in &self.base {
            let g = ConceptualGraph::parse_linear(text).map_err(|e| ResourceError::Base(term.clone(), e))?;
            add_definition(term, g, &mut ontology.hierarchy, &mut ontology.base, false)?;
        }
        Ok(Resources {
            lexicon: Lexicon::parse(&self.lexicon)?,
            grammar: load_grammar(&self.grammar)?,
            ontology,
            roles: RoleTable::parse(&self.prepositions)?,
            antonyms: AntonymTable::parse(&self.antonyms)?,
            bom: self.bom.as_deref().map(BomNode::from_json).transpose()?,
            bindings: self.bindings.as_deref().map(Bindings::parse).transpose()?.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Grammar(#[from] GrammarSyntaxError),
    #[error("ontology: {0}")]
    Ontology(#[from] OntologyError),
    #[error("canonical base `{0}`: {1}")]
    Base(String, CgError),
    #[error("prepositions: {0}")]
    Roles(#[from] SemanticsError),
    #[error(transparent)]
    Antonyms(#[from] AntonymSyntaxError),
    #[error("cad: {0}")]
    Cad(#[from] CadError),
}

/// Parsed resources shared by every stage.
#[derive(Clone, Debug)]
pub struct Resources {
    pub lexicon: Lexicon,
    pub grammar: Vec<GrammarRule>,
    pub ontology: Ontology,
    pub roles: RoleTable,
    pub antonyms: AntonymTable,
    pub bom: Option<BomNode>,
    pub bindings: Bindings,
}

impl Resources {
    pub fn fixture() -> Self {
        ResourceTexts::fixture().compile().expect("fixture resources are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Lexicon,
    Syntax,
    Fstructure,
    Semantics,
    Cg,
    Logic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub stage: Stage,
    pub severity: Severity,
    pub message: String,
    /// Token range `[start, end)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<(usize, usize)>,
}

/// Every stage artifact of one requirement. Stages after a failure are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub tokens: Vec<Token>,
    pub lemmas: Vec<String>,
    pub parse: Option<CStructure>,
    pub parse_count: usize,
    pub fstructure: Option<FStructure>,
    pub propositions: Vec<Proposition>,
    pub graphs: Vec<ConceptualGraph>,
    pub linear: Vec<String>,
    pub formulas: Vec<Formula>,
    pub rendered: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    /// Formulas paired with the modality of their proposition.
    pub fn modal_formulas(&self) -> Vec<ModalFormula> {
        self.formulas
            .iter()
            .zip(&self.propositions)
            .map(|(f, p)| ModalFormula { formula: f.clone(), modality: p.modality.clone() })
            .collect()
    }

    fn diag(&mut self, stage: Stage, severity: Severity, message: String, span: Option<(usize, usize)>) {
        self.diagnostics.push(Diagnostic { stage, severity, message, span });
    }
}

/// Runs segmentation through Φ. Diagnostics are collected rather than
/// returned as errors; the chain stops at the first failing stage.
pub fn analyze(text: &str, sentence_id: &str, res: &Resources, alloc: &mut Allocator) -> Analysis {
    let mut a = Analysis::default();
    alloc.start_sentence();
    a.tokens = match segment(text, sentence_id) {
        Ok(t) => t,
        Err(e) => {
            a.diag(Stage::Lexicon, Severity::Error, e.to_string(), None);
            return a;
        }
    };
    a.lemmas = a.tokens.iter().map(|t| lemmatize(t, &res.lexicon)).collect();
    let unknown: Vec<usize> = (0..a.lemmas.len()).filter(|&i| !res.lexicon.contains(&a.lemmas[i])).collect();
    for i in unknown {
        let msg = format!("`{}` is not in the lexicon; typed UNKNOWN", a.tokens[i].surface);
        a.diag(Stage::Lexicon, Severity::Error, msg, Some((i, i + 1)));
    }

    let trees = match parse(&a.tokens, &res.lexicon, &res.grammar) {
        Ok(t) => t,
        Err(e) => {
            let span = match e {
                ParseError::NoParse { reached } => Some((reached, a.tokens.len())),
                _ => None,
            };
            a.diag(Stage::Syntax, Severity::Error, e.to_string(), span);
            return a;
        }
    };
    a.parse_count = trees.len();
    if trees.len() > 1 {
        let msg = format!("{} parses; using the first", trees.len());
        a.diag(Stage::Syntax, Severity::Warning, msg, Some((0, a.tokens.len())));
    }
    let tree = trees.into_iter().next().expect("parse returns at least one tree");

    let f = derive_fstructure(&tree);
    a.parse = Some(tree);
    let mut f = match f {
        Ok(f) => f,
        Err(e) => {
            a.diag(Stage::Fstructure, Severity::Error, e.to_string(), None);
            return a;
        }
    };
    if is_interrogative(text) {
        f.features.insert(Feature::Q, FValue::Atom("+".into()));
    }
    let props = assign_roles(&f, &res.lexicon, &res.roles, sentence_id);
    a.fstructure = Some(f);
    a.propositions = match props {
        Ok(p) => p,
        Err(e) => {
            a.diag(Stage::Semantics, Severity::Error, e.to_string(), None);
            return a;
        }
    };
    let mut notes = Vec::new();
    for p in &a.propositions {
        if !p.unsatisfied_roles.is_empty() {
            let roles: Vec<&str> = p.unsatisfied_roles.iter().map(|r| r.as_str()).collect();
            notes.push(format!("`{}` lacks required roles {}", p.predicate, roles.join(", ")));
        }
        for u in &p.unattached {
            notes.push(format!("`{}`: no role for {u}", p.predicate));
        }
    }
    for n in notes {
        a.diag(Stage::Semantics, Severity::Error, n, None);
    }

    for i in 0..a.propositions.len() {
        let g = build_cg(&a.propositions[i], alloc);
        if let Err(e) = g.validate_types(&res.ontology.hierarchy) {
            a.diag(Stage::Cg, Severity::Warning, e.to_string(), None);
        }
        a.linear.push(g.to_linear());
        let f = phi(&g);
        a.rendered.push(f.render(false));
        a.formulas.push(f);
        a.graphs.push(g);
    }
    a
}
