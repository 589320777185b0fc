//! JSON bodies of the HTTP API.

use reqcad_core::cg::ConceptualGraph;
use reqcad_core::network::{Conflict, NetworkExport};
use reqcad_core::pipeline::{Diagnostic, ResourceTexts};
use reqcad_core::project::{Project, Requirement};
use reqcad_core::semantics::Proposition;
use reqcad_core::syntax::FStructure;
use reqcad_core::zspec::ZSchema;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateProject {
    pub name: String,
    /// Resource file texts; the car-door fixture when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resources: Option<ResourceTexts>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddRequirement {
    pub text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Partial,
    Removed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementSummary {
    pub id: String,
    pub text: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectView {
    pub id: String,
    pub name: String,
    pub requirements: Vec<RequirementSummary>,
    pub nodes: usize,
    pub relations: usize,
    pub conflicts: usize,
}

/// Every stage artifact of one requirement, with rendered texts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementView {
    pub id: String,
    pub text: String,
    pub status: Status,
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
    pub parse: Option<String>,
    pub parse_count: usize,
    pub fstructure: Option<FStructure>,
    pub propositions: Vec<Proposition>,
    pub graphs: Vec<ConceptualGraph>,
    pub linear: Vec<String>,
    pub fol: Vec<String>,
    pub schema: Option<ZSchema>,
    pub z: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddResponse {
    pub requirement: RequirementView,
    pub network: NetworkExport,
    pub new_conflicts: Vec<Conflict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub error: String,
}

fn status(r: &Requirement) -> Status {
    if r.removed {
        Status::Removed
    } else if r.analysis.has_errors() {
        Status::Partial
    } else {
        Status::Ok
    }
}

impl ProjectView {
    pub fn of(p: &Project) -> Self {
        ProjectView {
            id: p.meta.id.clone(),
            name: p.meta.name.clone(),
            requirements: p
                .requirements()
                .iter()
                .map(|r| RequirementSummary { id: r.id.clone(), text: r.text.clone(), status: status(r) })
                .collect(),
            nodes: p.network().merged.concepts().len(),
            relations: p.network().merged.relations().len(),
            conflicts: p.conflicts().len(),
        }
    }
}

impl RequirementView {
    pub fn of(r: &Requirement) -> Self {
        let a = &r.analysis;
        RequirementView {
            id: r.id.clone(),
            text: r.text.clone(),
            status: status(r),
            tokens: a.tokens.iter().map(|t| t.surface.clone()).collect(),
            lemmas: a.lemmas.clone(),
            parse: a.parse.as_ref().map(|t| t.to_string()),
            parse_count: a.parse_count,
            fstructure: a.fstructure.clone(),
            propositions: a.propositions.clone(),
            graphs: a.graphs.clone(),
            linear: a.linear.clone(),
            fol: a.rendered.clone(),
            schema: r.schema.clone(),
            z: r.schema.as_ref().map(|s| s.render(false)),
            diagnostics: a.diagnostics.clone(),
        }
    }
}
