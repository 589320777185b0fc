//! On-disk projects: resources, an append-only requirement log, and every
//! derived artifact recomputed from the active requirements.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cadlink::{emit_check_rules, render_rules, CadError, CheckRule};
use crate::cg::Allocator;
use crate::network::{build_network, level1, Conflict, SemanticNetwork};
use crate::pipeline::{analyze, Analysis, ResourceError, ResourceTexts, Resources};
use crate::zspec::{build_schema, render_specification, schema_name, unique_name, ZError, ZSchema};

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("`{0}` is not a project directory")]
    NotAProject(PathBuf),
    #[error("`{0}` already holds a project")]
    AlreadyExists(PathBuf),
    #[error("no requirement `{0}`")]
    UnknownRequirement(String),
    #[error("requirement `{0}` was already removed")]
    AlreadyRemoved(String),
    #[error("nothing to export as {0}")]
    NothingToExport(ExportKind),
    #[error("unknown export kind `{0}`")]
    UnknownExportKind(String),
    #[error(transparent)]
    Cad(#[from] CadError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectMeta {
    pub id: String,
    pub name: String,
    pub next_requirement: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub text: String,
    pub removed: bool,
    pub analysis: Analysis,
    pub schema: Option<ZSchema>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportKind {
    Cg,
    Fol,
    Z,
    Bom,
    Rules,
    Network,
}

impl ExportKind {
    pub const ALL: [ExportKind; 6] =
        [ExportKind::Cg, ExportKind::Fol, ExportKind::Z, ExportKind::Bom, ExportKind::Rules, ExportKind::Network];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportKind::Cg => "cg",
            ExportKind::Fol => "fol",
            ExportKind::Z => "z",
            ExportKind::Bom => "bom",
            ExportKind::Rules => "rules",
            ExportKind::Network => "network",
        }
    }
}

impl std::fmt::Display for ExportKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExportKind {
    type Err = ProjectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExportKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ProjectError::UnknownExportKind(s.to_string()))
    }
}

/// Result of adding one requirement.
#[derive(Clone, Debug)]
pub struct Added {
    pub requirement: Requirement,
    pub new_conflicts: Vec<Conflict>,
}

#[derive(Debug)]
pub struct Project {
    root: PathBuf,
    pub meta: ProjectMeta,
    texts: ResourceTexts,
    resources: Resources,
    requirements: Vec<Requirement>,
    network: SemanticNetwork,
}

const META: &str = "project.json";
const RESOURCES: &str = "resources";
const REQUIREMENTS: &str = "requirements";

impl Project {
    /// Creates a project directory. `root` must be absent or empty.
    pub fn create(root: &Path, id: &str, name: &str, texts: ResourceTexts) -> Result<Project, ProjectError> {
        if root.join(META).exists() {
            return Err(ProjectError::AlreadyExists(root.to_path_buf()));
        }
        let resources = texts.compile()?;
        fs::create_dir_all(root.join(REQUIREMENTS))?;
        write_resources(&root.join(RESOURCES), &texts)?;
        let meta = ProjectMeta { id: id.to_string(), name: name.to_string(), next_requirement: 1 };
        write_json(&root.join(META), &meta)?;
        Ok(Project {
            root: root.to_path_buf(),
            meta,
            texts,
            resources,
            requirements: Vec::new(),
            network: SemanticNetwork::default(),
        })
    }

    pub fn open(root: &Path) -> Result<Project, ProjectError> {
        let meta_path = root.join(META);
        if !meta_path.is_file() {
            return Err(ProjectError::NotAProject(root.to_path_buf()));
        }
        let meta: ProjectMeta = read_json(&meta_path)?;
        let texts = read_resources(&root.join(RESOURCES))?;
        let resources = texts.compile()?;
        let mut requirements: Vec<Requirement> = Vec::new();
        for entry in fs::read_dir(root.join(REQUIREMENTS))? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                requirements.push(read_json(&path)?);
            }
        }
        requirements.sort_by_key(|r| requirement_number(&r.id));
        let mut p = Project { root: root.to_path_buf(), meta, texts, resources, requirements, network: SemanticNetwork::default() };
        p.recompute();
        Ok(p)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn texts(&self) -> &ResourceTexts {
        &self.texts
    }

    /// All requirements including removed ones, in log order.
    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn active(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.iter().filter(|r| !r.removed)
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.requirements.iter().find(|r| r.id == id)
    }

    pub fn network(&self) -> &SemanticNetwork {
        &self.network
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.network.conflicts
    }

    pub fn schemas(&self) -> Vec<ZSchema> {
        self.active().filter_map(|r| r.schema.clone()).collect()
    }

    pub fn add_requirement(&mut self, text: &str) -> Result<Added, ProjectError> {
        let id = format!("R{}", self.meta.next_requirement);
        let before: Vec<ConflictKey> = self.conflicts().iter().map(ConflictKey::of).collect();
        self.requirements.push(Requirement {
            id: id.clone(),
            text: text.to_string(),
            removed: false,
            analysis: Analysis::default(),
            schema: None,
        });
        self.meta.next_requirement += 1;
        self.recompute();
        self.persist()?;
        let new_conflicts = self
            .conflicts()
            .iter()
            .filter(|c| !before.contains(&ConflictKey::of(c)))
            .cloned()
            .collect();
        let requirement = self.requirement(&id).cloned().expect("just added");
        Ok(Added { requirement, new_conflicts })
    }

    /// Marks a requirement removed; its file stays as a tombstone.
    pub fn remove_requirement(&mut self, id: &str) -> Result<(), ProjectError> {
        let r = self
            .requirements
            .iter_mut()
            .find(|r| r.id == id)
            .ok_or_else(|| ProjectError::UnknownRequirement(id.to_string()))?;
        if r.removed {
            return Err(ProjectError::AlreadyRemoved(id.to_string()));
        }
        r.removed = true;
        self.recompute();
        self.persist()
    }

    /// Reanalyses every active requirement with a fresh allocator and rebuilds
    /// schemas and the network.
    pub fn recompute(&mut self) {
        let mut alloc = Allocator::new();
        let mut taken: BTreeMap<String, usize> = BTreeMap::new();
        for r in &mut self.requirements {
            if r.removed {
                r.analysis = Analysis::default();
                r.schema = None;
                continue;
            }
            r.analysis = analyze(&r.text, &r.id, &self.resources, &mut alloc);
            r.schema = requirement_schema(&r.analysis, &self.resources, &mut taken).ok();
        }
        let per_requirement: Vec<(String, Vec<_>)> =
            self.active().map(|r| (r.id.clone(), r.analysis.graphs.clone())).collect();
        let graphs = level1(&per_requirement);
        self.network = build_network(&graphs, &self.resources.ontology.hierarchy, &self.resources.antonyms);
    }

    pub fn check_rules(&self) -> Result<Vec<CheckRule>, ProjectError> {
        let bom = self.resources.bom.as_ref().ok_or(ProjectError::NothingToExport(ExportKind::Bom))?;
        Ok(emit_check_rules(&self.schemas(), bom, &self.resources.bindings)?)
    }

    pub fn export(&self, kind: ExportKind, ascii: bool) -> Result<String, ProjectError> {
        let nothing = || ProjectError::NothingToExport(kind);
        let out = match kind {
            ExportKind::Cg => {
                let mut out = String::new();
                for r in self.active().filter(|r| !r.analysis.linear.is_empty()) {
                    out.push_str(&format!("# {} {}\n", r.id, r.text));
                    for l in &r.analysis.linear {
                        out.push_str(l);
                        out.push('\n');
                    }
                }
                out
            }
            ExportKind::Fol => {
                let mut out = String::new();
                for r in self.active().filter(|r| !r.analysis.formulas.is_empty()) {
                    out.push_str(&format!("# {} {}\n", r.id, r.text));
                    for f in &r.analysis.formulas {
                        out.push_str(&f.render(ascii));
                        out.push('\n');
                    }
                }
                out
            }
            ExportKind::Z => render_specification(&self.schemas(), ascii),
            ExportKind::Bom => self.resources.bom.as_ref().ok_or_else(nothing)?.to_json(),
            ExportKind::Rules => {
                let rules = self.check_rules()?;
                if rules.is_empty() {
                    String::new()
                } else {
                    render_rules(&rules)
                }
            }
            ExportKind::Network => self.network.to_json(),
        };
        if out.is_empty() {
            return Err(nothing());
        }
        Ok(out)
    }

    fn persist(&self) -> Result<(), ProjectError> {
        let dir = self.root.join(REQUIREMENTS);
        for r in &self.requirements {
            write_json(&dir.join(format!("{}.json", r.id)), r)?;
        }
        write_json(&self.root.join(META), &self.meta)
    }
}

/// One schema per requirement, named from its content and made unique.
pub fn requirement_schema(
    analysis: &Analysis,
    res: &Resources,
    taken: &mut BTreeMap<String, usize>,
) -> Result<ZSchema, ZError> {
    let formulas = analysis.modal_formulas();
    let name = unique_name(&schema_name(&formulas), taken);
    let schema = build_schema(&name, &formulas, &res.ontology)?;
    taken.insert(name, 1);
    Ok(schema)
}

#[derive(PartialEq)]
struct ConflictKey(String, String, Vec<String>, crate::network::ConflictKind);

impl ConflictKey {
    fn of(c: &Conflict) -> Self {
        ConflictKey(c.action_a.clone(), c.action_b.clone(), c.shared.clone(), c.kind)
    }
}

fn requirement_number(id: &str) -> u32 {
    id.trim_start_matches('R').parse().unwrap_or(u32::MAX)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ProjectError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| ProjectError::Json { path: path.to_path_buf(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ProjectError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_atomic(path, text.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ProjectError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

type Getter = fn(&ResourceTexts) -> Option<&str>;

const FILES: [(&str, Getter); 7] = [
    ("lexicon.tsv", |t| Some(&t.lexicon)),
    ("grammar.cfg", |t| Some(&t.grammar)),
    ("hierarchy.txt", |t| Some(&t.hierarchy)),
    ("prepositions.tsv", |t| Some(&t.prepositions)),
    ("antonyms.txt", |t| Some(&t.antonyms)),
    ("bom.json", |t| t.bom.as_deref()),
    ("bindings.tsv", |t| t.bindings.as_deref()),
];

fn write_resources(dir: &Path, texts: &ResourceTexts) -> Result<(), ProjectError> {
    fs::create_dir_all(dir.join("base"))?;
    for (file, get) in FILES {
        if let Some(text) = get(texts) {
            write_atomic(&dir.join(file), text.as_bytes())?;
        }
    }
    for (term, text) in &texts.base {
        write_atomic(&dir.join("base").join(format!("{term}.cg")), text.as_bytes())?;
    }
    Ok(())
}

/// Reads a resource directory laid out as a project's `resources/`.
pub fn read_resources(dir: &Path) -> Result<ResourceTexts, ProjectError> {
    let required = |f: &str| fs::read_to_string(dir.join(f));
    let optional = |f: &str| -> io::Result<Option<String>> {
        match fs::read_to_string(dir.join(f)) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut base = Vec::new();
    let base_dir = dir.join("base");
    if base_dir.is_dir() {
        for entry in fs::read_dir(&base_dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "cg") {
                let term = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                base.push((term, fs::read_to_string(&path)?));
            }
        }
    }
    base.sort();
    Ok(ResourceTexts {
        lexicon: required("lexicon.tsv")?,
        grammar: required("grammar.cfg")?,
        hierarchy: required("hierarchy.txt")?,
        prepositions: required("prepositions.tsv")?,
        antonyms: optional("antonyms.txt")?.unwrap_or_default(),
        base,
        bom: optional("bom.json")?,
        bindings: optional("bindings.tsv")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::FIXTURE_REQUIREMENTS;

    fn fixture_project(dir: &Path) -> Project {
        Project::create(dir, "p1", "hinge", ResourceTexts::fixture()).unwrap()
    }

    #[test]
    fn add_persist_reopen() {
        let tmp = tempfile::tempdir().unwrap();
        let mut p = fixture_project(tmp.path());
        for r in FIXTURE_REQUIREMENTS {
            let added = p.add_requirement(r).unwrap();
            assert!(!added.requirement.analysis.has_errors(), "{r}: {:?}", added.requirement.analysis.diagnostics);
        }
        let q = Project::open(tmp.path()).unwrap();
        assert_eq!(q.requirements(), p.requirements());
        assert_eq!(q.network(), p.network());
        assert_eq!(q.meta.next_requirement, 4);
    }

    #[test]
    fn conflicts_reported_once() {
        let tmp = tempfile::tempdir().unwrap();
        let mut p = fixture_project(tmp.path());
        let a = p.add_requirement(FIXTURE_REQUIREMENTS[0]).unwrap();
        assert!(a.new_conflicts.is_empty());
        let b = p.add_requirement(FIXTURE_REQUIREMENTS[1]).unwrap();
        assert_eq!(b.new_conflicts.len(), 1);
        assert_eq!(b.new_conflicts[0].shared, ["body", "door"]);
        let c = p.add_requirement(FIXTURE_REQUIREMENTS[2]).unwrap();
        assert_eq!(c.new_conflicts.len(), 1);
        assert_eq!(c.new_conflicts[0].shared, ["door", "driver"]);
        assert_eq!(p.conflicts().len(), 2);
    }

    #[test]
    fn removal_is_a_tombstone() {
        let tmp = tempfile::tempdir().unwrap();
        let mut p = fixture_project(tmp.path());
        p.add_requirement(FIXTURE_REQUIREMENTS[0]).unwrap();
        p.add_requirement(FIXTURE_REQUIREMENTS[1]).unwrap();
        p.remove_requirement("R2").unwrap();
        assert!(p.conflicts().is_empty());
        assert!(matches!(p.remove_requirement("R2"), Err(ProjectError::AlreadyRemoved(_))));
        assert!(matches!(p.remove_requirement("R9"), Err(ProjectError::UnknownRequirement(_))));
        let r = p.add_requirement(FIXTURE_REQUIREMENTS[2]).unwrap();
        assert_eq!(r.requirement.id, "R3");
        let q = Project::open(tmp.path()).unwrap();
        assert!(q.requirement("R2").unwrap().removed);
        assert_eq!(q.active().count(), 2);
    }

    #[test]
    fn exports() {
        let tmp = tempfile::tempdir().unwrap();
        let mut p = fixture_project(tmp.path());
        for k in [ExportKind::Cg, ExportKind::Fol, ExportKind::Z, ExportKind::Rules] {
            assert!(matches!(p.export(k, false), Err(ProjectError::NothingToExport(_))), "{k}");
        }
        p.add_requirement(FIXTURE_REQUIREMENTS[2]).unwrap();
        let cg = p.export(ExportKind::Cg, false).unwrap();
        assert!(cg.starts_with("# R1 A driver must be able to open and close the door\n[open:*x]"));
        let z = p.export(ExportKind::Z, true).unwrap();
        assert!(z.contains("can_open(driver, door)"));
        let rules = p.export(ExportKind::Rules, false).unwrap();
        assert!(rules.contains("IF hinge.can_close == true"));
        assert!(p.export(ExportKind::Bom, false).unwrap().contains("\"hinge\""));
        assert_eq!("network".parse::<ExportKind>().unwrap(), ExportKind::Network);
        assert!("pdf".parse::<ExportKind>().is_err());
    }

    #[test]
    fn create_refuses_existing_project() {
        let tmp = tempfile::tempdir().unwrap();
        fixture_project(tmp.path());
        assert!(matches!(
            Project::create(tmp.path(), "p2", "x", ResourceTexts::fixture()),
            Err(ProjectError::AlreadyExists(_))
        ));
        assert!(matches!(Project::open(&tmp.path().join("nope")), Err(ProjectError::NotAProject(_))));
    }
}
