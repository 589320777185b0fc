//! Z-style schemas built from formulas and ontology typing.
//!
//! Construction runs in three steps: declare the typed terms of the
//! formulas, insert individuals that are referenced but typed only in the
//! canonical base, then lower relation atoms to predicate lines.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Formula, Term};
use crate::ontology::{Ontology, TypeHierarchy};
use crate::semantics::{Modality, Mode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalFormula {
    pub formula: Formula,
    pub modality: Modality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub name: String,
    /// Hierarchy type; rendered upper-cased.
    #[serde(rename = "type")]
    pub type_label: String,
}

impl Declaration {
    pub fn z_type(&self) -> String {
        z_identifier(&self.type_label).to_uppercase()
    }
}

impl fmt::Display for Declaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.name, self.z_type())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateLine {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for PredicateLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSchema {
    pub name: String,
    pub signature: Vec<Declaration>,
    pub predicates: Vec<PredicateLine>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZError {
    #[error("no formulas to build a schema from")]
    NoFormulas,
    #[error("variable `{0}` has no type")]
    UntypedVariable(String),
    #[error("individual #{0} is typed neither locally nor in the canonical base")]
    UnknownIndividual(u32),
    #[error("type `{0}` is not in the hierarchy")]
    UnknownType(String),
    #[error("`{0}` is used in the predicate part but not declared")]
    Undeclared(String),
}

fn z_identifier(type_label: &str) -> String {
    type_label.replace('-', "_")
}

/// Identity of a term across the formulas of one schema.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    /// (type, index among same-typed variables of its formula)
    Generic(String, usize),
    Individual(u32),
}

pub fn build_schema(name: &str, formulas: &[ModalFormula], ontology: &Ontology) -> Result<ZSchema, ZError> {
    if formulas.is_empty() {
        return Err(ZError::NoFormulas);
    }
    let h = &ontology.hierarchy;
    let mut signature: Vec<Declaration> = Vec::new();
    let mut names: HashMap<Key, String> = HashMap::new();
    let mut used_names: HashSet<String> = HashSet::new();
    let mut local_keys: Vec<HashMap<Term, Key>> = Vec::new();
    let mut events: Vec<HashSet<Term>> = Vec::new();

    let declare = |key: &Key, ty: &str, suffix: String, signature: &mut Vec<Declaration>,
                       names: &mut HashMap<Key, String>, used: &mut HashSet<String>|
     -> Result<(), ZError> {
        if names.contains_key(key) {
            return Ok(());
        }
        if !h.contains(ty) {
            return Err(ZError::UnknownType(ty.to_string()));
        }
        let base = z_identifier(ty);
        let mut name = base.clone();
        if used.contains(&name) {
            name = format!("{base}{suffix}");
            let mut n = 2;
            while used.contains(&name) {
                name = format!("{base}{suffix}_{n}");
                n += 1;
            }
        }
        used.insert(name.clone());
        names.insert(key.clone(), name.clone());
        signature.push(Declaration { name, type_label: ty.to_string() });
        Ok(())
    };

    // Step 1: typed terms, in order of first appearance.
    for mf in formulas {
        let f = &mf.formula;
        let types: HashMap<&Term, &str> =
            f.unary_atoms().map(|a| (&a.args[0], a.predicate.as_str())).collect();
        let ev = event_terms(f);
        let mut keys: HashMap<Term, Key> = HashMap::new();
        let mut per_type: HashMap<&str, usize> = HashMap::new();
        for term in appearance_order(f) {
            let ty = types.get(term).copied();
            if let Term::Variable(v) = term {
                let ty = ty.ok_or_else(|| ZError::UntypedVariable(v.clone()))?;
                if ev.contains(term) {
                    continue;
                }
                let idx = per_type.entry(ty).or_insert(0);
                *idx += 1;
                let key = Key::Generic(ty.to_string(), *idx);
                declare(&key, ty, idx.to_string(), &mut signature, &mut names, &mut used_names)?;
                keys.insert(term.clone(), key);
            } else if let (Term::Constant(n), Some(ty)) = (term, ty) {
                let key = Key::Individual(*n);
                keys.insert(term.clone(), key.clone());
                if !ev.contains(term) {
                    declare(&key, ty, n.to_string(), &mut signature, &mut names, &mut used_names)?;
                }
            }
        }
        local_keys.push(keys);
        events.push(ev);
    }

    // Step 2: individuals typed only in the canonical base.
    for (mf, keys) in formulas.iter().zip(&mut local_keys) {
        for term in appearance_order(&mf.formula) {
            if let Term::Constant(n) = term {
                if keys.contains_key(term) || names.contains_key(&Key::Individual(*n)) {
                    keys.entry(term.clone()).or_insert(Key::Individual(*n));
                    continue;
                }
                let ty = ontology.base.individual_type(*n).ok_or(ZError::UnknownIndividual(*n))?;
                let key = Key::Individual(*n);
                let base = z_identifier(ty);
                let name = format!("{base}{n}");
                used_names.insert(name.clone());
                names.insert(key.clone(), name.clone());
                signature.push(Declaration { name, type_label: ty.to_string() });
                keys.insert(term.clone(), key);
            }
        }
    }

    // Step 3: relation atoms grouped by event.
    let mut predicates: Vec<PredicateLine> = Vec::new();
    for ((mf, keys), ev) in formulas.iter().zip(&local_keys).zip(&events) {
        let f = &mf.formula;
        let types: HashMap<&Term, &str> =
            f.unary_atoms().map(|a| (&a.args[0], a.predicate.as_str())).collect();
        let name_of = |t: &Term| -> String {
            keys.get(t).and_then(|k| names.get(k)).cloned().unwrap_or_else(|| t.to_string())
        };
        let mut prefix = String::new();
        if mf.modality.negation {
            prefix.push_str("not_");
        }
        if mf.modality.has(Mode::Possibility) {
            prefix.push_str("can_");
        }
        let mut seen_events: Vec<&Term> = Vec::new();
        for atom in f.relation_atoms() {
            let head = &atom.args[0];
            if ev.contains(head) {
                if seen_events.contains(&head) {
                    continue;
                }
                seen_events.push(head);
                let mut roles: Vec<(&str, &[Term])> = f
                    .relation_atoms()
                    .filter(|a| &a.args[0] == head)
                    .map(|a| (a.predicate.as_str(), &a.args[1..]))
                    .collect();
                roles.sort_by_key(|(label, _)| role_rank(label));
                let args = roles.iter().flat_map(|(_, ts)| ts.iter().map(&name_of)).collect();
                let ty = types.get(head).copied().unwrap_or_default();
                predicates.push(PredicateLine { predicate: format!("{prefix}{}", z_identifier(ty)), args });
            } else {
                predicates.push(PredicateLine {
                    predicate: format!("{prefix}{}", atom.predicate),
                    args: atom.args.iter().map(&name_of).collect(),
                });
            }
        }
    }
    let mut unique = Vec::new();
    for p in predicates {
        if !unique.contains(&p) {
            unique.push(p);
        }
    }
    let schema = ZSchema { name: name.to_string(), signature, predicates: unique };
    schema.validate(h)?;
    Ok(schema)
}

fn role_rank(label: &str) -> (u8, &str) {
    match label {
        "AGNT" => (0, ""),
        "OBJ" => (1, ""),
        other => (2, other),
    }
}

fn appearance_order(f: &Formula) -> Vec<&Term> {
    let mut out: Vec<&Term> = Vec::new();
    for t in f.atoms.iter().flat_map(|a| &a.args) {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Terms heading some relation atom and never filling a later position.
fn event_terms(f: &Formula) -> HashSet<Term> {
    let heads: HashSet<&Term> = f.relation_atoms().map(|a| &a.args[0]).collect();
    let later: HashSet<&Term> = f.relation_atoms().flat_map(|a| &a.args[1..]).collect();
    heads.difference(&later).map(|t| (*t).clone()).collect()
}

/// Schema name from its content: the object type, else the first event type,
/// else the first declared type, followed by `Operation`.
pub fn schema_name(formulas: &[ModalFormula]) -> String {
    let typed = |f: &Formula, t: &Term| {
        f.unary_atoms().find(|a| &a.args[0] == t).map(|a| a.predicate.clone())
    };
    let pick = formulas
        .iter()
        .find_map(|mf| {
            let f = &mf.formula;
            f.relation_atoms().find(|a| a.predicate == "OBJ").and_then(|a| typed(f, a.args.last()?))
        })
        .or_else(|| {
            formulas.iter().find_map(|mf| {
                let f = &mf.formula;
                let ev = event_terms(f);
                appearance_order(f).into_iter().find(|t| ev.contains(*t)).and_then(|t| typed(f, t))
            })
        })
        .or_else(|| formulas.iter().find_map(|mf| mf.formula.unary_atoms().next().map(|a| a.predicate.clone())))
        .unwrap_or_else(|| "Empty".into());
    format!("{}Operation", pascal_case(&pick))
}

fn pascal_case(s: &str) -> String {
    s.split(['-', '_', ' '])
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut c = w.chars();
            c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
        })
        .collect()
}

impl ZSchema {
    /// Types are registered and every predicate argument is declared.
    pub fn validate(&self, h: &TypeHierarchy) -> Result<(), ZError> {
        for d in &self.signature {
            if !h.contains(&d.type_label) {
                return Err(ZError::UnknownType(d.type_label.clone()));
            }
        }
        let declared: HashSet<&str> = self.signature.iter().map(|d| d.name.as_str()).collect();
        for p in &self.predicates {
            if let Some(a) = p.args.iter().find(|a| !declared.contains(a.as_str())) {
                return Err(ZError::Undeclared(a.clone()));
            }
        }
        Ok(())
    }

    pub fn render(&self, ascii: bool) -> String {
        let (tl, h, v, mid, bl) = if ascii { ('+', '-', '|', '+', '+') } else { ('┌', '─', '│', '├', '└') };
        let body_lines: Vec<String> = self
            .signature
            .iter()
            .map(Declaration::to_string)
            .chain(self.predicates.iter().map(PredicateLine::to_string))
            .collect();
        let inner = body_lines
            .iter()
            .map(|l| l.chars().count() + 1)
            .chain([self.name.chars().count() + 3])
            .max()
            .unwrap_or(0)
            .max(24);
        let rule = |corner: char| format!("{corner}{}", h.to_string().repeat(inner + 1));
        let mut out = vec![format!(
            "{tl}{h} {} {}",
            self.name,
            h.to_string().repeat(inner - self.name.chars().count() - 2)
        )];
        out.extend(self.signature.iter().map(|d| format!("{v} {d}")));
        if !self.predicates.is_empty() {
            out.push(rule(mid));
            out.extend(self.predicates.iter().map(|p| format!("{v} {p}")));
        }
        out.push(rule(bl));
        out.join("\n") + "\n"
    }
}

/// A specification: schemas as paragraphs separated by blank lines.
pub fn render_specification(schemas: &[ZSchema], ascii: bool) -> String {
    schemas.iter().map(|s| s.render(ascii)).collect::<Vec<_>>().join("\n")
}

/// Makes `name` unique against `taken` by appending 2, 3, ...
pub fn unique_name(name: &str, taken: &BTreeMap<String, usize>) -> String {
    if !taken.contains_key(name) {
        return name.to_string();
    }
    (2..).map(|n| format!("{name}{n}")).find(|c| !taken.contains_key(c)).expect("unbounded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{FIXTURE_BASE, FIXTURE_HIERARCHY};

    fn ontology() -> Ontology {
        let mut o = Ontology { hierarchy: TypeHierarchy::parse(FIXTURE_HIERARCHY).unwrap(), ..Default::default() };
        for (term, text) in FIXTURE_BASE {
            let g = crate::cg::ConceptualGraph::parse_linear(text).unwrap();
            crate::ontology::add_definition(term, g, &mut o.hierarchy, &mut o.base, false).unwrap();
        }
        o
    }

    fn possible(text: &str) -> ModalFormula {
        ModalFormula {
            formula: Formula::parse(text).unwrap(),
            modality: Modality { mode: vec![Mode::Obligation, Mode::Possibility], ..Default::default() },
        }
    }

    fn door_formulas() -> Vec<ModalFormula> {
        vec![
            possible("∃x ∃y, open(x) ∧ AGNT(x, y) ∧ driver(y) ∧ OBJ(x, #1) ∧ door(#1)"),
            possible("∃x ∃y, close(x) ∧ AGNT(x, y) ∧ driver(y) ∧ OBJ(x, #1) ∧ door(#1)"),
        ]
    }

    #[test]
    fn door_operation() {
        let fs = door_formulas();
        assert_eq!(schema_name(&fs), "DoorOperation");
        let s = build_schema("DoorOperation", &fs, &ontology()).unwrap();
        let sig: Vec<String> = s.signature.iter().map(|d| d.to_string()).collect();
        assert_eq!(sig, ["driver : DRIVER", "door : DOOR"]);
        let preds: Vec<String> = s.predicates.iter().map(|p| p.to_string()).collect();
        assert_eq!(preds, ["can_open(driver, door)", "can_close(driver, door)"]);
        assert_eq!(
            s.render(false),
            "┌─ DoorOperation ─────────\n\
             │ driver : DRIVER\n\
             │ door : DOOR\n\
             ├─────────────────────────\n\
             │ can_open(driver, door)\n\
             │ can_close(driver, door)\n\
             └─────────────────────────\n"
        );
    }

    #[test]
    fn lone_concept_has_no_predicate_part() {
        let f = ModalFormula { formula: Formula::parse("∃x, access(x)").unwrap(), modality: Modality::default() };
        let s = build_schema("AccessOperation", &[f], &ontology()).unwrap();
        assert_eq!(s.signature, [Declaration { name: "access".into(), type_label: "access".into() }]);
        assert!(s.predicates.is_empty());
        assert_eq!(s.render(true), "+- AccessOperation -------\n| access : ACCESS\n+-------------------------\n");
    }

    #[test]
    fn base_individual_is_inserted() {
        let f = ModalFormula {
            formula: Formula::parse("∃x ∃y, open(x) ∧ AGNT(x, y) ∧ driver(y) ∧ OBJ(x, #1)").unwrap(),
            modality: Modality { mode: vec![Mode::Obligation], ..Default::default() },
        };
        let s = build_schema("S", &[f], &ontology()).unwrap();
        assert_eq!(s.signature[1].to_string(), "door1 : DOOR");
        assert_eq!(s.predicates[0].to_string(), "open(driver, door1)");
    }

    #[test]
    fn errors() {
        let o = ontology();
        assert_eq!(build_schema("S", &[], &o), Err(ZError::NoFormulas));
        let untyped = ModalFormula {
            formula: Formula { vars: vec!["x".into()], atoms: vec![crate::logic::Atom { predicate: "R".into(), args: vec![Term::Variable("x".into()), Term::Constant(1)] }] },
            modality: Modality::default(),
        };
        assert_eq!(build_schema("S", &[untyped], &o), Err(ZError::UntypedVariable("x".into())));
        let unknown = ModalFormula { formula: Formula::parse("∃x, open(x) ∧ OBJ(x, #99)").unwrap(), modality: Modality::default() };
        assert_eq!(build_schema("S", &[unknown], &o), Err(ZError::UnknownIndividual(99)));
        let gizmo = ModalFormula { formula: Formula::parse("gizmo(#1)").unwrap(), modality: Modality::default() };
        assert_eq!(build_schema("S", &[gizmo], &o), Err(ZError::UnknownType("gizmo".into())));
    }

    #[test]
    fn role_order_and_collisions() {
        let f = ModalFormula {
            formula: Formula::parse("∃x ∃y, rotate(x) ∧ LOC(x, #3) ∧ OBJ(x, #2) ∧ AGNT(x, y) ∧ pin(y) ∧ door(#2) ∧ door(#3)").unwrap(),
            modality: Modality { negation: true, ..Default::default() },
        };
        let s = build_schema("S", &[f], &ontology()).unwrap();
        assert_eq!(s.predicates[0].to_string(), "not_rotate(pin, door2, door)");
    }

    #[test]
    fn json_round_trip_and_injective_render() {
        let a = build_schema("DoorOperation", &door_formulas(), &ontology()).unwrap();
        let back: ZSchema = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        let b = build_schema("DoorOperation", &door_formulas()[..1], &ontology()).unwrap();
        assert_ne!(a.render(false), b.render(false));
        assert_eq!(render_specification(&[a.clone(), b], false).matches("\n\n").count(), 1);
    }

    #[test]
    fn unique_names() {
        let taken = BTreeMap::from([("DoorOperation".to_string(), 0), ("DoorOperation2".to_string(), 1)]);
        assert_eq!(unique_name("DoorOperation", &taken), "DoorOperation3");
        assert_eq!(unique_name("PinOperation", &taken), "PinOperation");
    }
}
