//! The Φ translation of conceptual graphs into conjunctive, existentially
//! quantified first-order formulas.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cg::{variable_name, ConceptualGraph, Node, NodeId, Referent};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Term {
    Variable(String),
    Constant(u32),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => f.write_str(v),
            Term::Constant(n) => write!(f, "#{n}"),
        }
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Term {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        parse_term(&s)
    }
}

fn parse_term(s: &str) -> Result<Term, String> {
    if let Some(n) = s.strip_prefix('#') {
        return n.parse().map(Term::Constant).map_err(|_| format!("bad constant `{s}`"));
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() && chars.all(|c| c.is_ascii_alphanumeric()) => {
            Ok(Term::Variable(s.to_string()))
        }
        _ => Err(format!("bad term `{s}`")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub vars: Vec<String>,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable `{0}` is quantified twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` is free")]
    FreeVariable(String),
    #[error("variable `{0}` is quantified but unused")]
    UnusedVariable(String),
    #[error("cannot parse formula at `{0}`")]
    Syntax(String),
}

impl Formula {
    pub fn validate(&self) -> Result<(), FormulaError> {
        let mut declared = BTreeSet::new();
        for v in &self.vars {
            if !declared.insert(v.as_str()) {
                return Err(FormulaError::DuplicateVariable(v.clone()));
            }
        }
        let mut used = BTreeSet::new();
        for t in self.atoms.iter().flat_map(|a| &a.args) {
            if let Term::Variable(v) = t {
                if !declared.contains(v.as_str()) {
                    return Err(FormulaError::FreeVariable(v.clone()));
                }
                used.insert(v.as_str());
            }
        }
        match declared.difference(&used).next() {
            Some(v) => Err(FormulaError::UnusedVariable(v.to_string())),
            None => Ok(()),
        }
    }

    /// `∃x ∃y, a ∧ b`, or `exists x exists y, a & b` in ASCII mode.
    pub fn render(&self, ascii: bool) -> String {
        if self.atoms.is_empty() {
            return "true".into();
        }
        let (exists, and) = if ascii { ("exists ", " & ") } else { ("∃", " ∧ ") };
        let body = self.atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(and);
        if self.vars.is_empty() {
            return body;
        }
        let prefix = self.vars.iter().map(|v| format!("{exists}{v}")).collect::<Vec<_>>().join(" ");
        format!("{prefix}, {body}")
    }

    /// Parses either rendering.
    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        let text = text.trim();
        if text == "true" {
            return Ok(Formula::default());
        }
        let mut vars = Vec::new();
        let mut rest = text;
        loop {
            let stripped = rest.strip_prefix('∃').or_else(|| rest.strip_prefix("exists "));
            let Some(after) = stripped else { break };
            let after = after.trim_start();
            let end = after.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(after.len());
            let name = &after[..end];
            match parse_term(name) {
                Ok(Term::Variable(v)) => vars.push(v),
                _ => return Err(FormulaError::Syntax(after.to_string())),
            }
            rest = after[end..].trim_start();
        }
        if !vars.is_empty() {
            rest = rest.strip_prefix(',').ok_or_else(|| FormulaError::Syntax(rest.to_string()))?.trim_start();
        }
        let mut atoms = Vec::new();
        for part in rest.split(['∧', '&']) {
            let part = part.trim();
            let syntax = || FormulaError::Syntax(part.to_string());
            let (pred, args) = part.split_once('(').ok_or_else(syntax)?;
            let args = args.strip_suffix(')').ok_or_else(syntax)?;
            let pred = pred.trim();
            if pred.is_empty() || pred.contains(char::is_whitespace) {
                return Err(syntax());
            }
            let args = args
                .split(',')
                .map(|a| parse_term(a.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| syntax())?;
            atoms.push(Atom { predicate: pred.to_string(), args });
        }
        let f = Formula { vars, atoms };
        f.validate()?;
        Ok(f)
    }

    pub fn unary_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.args.len() == 1)
    }

    pub fn relation_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.args.len() >= 2)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// Φ: generic concepts become existential variables named in concept order,
/// individuals become constants, and atoms follow canonical node order.
pub fn phi(g: &ConceptualGraph) -> Formula {
    let mut terms: HashMap<NodeId, Term> = HashMap::new();
    let mut vars = Vec::new();
    for c in g.concepts() {
        let term = match c.referent {
            Referent::Generic => {
                let v = variable_name(vars.len());
                vars.push(v.clone());
                Term::Variable(v)
            }
            Referent::Individual(n) => Term::Constant(n),
        };
        terms.insert(c.id, term);
    }
    let atoms = g
        .canonical_order()
        .into_iter()
        .map(|node| match node {
            Node::Concept(c) => Atom { predicate: c.type_label.clone(), args: vec![terms[&c.id].clone()] },
            Node::Relation(r) => Atom {
                predicate: r.label.clone(),
                args: g.args(r.id).iter().map(|a| terms[a].clone()).collect(),
            },
        })
        .collect();
    Formula { vars, atoms }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EQ6: &str = "∃x, access(x) ∧ LOC(x, #1) ∧ car(#1)";

    #[test]
    fn access_car() {
        let g = ConceptualGraph::parse_linear("[access:*]->(LOC)->[car:#1]").unwrap();
        let f = phi(&g);
        assert_eq!(f.render(false), EQ6);
        assert_eq!(f.render(true), "exists x, access(x) & LOC(x, #1) & car(#1)");
    }

    #[test]
    fn empty_graph_is_true() {
        let f = phi(&ConceptualGraph::new());
        assert_eq!(f.render(false), "true");
        assert_eq!(Formula::parse("true").unwrap(), f);
    }

    #[test]
    fn open_door_variables() {
        let mut g = ConceptualGraph::new();
        let open = g.add_concept("open", Referent::Generic);
        let driver = g.add_concept("driver", Referent::Generic);
        let door = g.add_concept("door", Referent::Individual(1));
        g.add_relation("AGNT", &[open, driver]);
        g.add_relation("OBJ", &[open, door]);
        assert_eq!(
            phi(&g).render(false),
            "∃x ∃y, open(x) ∧ driver(y) ∧ door(#1) ∧ AGNT(x, y) ∧ OBJ(x, #1)"
        );
    }

    #[test]
    fn parse_round_trips() {
        assert_eq!(Formula::parse(EQ6).unwrap().render(false), EQ6);
        let ascii = "exists x exists y, p(x) & q(y) & R(x, y, #2)";
        assert_eq!(Formula::parse(ascii).unwrap().render(true), ascii);
        assert_eq!(Formula::parse("p(#1)").unwrap().render(false), "p(#1)");
    }

    #[test]
    fn parse_rejects_ill_formed() {
        assert_eq!(Formula::parse("∃x, p(y)"), Err(FormulaError::FreeVariable("y".into())));
        assert_eq!(Formula::parse("∃x ∃y, p(x)"), Err(FormulaError::UnusedVariable("y".into())));
        assert_eq!(Formula::parse("∃x ∃x, p(x)"), Err(FormulaError::DuplicateVariable("x".into())));
        assert!(Formula::parse("p(x").is_err());
        assert!(Formula::parse("∃x p(x)").is_err());
    }

    #[test]
    fn json_form() {
        let f = Formula::parse(EQ6).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["vars"], serde_json::json!(["x"]));
        assert_eq!(v["atoms"][1]["args"], serde_json::json!(["x", "#1"]));
    }
}
