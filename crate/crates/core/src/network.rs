//! Two-level semantic representation: independent per-requirement graphs
//! and the merged knowledge network with function conflicts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cg::{join_with_maps, Arc, ConceptNode, ConceptualGraph, NodeId, Referent, RelationNode};
use crate::ontology::TypeHierarchy;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("antonym table line {line}: expected `verb1 | verb2`")]
pub struct AntonymSyntaxError {
    pub line: usize,
}

/// Unordered pairs of antonymous actions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AntonymTable {
    pairs: BTreeSet<(String, String)>,
}

impl AntonymTable {
    pub fn parse(text: &str) -> Result<Self, AntonymSyntaxError> {
        let mut pairs = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line.split_once('|').ok_or(AntonymSyntaxError { line: idx + 1 })?;
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() || a == b {
                return Err(AntonymSyntaxError { line: idx + 1 });
            }
            pairs.insert(ordered(a, b));
        }
        Ok(AntonymTable { pairs })
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&ordered(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub requirement: String,
    pub node: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConflictKind {
    Antonym,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub action_a: String,
    pub action_b: String,
    pub node_a: NodeId,
    pub node_b: NodeId,
    pub kind: ConflictKind,
    /// Shared argument types, sorted.
    pub shared: Vec<String>,
    pub shared_nodes: Vec<NodeId>,
    pub requirements: Vec<String>,
}

/// The merged level-2 graph with provenance for every node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticNetwork {
    pub merged: ConceptualGraph,
    pub provenance: BTreeMap<NodeId, Vec<Origin>>,
    pub conflicts: Vec<Conflict>,
}

/// Level 1: one independent graph per proposition, in requirement order.
pub fn level1(requirements: &[(String, Vec<ConceptualGraph>)]) -> Vec<(&str, &ConceptualGraph)> {
    requirements
        .iter()
        .flat_map(|(rid, graphs)| graphs.iter().map(move |g| (rid.as_str(), g)))
        .collect()
}

/// Level 2: left fold of joins.
///
/// Before each join, individuals of the incoming graph take the marker of an
/// individual of the same type already in the network.
pub fn merge(graphs: &[(&str, &ConceptualGraph)], h: &TypeHierarchy) -> SemanticNetwork {
    let mut net = SemanticNetwork::default();
    for (rid, g) in graphs {
        let g = corefer(&net.merged, g);
        let joined = join_with_maps(&net.merged, &g, h);
        let mut provenance: BTreeMap<NodeId, Vec<Origin>> = BTreeMap::new();
        for (old, new) in &joined.left {
            provenance.insert(*new, net.provenance.remove(old).unwrap_or_default());
        }
        for (orig, new) in &joined.right {
            provenance.entry(*new).or_default().push(Origin { requirement: rid.to_string(), node: *orig });
        }
        net.merged = joined.graph;
        net.provenance = provenance;
    }
    net
}

fn corefer(net: &ConceptualGraph, g: &ConceptualGraph) -> ConceptualGraph {
    let mut known: HashMap<&str, u32> = HashMap::new();
    for c in net.concepts() {
        if let Referent::Individual(m) = c.referent {
            known.entry(c.type_label.as_str()).or_insert(m);
        }
    }
    let mut out = g.clone();
    for c in g.concepts() {
        if let (Referent::Individual(_), Some(&m)) = (c.referent, known.get(c.type_label.as_str())) {
            out.set_referent(c.id, Referent::Individual(m));
        }
    }
    out
}

/// Action concepts (heads of relations) and their argument concepts.
fn actions(g: &ConceptualGraph) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut out: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for r in g.relations() {
        let args = g.args(r.id);
        if let Some((head, rest)) = args.split_first() {
            out.entry(*head).or_default().extend(rest.iter().copied().filter(|a| a != head));
        }
    }
    out
}

/// Antonymous actions sharing an argument, and any other pair of distinct
/// actions sharing at least two.
pub fn detect_conflicts(net: &SemanticNetwork, antonyms: &AntonymTable) -> Vec<Conflict> {
    let g = &net.merged;
    let acts = actions(g);
    let ty = |id: NodeId| g.concept(id).map(|c| c.type_label.clone()).unwrap_or_default();
    let mut out = Vec::new();
    let ids: Vec<NodeId> = acts.keys().copied().collect();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let (ta, tb) = (ty(a), ty(b));
            if ta == tb {
                continue;
            }
            let shared: Vec<NodeId> = acts[&a].intersection(&acts[&b]).copied().collect();
            let kind = if antonyms.contains(&ta, &tb) {
                (!shared.is_empty()).then_some(ConflictKind::Antonym)
            } else {
                (shared.len() >= 2).then_some(ConflictKind::Parameter)
            };
            let Some(kind) = kind else { continue };
            let mut types: Vec<String> = shared.iter().map(|&s| ty(s)).collect();
            types.sort();
            let requirements: BTreeSet<String> = [a, b]
                .iter()
                .flat_map(|n| net.provenance.get(n).into_iter().flatten())
                .map(|o| o.requirement.clone())
                .collect();
            out.push(Conflict {
                action_a: ta,
                action_b: tb,
                node_a: a,
                node_b: b,
                kind,
                shared: types,
                shared_nodes: shared,
                requirements: requirements.into_iter().collect(),
            });
        }
    }
    out
}

/// Merges and annotates conflicts in one step.
pub fn build_network(graphs: &[(&str, &ConceptualGraph)], h: &TypeHierarchy, antonyms: &AntonymTable) -> SemanticNetwork {
    let mut net = merge(graphs, h);
    net.conflicts = detect_conflicts(&net, antonyms);
    net
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkExport {
    pub nodes: Vec<ConceptNode>,
    pub relations: Vec<RelationNode>,
    pub arcs: Vec<Arc>,
    pub provenance: BTreeMap<NodeId, Vec<Origin>>,
    pub conflicts: Vec<Conflict>,
}

impl SemanticNetwork {
    pub fn export(&self) -> NetworkExport {
        NetworkExport {
            nodes: self.merged.concepts().to_vec(),
            relations: self.merged.relations().to_vec(),
            arcs: self.merged.arcs().to_vec(),
            provenance: self.provenance.clone(),
            conflicts: self.conflicts.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("network serializes")
    }

    /// Graphviz description: boxes for concepts, ellipses for relations,
    /// dashed red edges for conflicts.
    pub fn to_dot(&self) -> String {
        let g = &self.merged;
        let mut out = String::from("digraph network {\n");
        for c in g.concepts() {
            let _ = writeln!(out, "  n{} [shape=box, label=\"{}\"];", c.id, escape(&c.to_string()));
        }
        for r in g.relations() {
            let _ = writeln!(out, "  n{} [shape=ellipse, label=\"{}\"];", r.id, escape(&r.label));
        }
        for r in g.relations() {
            let args = g.args(r.id);
            let last = args.len() - 1;
            for (i, a) in args.iter().enumerate() {
                let label = if args.len() > 2 { format!(" [label=\"{}\"]", i + 1) } else { String::new() };
                if i == last && last > 0 {
                    let _ = writeln!(out, "  n{} -> n{a}{label};", r.id);
                } else {
                    let _ = writeln!(out, "  n{a} -> n{}{label};", r.id);
                }
            }
        }
        for c in &self.conflicts {
            let kind = match c.kind {
                ConflictKind::Antonym => "antonym",
                ConflictKind::Parameter => "parameter",
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [dir=none, style=dashed, color=red, label=\"{kind}\"];",
                c.node_a, c.node_b
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{FIXTURE_ANTONYMS, FIXTURE_HIERARCHY};

    fn h() -> TypeHierarchy {
        TypeHierarchy::parse(FIXTURE_HIERARCHY).unwrap()
    }

    fn g(text: &str, offset: NodeId) -> ConceptualGraph {
        let parsed = ConceptualGraph::parse_linear(text).unwrap();
        let mut out = ConceptualGraph::new();
        for c in parsed.concepts() {
            out.insert_concept(c.id + offset, &c.type_label, c.referent);
        }
        for r in parsed.relations() {
            let args: Vec<NodeId> = parsed.args(r.id).iter().map(|a| a + offset).collect();
            out.insert_relation(r.id + offset, &r.label, &args);
        }
        out
    }

    #[test]
    fn antonym_table() {
        let t = AntonymTable::parse(FIXTURE_ANTONYMS).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.contains("close", "open"));
        assert!(t.contains("rotate", "solidarize"));
        assert!(!t.contains("open", "rotate"));
        assert_eq!(AntonymTable::parse("a b"), Err(AntonymSyntaxError { line: 1 }));
    }

    #[test]
    fn open_close_share_the_door() {
        let a = g("[open:*]->(OBJ)->[door:#1]", 0);
        let b = g("[close:*]->(OBJ)->[door:#7]", 10);
        let net = merge(&[("R1", &a), ("R2", &b)], &h());
        let doors: Vec<_> = net.merged.concepts().iter().filter(|c| c.type_label == "door").collect();
        assert_eq!(doors.len(), 1);
        assert_eq!(doors[0].referent, Referent::Individual(1));
        assert_eq!(net.provenance.len(), net.merged.node_count());
        assert_eq!(net.provenance[&doors[0].id].len(), 2);
        let t = AntonymTable::parse(FIXTURE_ANTONYMS).unwrap();
        let conflicts = detect_conflicts(&net, &t);
        assert_eq!(conflicts.len(), 1);
        assert_eq!((conflicts[0].action_a.as_str(), conflicts[0].action_b.as_str()), ("open", "close"));
        assert_eq!(conflicts[0].requirements, ["R1", "R2"]);
    }

    #[test]
    fn fold_identity_and_disjoint_union() {
        let a = g("[open:*]->(OBJ)->[door:#1]", 0);
        let net = merge(&[("R1", &a)], &h());
        assert_eq!(net.merged, a);
        let b = g("[rotate:*]->(AGNT)->[pin:#2]", 10);
        let net = merge(&[("R1", &a), ("R2", &b)], &h());
        assert_eq!(net.merged.node_count(), a.node_count() + b.node_count());
        assert!(merge(&[], &h()).merged.is_empty());
    }

    #[test]
    fn conflicts_need_shared_arguments() {
        let t = AntonymTable::parse(FIXTURE_ANTONYMS).unwrap();
        let a = g("[open:*]->(OBJ)->[door:#1]", 0);
        let b = g("[close:*]->(OBJ)->[window:#2]", 10);
        assert!(build_network(&[("R1", &a), ("R2", &b)], &h(), &t).conflicts.is_empty());
        assert!(build_network(&[("R1", &a)], &h(), &t).conflicts.is_empty());
        let c = g("[lock:*x]->(AGNT)->[driver:#3]\n[lock:*x]->(OBJ)->[door:#1]", 20);
        let d = g("[hold:*x]->(AGNT)->[driver:#3]\n[hold:*x]->(OBJ)->[door:#1]", 30);
        let net = build_network(&[("R1", &c), ("R2", &d)], &h(), &t);
        assert_eq!(net.conflicts.len(), 1);
        assert_eq!(net.conflicts[0].kind, ConflictKind::Parameter);
        assert_eq!(net.conflicts[0].shared, ["door", "driver"]);
    }

    #[test]
    fn exports() {
        let t = AntonymTable::parse(FIXTURE_ANTONYMS).unwrap();
        let a = g("[open:*]->(OBJ)->[door:#1]", 0);
        let b = g("[close:*]->(OBJ)->[door:#1]", 10);
        let net = build_network(&[("R1", &a), ("R2", &b)], &h(), &t);
        let json: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap();
        for key in ["nodes", "relations", "arcs", "provenance", "conflicts"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let back: NetworkExport = serde_json::from_str(&net.to_json()).unwrap();
        assert_eq!(back.nodes.len(), 3);
        let dot = net.to_dot();
        assert!(dot.starts_with("digraph network {"));
        assert!(dot.contains("n2 [shape=box, label=\"[door:#1]\"];"));
        assert!(dot.contains("style=dashed"));
    }
}
