//! Conceptual graphs: concepts and relations joined by positional arcs.
//!
//! Concepts and relations share one id space. Position 1 of a thematic
//! relation is the predicate concept and position 2 its argument.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{TypeHierarchy, UNKNOWN};
use crate::semantics::{Modality, Proposition};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Referent {
    Generic,
    Individual(u32),
}

impl Referent {
    pub fn marker(self) -> Option<u32> {
        match self {
            Referent::Generic => None,
            Referent::Individual(n) => Some(n),
        }
    }

    pub fn is_generic(self) -> bool {
        self == Referent::Generic
    }

    pub fn compatible(self, other: Referent) -> bool {
        self.is_generic() || other.is_generic() || self == other
    }
}

impl fmt::Display for Referent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Referent::Generic => f.write_str("*"),
            Referent::Individual(n) => write!(f, "#{n}"),
        }
    }
}

impl FromStr for Referent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "*" {
            return Ok(Referent::Generic);
        }
        s.strip_prefix('#')
            .and_then(|n| n.parse().ok())
            .map(Referent::Individual)
            .ok_or_else(|| format!("bad referent `{s}`"))
    }
}

impl From<Referent> for String {
    fn from(r: Referent) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Referent {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptNode {
    pub id: NodeId,
    #[serde(rename = "type")]
    pub type_label: String,
    pub referent: Referent,
}

impl fmt::Display for ConceptNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.type_label, self.referent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationNode {
    pub id: NodeId,
    pub label: String,
    pub arity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub relation: NodeId,
    pub position: usize,
    pub concept: NodeId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CgError {
    #[error("node id {0} used twice")]
    DuplicateId(NodeId),
    #[error("arc of relation {relation} references missing node {node}")]
    DanglingArc { relation: NodeId, node: NodeId },
    #[error("relation {relation} has arity {arity} but arc positions {positions:?}")]
    ArityMismatch { relation: NodeId, arity: usize, positions: Vec<usize> },
    #[error("relation {0} has arity 0")]
    ZeroArity(NodeId),
    #[error("empty type label on concept {0}")]
    EmptyType(NodeId),
    #[error("type `{0}` is not in the hierarchy")]
    UnregisteredType(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptualGraph {
    #[serde(rename = "nodes")]
    concepts: Vec<ConceptNode>,
    relations: Vec<RelationNode>,
    arcs: Vec<Arc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modality: Option<Modality>,
}

impl ConceptualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concepts(&self) -> &[ConceptNode] {
        &self.concepts
    }

    pub fn relations(&self) -> &[RelationNode] {
        &self.relations
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.concepts.len() + self.relations.len()
    }

    pub fn concept(&self, id: NodeId) -> Option<&ConceptNode> {
        self.concepts.binary_search_by_key(&id, |c| c.id).ok().map(|i| &self.concepts[i])
    }

    pub fn relation(&self, id: NodeId) -> Option<&RelationNode> {
        self.relations.binary_search_by_key(&id, |r| r.id).ok().map(|i| &self.relations[i])
    }

    /// Arguments of a relation in position order.
    pub fn args(&self, relation: NodeId) -> Vec<NodeId> {
        self.arcs.iter().filter(|a| a.relation == relation).map(|a| a.concept).collect()
    }

    /// Number of arcs incident to a concept.
    pub fn degree(&self, concept: NodeId) -> usize {
        self.arcs.iter().filter(|a| a.concept == concept).count()
    }

    pub fn max_id(&self) -> Option<NodeId> {
        let c = self.concepts.last().map(|c| c.id);
        let r = self.relations.last().map(|r| r.id);
        c.max(r)
    }

    fn fresh_id(&self) -> NodeId {
        self.max_id().map_or(0, |m| m + 1)
    }

    pub fn add_concept(&mut self, type_label: &str, referent: Referent) -> NodeId {
        let id = self.fresh_id();
        self.insert_concept(id, type_label, referent);
        id
    }

    pub fn add_relation(&mut self, label: &str, args: &[NodeId]) -> NodeId {
        let id = self.fresh_id();
        self.insert_relation(id, label, args);
        id
    }

    /// Inserts a concept with a caller-chosen id. The caller keeps ids unique.
    pub fn insert_concept(&mut self, id: NodeId, type_label: &str, referent: Referent) {
        let at = self.concepts.partition_point(|c| c.id < id);
        self.concepts.insert(at, ConceptNode { id, type_label: type_label.to_string(), referent });
    }

    pub fn insert_relation(&mut self, id: NodeId, label: &str, args: &[NodeId]) {
        let at = self.relations.partition_point(|r| r.id < id);
        self.relations.insert(at, RelationNode { id, label: label.to_string(), arity: args.len() });
        for (i, &concept) in args.iter().enumerate() {
            self.arcs.push(Arc { relation: id, position: i + 1, concept });
        }
        self.arcs.sort();
    }

    pub fn set_referent(&mut self, id: NodeId, referent: Referent) {
        if let Ok(i) = self.concepts.binary_search_by_key(&id, |c| c.id) {
            self.concepts[i].referent = referent;
        }
    }

    /// Nodes in canonical order: ascending id, concepts and relations interleaved.
    pub fn canonical_order(&self) -> Vec<Node<'_>> {
        let mut nodes: Vec<Node<'_>> = self
            .concepts
            .iter()
            .map(Node::Concept)
            .chain(self.relations.iter().map(Node::Relation))
            .collect();
        nodes.sort_by_key(Node::id);
        nodes
    }

    pub fn validate(&self) -> Result<(), CgError> {
        let mut seen = BTreeSet::new();
        for id in self.concepts.iter().map(|c| c.id).chain(self.relations.iter().map(|r| r.id)) {
            if !seen.insert(id) {
                return Err(CgError::DuplicateId(id));
            }
        }
        for c in &self.concepts {
            if c.type_label.is_empty() {
                return Err(CgError::EmptyType(c.id));
            }
        }
        for a in &self.arcs {
            if self.relation(a.relation).is_none() {
                return Err(CgError::DanglingArc { relation: a.relation, node: a.relation });
            }
            if self.concept(a.concept).is_none() {
                return Err(CgError::DanglingArc { relation: a.relation, node: a.concept });
            }
        }
        for r in &self.relations {
            if r.arity == 0 {
                return Err(CgError::ZeroArity(r.id));
            }
            let positions: Vec<usize> =
                self.arcs.iter().filter(|a| a.relation == r.id).map(|a| a.position).collect();
            if positions != (1..=r.arity).collect::<Vec<_>>() {
                return Err(CgError::ArityMismatch { relation: r.id, arity: r.arity, positions });
            }
        }
        Ok(())
    }

    /// Checks that every concept type is registered in `h`.
    pub fn validate_types(&self, h: &TypeHierarchy) -> Result<(), CgError> {
        match self.concepts.iter().find(|c| !h.contains(&c.type_label)) {
            Some(c) => Err(CgError::UnregisteredType(c.type_label.clone())),
            None => Ok(()),
        }
    }

    /// Renders the linear form: one relation clause per line in relation
    /// order, then one line per isolated concept.
    ///
    /// Clauses read `[a]->(R)->[b]`; for other arities the leading positions
    /// are comma-separated before the relation and the last follows it.
    /// Generic concepts written more than once carry a coreference label.
    pub fn to_linear(&self) -> String {
        let mut occurrences: Vec<NodeId> = Vec::new();
        for r in &self.relations {
            occurrences.extend(self.args(r.id));
        }
        let mut labels: HashMap<NodeId, String> = HashMap::new();
        for &id in &occurrences {
            let generic = self.concept(id).is_some_and(|c| c.referent.is_generic());
            if generic && !labels.contains_key(&id) && self.degree(id) > 1 {
                labels.insert(id, variable_name(labels.len()));
            }
        }
        let show = |id: NodeId| {
            let c = self.concept(id).expect("validated graph");
            match labels.get(&id) {
                Some(l) => format!("[{}:*{l}]", c.type_label),
                None => c.to_string(),
            }
        };
        let mut lines = Vec::new();
        for r in &self.relations {
            let args = self.args(r.id);
            let (last, first) = args.split_last().expect("relation arity >= 1");
            let inputs: Vec<String> = first.iter().map(|&a| show(a)).collect();
            let lead = if inputs.is_empty() { String::new() } else { format!("{}->", inputs.join(", ")) };
            lines.push(format!("{lead}({})->{}", r.label, show(*last)));
        }
        for c in &self.concepts {
            if self.degree(c.id) == 0 {
                lines.push(c.to_string());
            }
        }
        lines.join("\n")
    }

    /// Parses the linear form. Ids follow order of first appearance.
    pub fn parse_linear(text: &str) -> Result<Self, CgError> {
        let mut g = ConceptualGraph::new();
        let mut named: HashMap<String, NodeId> = HashMap::new();
        let mut individuals: HashMap<(String, u32), NodeId> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CgError::Syntax { line: idx + 1, message };
            let mut p = LinearParser { s: line, pos: 0 };
            let mut intern = |g: &mut ConceptualGraph, (ty, r): (String, LinearRef)| -> NodeId {
                match r {
                    LinearRef::Generic(None) => g.add_concept(&ty, Referent::Generic),
                    LinearRef::Generic(Some(label)) => {
                        *named.entry(label).or_insert_with(|| g.add_concept(&ty, Referent::Generic))
                    }
                    LinearRef::Individual(n) => *individuals
                        .entry((ty.clone(), n))
                        .or_insert_with(|| g.add_concept(&ty, Referent::Individual(n))),
                }
            };
            let mut inputs = Vec::new();
            if p.peek() == Some('[') {
                loop {
                    let c = p.concept().map_err(err)?;
                    inputs.push(intern(&mut g, c));
                    p.skip_ws();
                    if !p.eat(",") {
                        break;
                    }
                }
                if p.at_end() {
                    if inputs.len() == 1 {
                        continue;
                    }
                    return Err(err("a concept list needs a relation".into()));
                }
                p.expect("->").map_err(err)?;
            }
            let label = p.relation().map_err(err)?;
            p.expect("->").map_err(err)?;
            let out = p.concept().map_err(err)?;
            p.skip_ws();
            if !p.at_end() {
                return Err(err(format!("trailing input `{}`", &p.s[p.pos..])));
            }
            // Reserve the relation id before the output concept is interned.
            let rel_id = g.fresh_id();
            g.insert_relation(rel_id, &label, &[]);
            let out = intern(&mut g, out);
            inputs.push(out);
            g.relations.retain(|r| r.id != rel_id);
            g.insert_relation(rel_id, &label, &inputs);
        }
        g.validate()?;
        Ok(g)
    }
}

/// Coreference label and logic variable naming: x, y, z, x1, x2, ...
pub fn variable_name(index: usize) -> String {
    match index {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        n => format!("x{}", n - 2),
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Node<'a> {
    Concept(&'a ConceptNode),
    Relation(&'a RelationNode),
}

impl Node<'_> {
    pub fn id(&self) -> NodeId {
        match self {
            Node::Concept(c) => c.id,
            Node::Relation(r) => r.id,
        }
    }
}

enum LinearRef {
    Generic(Option<String>),
    Individual(u32),
}

struct LinearParser<'a> {
    s: &'a str,
    pos: usize,
}

impl LinearParser<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().trim_start().chars().next()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&self) -> bool {
        self.rest().trim().is_empty()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), String> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(format!("expected `{tok}` at `{}`", self.rest()))
        }
    }

    fn until(&mut self, close: char) -> Result<&str, String> {
        let rest = &self.s[self.pos..];
        let end = rest.find(close).ok_or_else(|| format!("missing `{close}`"))?;
        self.pos += end + 1;
        Ok(rest[..end].trim())
    }

    fn concept(&mut self) -> Result<(String, LinearRef), String> {
        self.expect("[")?;
        let body = self.until(']')?;
        let (ty, r) = body.split_once(':').ok_or_else(|| format!("concept `[{body}]` lacks a referent"))?;
        let (ty, r) = (ty.trim(), r.trim());
        if ty.is_empty() || ty.contains(char::is_whitespace) {
            return Err(format!("bad type label `{ty}`"));
        }
        let r = if let Some(label) = r.strip_prefix('*') {
            let label = (!label.is_empty()).then(|| label.to_string());
            if label.as_deref().is_some_and(|l| !l.chars().all(|c| c.is_ascii_alphanumeric())) {
                return Err(format!("bad coreference label `{r}`"));
            }
            LinearRef::Generic(label)
        } else {
            match r.parse::<Referent>()? {
                Referent::Individual(n) => LinearRef::Individual(n),
                Referent::Generic => LinearRef::Generic(None),
            }
        };
        Ok((ty.to_string(), r))
    }

    fn relation(&mut self) -> Result<String, String> {
        self.expect("(")?;
        let label = self.until(')')?;
        if label.is_empty() || label.contains(char::is_whitespace) {
            return Err(format!("bad relation label `{label}`"));
        }
        Ok(label.to_string())
    }
}

/// Node ids and individual markers for one project.
///
/// Node ids never repeat. Within one sentence a definite noun phrase of a
/// given type always receives the same marker.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocator {
    pub next_node: NodeId,
    pub next_marker: u32,
    #[serde(skip)]
    sentence: HashMap<String, u32>,
}

impl Allocator {
    pub fn new() -> Self {
        Allocator { next_node: 0, next_marker: 1, sentence: HashMap::new() }
    }

    pub fn start_sentence(&mut self) {
        self.sentence.clear();
    }

    pub fn node(&mut self) -> NodeId {
        let id = self.next_node;
        self.next_node += 1;
        id
    }

    pub fn marker(&mut self, type_label: &str) -> u32 {
        if let Some(&m) = self.sentence.get(type_label) {
            return m;
        }
        let m = self.next_marker;
        self.next_marker += 1;
        self.sentence.insert(type_label.to_string(), m);
        m
    }
}

/// Builds the graph of one proposition.
///
/// Ids are taken in reading order: the predicate concept, then for each
/// bound role its relation followed by the argument concept.
pub fn build_cg(prop: &Proposition, alloc: &mut Allocator) -> ConceptualGraph {
    let mut g = ConceptualGraph::new();
    let pred = alloc.node();
    g.insert_concept(pred, &prop.predicate_type, Referent::Generic);
    for (role, arg) in &prop.bindings {
        let rel = alloc.node();
        let concept = alloc.node();
        let anchor = arg.anchor(*role);
        let referent = match anchor.determiner.as_deref() {
            Some("the") => Referent::Individual(alloc.marker(&anchor.concept_type)),
            _ => Referent::Generic,
        };
        g.insert_concept(concept, &anchor.concept_type, referent);
        g.insert_relation(rel, role.as_str(), &[pred, concept]);
    }
    g.modality = Some(prop.modality.clone());
    g
}

/// Join result with the image of every input node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Joined {
    pub graph: ConceptualGraph,
    pub left: BTreeMap<NodeId, NodeId>,
    pub right: BTreeMap<NodeId, NodeId>,
    /// Merged (left concept, right concept) pairs.
    pub merged: Vec<(NodeId, NodeId)>,
}

fn mergeable(a: &ConceptNode, b: &ConceptNode, h: &TypeHierarchy) -> bool {
    a.type_label != UNKNOWN
        && b.type_label != UNKNOWN
        && h.meet_comparable(&a.type_label, &b.type_label).is_some()
        && a.referent.compatible(b.referent)
}

pub fn join(g1: &ConceptualGraph, g2: &ConceptualGraph, h: &TypeHierarchy) -> ConceptualGraph {
    join_with_maps(g1, g2, h).graph
}

/// Maximal join: the largest set of compatible concept pairs is merged.
///
/// Pairs are found by augmenting paths over left concepts in id order, each
/// trying right concepts with identical type and referent first, then by id,
/// so ties fall to the lowest id pair. Relations are never merged.
pub fn join_with_maps(g1: &ConceptualGraph, g2: &ConceptualGraph, h: &TypeHierarchy) -> Joined {
    let candidates: Vec<Vec<usize>> = g1
        .concepts
        .iter()
        .map(|a| {
            let mut c: Vec<usize> = (0..g2.concepts.len()).filter(|&j| mergeable(a, &g2.concepts[j], h)).collect();
            c.sort_by_key(|&j| {
                let b = &g2.concepts[j];
                (!(b.type_label == a.type_label && b.referent == a.referent), b.id)
            });
            c
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; g2.concepts.len()];
    fn augment(i: usize, cand: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &cand[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, cand, owner, seen)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..g1.concepts.len() {
        let mut seen = vec![false; g2.concepts.len()];
        augment(i, &candidates, &mut owner, &mut seen);
    }

    let mut graph = g1.clone();
    let left: BTreeMap<NodeId, NodeId> = g1
        .concepts
        .iter()
        .map(|c| c.id)
        .chain(g1.relations.iter().map(|r| r.id))
        .map(|id| (id, id))
        .collect();
    let mut right = BTreeMap::new();
    let mut merged = Vec::new();
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            let (a, b) = (&g1.concepts[*i], &g2.concepts[j]);
            merged.push((a.id, b.id));
            right.insert(b.id, a.id);
            let ty = h.meet_comparable(&a.type_label, &b.type_label).expect("mergeable");
            let referent = if a.referent.is_generic() { b.referent } else { a.referent };
            let k = graph.concepts.binary_search_by_key(&a.id, |c| c.id).expect("left concept");
            graph.concepts[k].type_label = ty.to_string();
            graph.concepts[k].referent = referent;
        }
    }
    merged.sort();

    let mut taken: BTreeSet<NodeId> = left.keys().copied().collect();
    let mut next = g1.max_id().max(g2.max_id()).map_or(0, |m| m + 1);
    let mut place = |id: NodeId| {
        if taken.insert(id) {
            id
        } else {
            let fresh = next;
            next += 1;
            taken.insert(fresh);
            fresh
        }
    };
    for node in g2.canonical_order() {
        match node {
            Node::Concept(c) if !right.contains_key(&c.id) => {
                let id = place(c.id);
                right.insert(c.id, id);
                graph.insert_concept(id, &c.type_label, c.referent);
            }
            Node::Relation(r) => {
                let id = place(r.id);
                right.insert(r.id, id);
            }
            Node::Concept(_) => {}
        }
    }
    for r in &g2.relations {
        let args: Vec<NodeId> = g2.args(r.id).iter().map(|a| right[a]).collect();
        graph.insert_relation(right[&r.id], &r.label, &args);
    }
    graph.modality = None;
    Joined { graph, left, right, merged }
}

/// A homomorphism from a query graph into a target graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Projection {
    pub concepts: BTreeMap<NodeId, NodeId>,
    pub relations: BTreeMap<NodeId, NodeId>,
}

fn projects_to(q: &ConceptNode, t: &ConceptNode, h: &TypeHierarchy) -> bool {
    h.leq(&t.type_label, &q.type_label) && (q.referent.is_generic() || q.referent == t.referent)
}

/// All projections of `query` into `target`, sorted.
pub fn project(query: &ConceptualGraph, target: &ConceptualGraph, h: &TypeHierarchy) -> Vec<Projection> {
    let q_concepts = &query.concepts;
    let candidates: Vec<Vec<NodeId>> = q_concepts
        .iter()
        .map(|q| target.concepts.iter().filter(|t| projects_to(q, t, h)).map(|t| t.id).collect())
        .collect();
    let q_args: Vec<(NodeId, &str, Vec<NodeId>)> =
        query.relations.iter().map(|r| (r.id, r.label.as_str(), query.args(r.id))).collect();
    let t_args: Vec<(NodeId, &str, Vec<NodeId>)> =
        target.relations.iter().map(|r| (r.id, r.label.as_str(), target.args(r.id))).collect();
    let index: HashMap<NodeId, usize> = q_concepts.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    // A relation is checked once its last-assigned argument is mapped.
    let ready_at: Vec<usize> = q_args.iter().map(|(_, _, args)| args.iter().map(|a| index[a]).max().unwrap_or(0)).collect();

    let mut out = Vec::new();
    let mut assignment: Vec<NodeId> = Vec::with_capacity(q_concepts.len());
    fn relation_images<'a>(
        args: &[NodeId],
        label: &str,
        t_args: &'a [(NodeId, &str, Vec<NodeId>)],
        index: &HashMap<NodeId, usize>,
        assignment: &[NodeId],
    ) -> impl Iterator<Item = NodeId> + 'a {
        let image: Vec<NodeId> = args.iter().map(|a| assignment[index[a]]).collect();
        let label = label.to_string();
        t_args.iter().filter(move |(_, l, ta)| *l == label && *ta == image).map(|(id, _, _)| *id)
    }
    #[allow(clippy::too_many_arguments)]
    fn search(
        depth: usize,
        candidates: &[Vec<NodeId>],
        q_args: &[(NodeId, &str, Vec<NodeId>)],
        t_args: &[(NodeId, &str, Vec<NodeId>)],
        ready_at: &[usize],
        index: &HashMap<NodeId, usize>,
        q_ids: &[NodeId],
        assignment: &mut Vec<NodeId>,
        out: &mut Vec<Projection>,
    ) {
        if depth == candidates.len() {
            let mut partial: Vec<BTreeMap<NodeId, NodeId>> = vec![BTreeMap::new()];
            for (rid, label, args) in q_args {
                let images: Vec<NodeId> = relation_images(args, label, t_args, index, assignment).collect();
                partial = partial
                    .into_iter()
                    .flat_map(|m| {
                        images.iter().map(move |&t| {
                            let mut m = m.clone();
                            m.insert(*rid, t);
                            m
                        })
                    })
                    .collect();
            }
            let concepts: BTreeMap<NodeId, NodeId> = q_ids.iter().copied().zip(assignment.iter().copied()).collect();
            out.extend(partial.into_iter().map(|relations| Projection { concepts: concepts.clone(), relations }));
            return;
        }
        for &t in &candidates[depth] {
            assignment.push(t);
            let ok = q_args.iter().zip(ready_at).filter(|(_, &r)| r == depth).all(|((_, label, args), _)| {
                relation_images(args, label, t_args, index, assignment).next().is_some()
            });
            if ok {
                search(depth + 1, candidates, q_args, t_args, ready_at, index, q_ids, assignment, out);
            }
            assignment.pop();
        }
    }
    let q_ids: Vec<NodeId> = q_concepts.iter().map(|c| c.id).collect();
    search(0, &candidates, &q_args, &t_args, &ready_at, &index, &q_ids, &mut assignment, &mut out);
    out.sort();
    out
}
