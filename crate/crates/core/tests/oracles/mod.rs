//! Slow, obviously-correct reference implementations used by the property
//! tests, plus random generators.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use reqcad_core::cg::{ConceptualGraph, NodeId, Projection, Referent};
use reqcad_core::lexicon::{lemmatize, LexicalEntry, Lexicon, Token};
use reqcad_core::logic::{Formula, Term};
use reqcad_core::ontology::TypeHierarchy;
use reqcad_core::syntax::{CStructure, Category, GrammarRule};

// ---------------------------------------------------------------- parsing

/// Leaf options per token, mirroring how the parser reads the lexicon.
fn leaf_options(tokens: &[Token], lexicon: &Lexicon) -> Vec<Vec<(Category, usize)>> {
    tokens
        .iter()
        .map(|t| {
            let entries = lexicon.lookup(&lemmatize(t, lexicon));
            if entries.is_empty() {
                vec![(Category::of_lexical(LexicalEntry::unknown(&t.surface).category), 0)]
            } else {
                entries.iter().enumerate().map(|(i, e)| (Category::of_lexical(e.category), i)).collect()
            }
        })
        .collect()
}

/// Tree key with the entry index on every leaf, so homographs stay distinct.
pub fn tree_key(tree: &CStructure, lexicon: &Lexicon) -> String {
    if let Some(leaf) = &tree.leaf {
        let lemma = lemmatize(&leaf.token, lexicon);
        let idx = lexicon.lookup(&lemma).iter().position(|e| *e == leaf.entry).unwrap_or(0);
        return format!("{}:{}/{}", tree.category, leaf.token.surface, idx);
    }
    let kids: Vec<String> = tree.children.iter().map(|c| tree_key(c, lexicon)).collect();
    format!("{}({})", tree.category, kids.join(", "))
}

type MemoKey = (Category, usize, usize, Vec<Category>);

struct Derivations<'a> {
    grammar: &'a [GrammarRule],
    leaves: Vec<Vec<(Category, usize)>>,
    surfaces: Vec<String>,
    memo: HashMap<MemoKey, Vec<(String, Option<usize>)>>,
}

impl Derivations<'_> {
    /// All trees for `cat` over `i..j` as (key, rule used at the root).
    /// `open` lists categories already being derived over this same span.
    fn derive(&mut self, cat: Category, i: usize, j: usize, open: &[Category]) -> Vec<(String, Option<usize>)> {
        if open.contains(&cat) {
            return Vec::new();
        }
        let memo_key = (cat, i, j, {
            let mut o = open.to_vec();
            o.sort();
            o
        });
        if let Some(done) = self.memo.get(&memo_key) {
            return done.clone();
        }
        let mut out = Vec::new();
        if j == i + 1 {
            for &(c, idx) in &self.leaves[i] {
                if c == cat {
                    out.push((format!("{cat}:{}/{idx}", self.surfaces[i]), None));
                }
            }
        }
        let mut inner_open = open.to_vec();
        inner_open.push(cat);
        for (r, rule) in self.grammar.iter().enumerate() {
            if rule.lhs != cat {
                continue;
            }
            // Expand each starred item into 1..=span copies.
            let max_copies = j - i;
            let mut shapes: Vec<Vec<(Category, bool)>> = vec![Vec::new()];
            for item in &rule.rhs {
                let counts: Vec<usize> = if item.starred { (1..=max_copies).collect() } else { vec![1] };
                shapes = shapes
                    .into_iter()
                    .flat_map(|s| {
                        counts.iter().map(move |&k| {
                            let mut s = s.clone();
                            s.extend(std::iter::repeat_n((item.category, item.starred), k));
                            s
                        })
                    })
                    .filter(|s| s.len() <= max_copies)
                    .collect();
            }
            for shape in shapes {
                for cuts in compositions(i, j, shape.len()) {
                    let mut combos: Vec<Vec<String>> = vec![Vec::new()];
                    for (k, &(child, starred)) in shape.iter().enumerate() {
                        let (a, b) = (cuts[k], cuts[k + 1]);
                        let child_open: Vec<Category> = if (a, b) == (i, j) { inner_open.clone() } else { Vec::new() };
                        let options: Vec<String> = self
                            .derive(child, a, b, &child_open)
                            .into_iter()
                            .filter(|(_, root)| !(starred && *root == Some(r)))
                            .map(|(key, _)| key)
                            .collect();
                        combos = combos
                            .into_iter()
                            .flat_map(|p| {
                                options.iter().map(move |o| {
                                    let mut p = p.clone();
                                    p.push(o.clone());
                                    p
                                })
                            })
                            .collect();
                        if combos.is_empty() {
                            break;
                        }
                    }
                    out.extend(combos.into_iter().map(|kids| (format!("{cat}({})", kids.join(", ")), Some(r))));
                }
            }
        }
        self.memo.insert(memo_key, out.clone());
        out
    }
}

/// Cut points `i = c0 < c1 < ... < cn = j`, every part non-empty.
fn compositions(i: usize, j: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if i == j { vec![vec![i]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for mid in i + 1..=j {
        if j - mid < parts - 1 {
            break;
        }
        for mut rest in compositions(mid, j, parts - 1) {
            rest.insert(0, i);
            out.push(rest);
        }
    }
    out
}

/// Every tree rooted at `s` by top-down exhaustive derivation.
pub fn exhaustive_parses(tokens: &[Token], lexicon: &Lexicon, grammar: &[GrammarRule]) -> BTreeSet<String> {
    if tokens.is_empty() {
        return BTreeSet::new();
    }
    let mut d = Derivations {
        grammar,
        leaves: leaf_options(tokens, lexicon),
        surfaces: tokens.iter().map(|t| t.surface.clone()).collect(),
        memo: HashMap::new(),
    };
    d.derive(Category::S, 0, tokens.len(), &[]).into_iter().map(|(k, _)| k).collect()
}

// ---------------------------------------------------------------- graphs

pub const FLAT_TYPES: &[&str] = &["alpha", "beta", "gamma", "delta"];
pub const RELATIONS: &[(&str, usize)] = &[("MARK", 1), ("AGNT", 2), ("OBJ", 2), ("BETW", 3)];

/// Types under the top with no other order between them.
pub fn flat_hierarchy() -> TypeHierarchy {
    let mut h = TypeHierarchy::new();
    for t in FLAT_TYPES {
        h.register(t);
    }
    h
}

/// A random valid graph with `concepts` concepts and up to `relations`
/// relations, types drawn from `types`, markers from `1..=markers`.
pub fn random_graph(rng: &mut impl Rng, types: &[&str], concepts: usize, relations: usize, markers: u32) -> ConceptualGraph {
    let mut g = ConceptualGraph::new();
    let mut ids = Vec::new();
    for _ in 0..concepts {
        let ty = types.choose(rng).unwrap();
        let referent = if markers > 0 && rng.gen_bool(0.3) {
            Referent::Individual(rng.gen_range(1..=markers))
        } else {
            Referent::Generic
        };
        ids.push(g.add_concept(ty, referent));
    }
    if ids.is_empty() {
        return g;
    }
    for _ in 0..relations {
        let (label, arity) = *RELATIONS.choose(rng).unwrap();
        let args: Vec<NodeId> = (0..arity).map(|_| *ids.choose(rng).unwrap()).collect();
        g.add_relation(label, &args);
    }
    g
}

/// Enumerates every concept map and relation map that forms a projection.
pub fn brute_force_projections(query: &ConceptualGraph, target: &ConceptualGraph, h: &TypeHierarchy) -> Vec<Projection> {
    let qc = query.concepts();
    let tc = target.concepts();
    let mut out = Vec::new();
    if !qc.is_empty() && tc.is_empty() {
        return out;
    }
    let total = tc.len().pow(qc.len() as u32);
    for mut code in 0..total {
        let mut concepts = BTreeMap::new();
        for q in qc {
            concepts.insert(q.id, tc[code % tc.len()].id);
            code /= tc.len().max(1);
        }
        let ok = qc.iter().all(|q| {
            let t = target.concept(concepts[&q.id]).unwrap();
            h.leq(&t.type_label, &q.type_label) && (q.referent == Referent::Generic || q.referent == t.referent)
        });
        if !ok {
            continue;
        }
        let per_relation: Vec<Vec<NodeId>> = query
            .relations()
            .iter()
            .map(|r| {
                let image: Vec<NodeId> = query.args(r.id).iter().map(|a| concepts[a]).collect();
                target
                    .relations()
                    .iter()
                    .filter(|t| t.label == r.label && target.args(t.id) == image)
                    .map(|t| t.id)
                    .collect()
            })
            .collect();
        let mut maps: Vec<BTreeMap<NodeId, NodeId>> = vec![BTreeMap::new()];
        for (r, images) in query.relations().iter().zip(&per_relation) {
            maps = maps
                .into_iter()
                .flat_map(|m| {
                    images.iter().map(move |&t| {
                        let mut m = m.clone();
                        m.insert(r.id, t);
                        m
                    })
                })
                .collect();
        }
        out.extend(maps.into_iter().map(|relations| Projection { concepts: concepts.clone(), relations }));
    }
    out.sort();
    out
}

/// Largest number of disjoint compatible concept pairs, by trying all subsets.
pub fn brute_force_max_matching(a: &ConceptualGraph, b: &ConceptualGraph, compatible: impl Fn(NodeId, NodeId) -> bool) -> usize {
    fn go(i: usize, left: &[NodeId], right: &[NodeId], used: &mut Vec<bool>, ok: &dyn Fn(NodeId, NodeId) -> bool) -> usize {
        if i == left.len() {
            return 0;
        }
        let mut best = go(i + 1, left, right, used, ok);
        for j in 0..right.len() {
            if !used[j] && ok(left[i], right[j]) {
                used[j] = true;
                best = best.max(1 + go(i + 1, left, right, used, ok));
                used[j] = false;
            }
        }
        best
    }
    let left: Vec<NodeId> = a.concepts().iter().map(|c| c.id).collect();
    let right: Vec<NodeId> = b.concepts().iter().map(|c| c.id).collect();
    go(0, &left, &right, &mut vec![false; right.len()], &compatible)
}

/// Same labels, referents and arc structure under some bijection of node ids.
pub fn isomorphic(a: &ConceptualGraph, b: &ConceptualGraph) -> bool {
    if a.concepts().len() != b.concepts().len() || a.relations().len() != b.relations().len() {
        return false;
    }
    type Rel = (String, Vec<NodeId>);
    let signature = |g: &ConceptualGraph, id: NodeId| {
        let mut sig: Vec<(String, usize)> = g
            .relations()
            .iter()
            .flat_map(|r| {
                g.args(r.id).into_iter().enumerate().filter(|(_, x)| *x == id).map(|(p, _)| (r.label.clone(), p)).collect::<Vec<_>>()
            })
            .collect();
        sig.sort();
        sig
    };
    let sig_a: Vec<_> = a.concepts().iter().map(|c| signature(a, c.id)).collect();
    let sig_b: BTreeMap<NodeId, _> = b.concepts().iter().map(|c| (c.id, signature(b, c.id))).collect();
    let index: HashMap<NodeId, usize> = a.concepts().iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut ready: Vec<Vec<Rel>> = vec![Vec::new(); a.concepts().len()];
    for r in a.relations() {
        let args = a.args(r.id);
        let at = args.iter().map(|x| index[x]).max().unwrap_or(0);
        ready[at].push((r.label.clone(), args));
    }
    let mut available: HashMap<Rel, usize> = HashMap::new();
    for r in b.relations() {
        *available.entry((r.label.clone(), b.args(r.id))).or_default() += 1;
    }
    struct Search<'a> {
        a: &'a ConceptualGraph,
        b: &'a ConceptualGraph,
        sig_a: Vec<Vec<(String, usize)>>,
        sig_b: BTreeMap<NodeId, Vec<(String, usize)>>,
        ready: Vec<Vec<Rel>>,
        map: BTreeMap<NodeId, NodeId>,
        used: BTreeSet<NodeId>,
        available: HashMap<Rel, usize>,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize) -> bool {
            if i == self.a.concepts().len() {
                return true;
            }
            let c = self.a.concepts()[i].clone();
            let candidates: Vec<NodeId> = self
                .b
                .concepts()
                .iter()
                .filter(|t| {
                    !self.used.contains(&t.id)
                        && t.type_label == c.type_label
                        && t.referent == c.referent
                        && self.sig_b[&t.id] == self.sig_a[i]
                })
                .map(|t| t.id)
                .collect();
            for t in candidates {
                self.map.insert(c.id, t);
                self.used.insert(t);
                let mut taken = Vec::new();
                let mut ok = true;
                for (label, args) in self.ready[i].clone() {
                    let key = (label, args.iter().map(|x| self.map[x]).collect());
                    match self.available.get_mut(&key) {
                        Some(n) if *n > 0 => {
                            *n -= 1;
                            taken.push(key);
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && self.go(i + 1) {
                    return true;
                }
                for key in taken {
                    *self.available.get_mut(&key).unwrap() += 1;
                }
                self.used.remove(&t);
                self.map.remove(&c.id);
            }
            false
        }
    }
    let mut s = Search { a, b, sig_a, sig_b, ready, map: BTreeMap::new(), used: BTreeSet::new(), available };
    s.go(0)
}

// ---------------------------------------------------------------- models

/// A finite first-order structure. Constant `#n` denotes element `n - 1`.
#[derive(Clone, Debug)]
pub struct Model {
    pub size: usize,
    pub unary: BTreeMap<String, BTreeSet<usize>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

pub fn random_model(rng: &mut impl Rng, size: usize, density: f64) -> Model {
    let mut unary = BTreeMap::new();
    for t in FLAT_TYPES {
        let ext: BTreeSet<usize> = (0..size).filter(|_| rng.gen_bool(density)).collect();
        unary.insert(t.to_string(), ext);
    }
    let mut relations = BTreeMap::new();
    for &(label, arity) in RELATIONS {
        let mut tuples = BTreeSet::new();
        let total = size.pow(arity as u32);
        for mut code in 0..total {
            let mut tuple = Vec::with_capacity(arity);
            for _ in 0..arity {
                tuple.push(code % size);
                code /= size;
            }
            if rng.gen_bool(density / arity as f64) {
                tuples.insert(tuple);
            }
        }
        relations.insert(label.to_string(), tuples);
    }
    Model { size, unary, relations }
}

/// Tries every assignment of the quantified variables.
pub fn satisfiable(f: &Formula, m: &Model) -> bool {
    let total = m.size.pow(f.vars.len() as u32);
    (0..total).any(|mut code| {
        let mut env: HashMap<&str, usize> = HashMap::new();
        for v in &f.vars {
            env.insert(v, code % m.size);
            code /= m.size;
        }
        let value = |t: &Term| match t {
            Term::Variable(v) => env[v.as_str()],
            Term::Constant(n) => *n as usize - 1,
        };
        f.atoms.iter().all(|a| {
            let args: Vec<usize> = a.args.iter().map(value).collect();
            if let Some(ext) = m.unary.get(&a.predicate).filter(|_| args.len() == 1) {
                ext.contains(&args[0])
            } else {
                m.relations.get(&a.predicate).is_some_and(|r| r.contains(&args))
            }
        })
    })
}

/// The canonical graph of a model: one concept per (element, type) fact and
/// one relation per tuple and choice of concept for each argument. Elements
/// named by a constant `#n` carry that marker.
pub fn canonical_graph(m: &Model, named: usize) -> ConceptualGraph {
    let mut g = ConceptualGraph::new();
    let mut nodes: Vec<Vec<NodeId>> = vec![Vec::new(); m.size];
    for (ty, ext) in &m.unary {
        for &e in ext {
            let referent = if e < named { Referent::Individual(e as u32 + 1) } else { Referent::Generic };
            nodes[e].push(g.add_concept(ty, referent));
        }
    }
    for (label, tuples) in &m.relations {
        for tuple in tuples {
            let mut choices: Vec<Vec<NodeId>> = vec![Vec::new()];
            for &e in tuple {
                choices = choices
                    .into_iter()
                    .flat_map(|c| {
                        nodes[e].iter().map(move |&n| {
                            let mut c = c.clone();
                            c.push(n);
                            c
                        })
                    })
                    .collect();
            }
            for args in choices {
                g.add_relation(label, &args);
            }
        }
    }
    g
}

// ---------------------------------------------------------------- ontology

/// `b ≤ a` by breadth-first search over the rendered `child < parent` lines.
pub fn reachable(rendered: &str, b: &str, a: &str) -> bool {
    if a == b || a == reqcad_core::ontology::TOP || b == reqcad_core::ontology::BOTTOM {
        return true;
    }
    let mut parents: HashMap<&str, Vec<&str>> = HashMap::new();
    for line in rendered.lines() {
        if let Some((c, p)) = line.split_once(" < ") {
            parents.entry(c).or_default().push(p);
        }
    }
    let mut queue = VecDeque::from([b]);
    let mut seen = BTreeSet::from([b]);
    while let Some(t) = queue.pop_front() {
        for &p in parents.get(t).into_iter().flatten() {
            if p == a {
                return true;
            }
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    false
}
