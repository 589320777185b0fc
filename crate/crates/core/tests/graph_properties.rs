mod oracles;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reqcad_core::cg::{join, join_with_maps, project, Allocator, ConceptualGraph, Referent};
use reqcad_core::logic::{phi, Formula};
use reqcad_core::ontology::{TypeHierarchy, UNKNOWN};
use reqcad_core::pipeline::{analyze, Resources};
use reqcad_core::resources::{FIXTURE_BASE, FIXTURE_HIERARCHY, FIXTURE_SENTENCES};

const FIXTURE_TYPES: &[&str] = &["Entity", "component", "hinge", "pin", "hinge-pin", "door", "leaf", "action", "rotate"];

fn fixture_h() -> TypeHierarchy {
    TypeHierarchy::parse(FIXTURE_HIERARCHY).unwrap()
}

/// Every graph the fixture sentences and the canonical base produce.
fn fixture_graphs() -> Vec<ConceptualGraph> {
    let res = Resources::fixture();
    let mut alloc = Allocator::new();
    let mut out = Vec::new();
    for (i, s) in FIXTURE_SENTENCES.iter().enumerate() {
        out.extend(analyze(s, &format!("R{}", i + 1), &res, &mut alloc).graphs);
    }
    for (_, text) in FIXTURE_BASE {
        out.push(ConceptualGraph::parse_linear(text).unwrap());
    }
    out
}

fn graph_strategy(types: &'static [&'static str], max_nodes: usize) -> impl Strategy<Value = ConceptualGraph> {
    (any::<u64>(), 1..=max_nodes).prop_map(move |(seed, nodes)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let concepts = rng.gen_range(1..=nodes);
        oracles::random_graph(&mut rng, types, concepts, nodes - concepts, 3)
    })
}

fn generic_count(g: &ConceptualGraph) -> usize {
    g.concepts().iter().filter(|c| c.referent == Referent::Generic).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_is_structure_preserving(g in graph_strategy(oracles::FLAT_TYPES, 10)) {
        prop_assert!(g.validate().is_ok());
        let f = phi(&g);
        prop_assert_eq!(f.atoms.len(), g.concepts().len() + g.relations().len());
        prop_assert_eq!(f.vars.len(), generic_count(&g));
        prop_assert!(f.validate().is_ok() || f.vars.is_empty());
        prop_assert_eq!(Formula::parse(&f.render(false)).unwrap(), f.clone());
        prop_assert_eq!(Formula::parse(&f.render(true)).unwrap(), f);
    }

    #[test]
    fn linear_form_round_trips(g in graph_strategy(oracles::FLAT_TYPES, 10)) {
        // The linear form names an individual by type and marker, so two such
        // concepts with equal labels denote one node.
        let mut individuals: Vec<_> = g.concepts().iter().filter(|c| !c.referent.is_generic()).map(|c| (&c.type_label, c.referent)).collect();
        let n = individuals.len();
        individuals.sort_by_key(|(t, r)| (t.to_string(), r.marker()));
        individuals.dedup();
        prop_assume!(individuals.len() == n);
        let back = ConceptualGraph::parse_linear(&g.to_linear()).unwrap();
        prop_assert!(oracles::isomorphic(&g, &back));
        prop_assert!(!phi(&back).render(false).is_empty());
    }

    #[test]
    fn projection_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qc = rng.gen_range(1..=3);
        let qr = rng.gen_range(0..=2);
        let tc = rng.gen_range(1..=3);
        let tr = rng.gen_range(0..=(8 - qc - qr - tc).min(3));
        let h = fixture_h();
        let q = oracles::random_graph(&mut rng, FIXTURE_TYPES, qc, qr, 2);
        let t = oracles::random_graph(&mut rng, FIXTURE_TYPES, tc, tr, 2);
        prop_assert_eq!(project(&q, &t, &h), oracles::brute_force_projections(&q, &t, &h));
    }

    #[test]
    fn phi_satisfiable_iff_projection_into_model(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = rng.gen_range(1..=6);
        let concepts = rng.gen_range(1..=nodes);
        let g = oracles::random_graph(&mut rng, oracles::FLAT_TYPES, concepts, nodes - concepts, 3);
        let size = rng.gen_range(3..=5);
        let model = oracles::random_model(&mut rng, size, 0.5);
        let canonical = oracles::canonical_graph(&model, 3);
        let h = oracles::flat_hierarchy();
        prop_assert_eq!(
            oracles::satisfiable(&phi(&g), &model),
            !project(&g, &canonical, &h).is_empty()
        );
    }

    #[test]
    fn join_counts_and_validity(a in graph_strategy(FIXTURE_TYPES, 6), b in graph_strategy(FIXTURE_TYPES, 6)) {
        let h = fixture_h();
        let j = join_with_maps(&a, &b, &h);
        prop_assert!(j.graph.validate().is_ok());
        prop_assert_eq!(j.graph.concepts().len(), a.concepts().len() + b.concepts().len() - j.merged.len());
        prop_assert_eq!(j.graph.relations().len(), a.relations().len() + b.relations().len());
        prop_assert_eq!(j.graph.arcs().len(), a.arcs().len() + b.arcs().len());
        let compatible = |x, y| {
            let (x, y) = (a.concept(x).unwrap(), b.concept(y).unwrap());
            x.type_label != UNKNOWN
                && y.type_label != UNKNOWN
                && h.meet_comparable(&x.type_label, &y.type_label).is_some()
                && x.referent.compatible(y.referent)
        };
        prop_assert_eq!(j.merged.len(), oracles::brute_force_max_matching(&a, &b, compatible));
        for (x, y) in &j.merged {
            prop_assert!(compatible(*x, *y));
        }
    }

    #[test]
    fn join_with_empty_is_identity(g in graph_strategy(FIXTURE_TYPES, 8)) {
        let h = fixture_h();
        prop_assert_eq!(join(&g, &ConceptualGraph::new(), &h), g.clone());
        prop_assert!(oracles::isomorphic(&join(&ConceptualGraph::new(), &g, &h), &g));
    }
}

#[test]
fn join_commutes_on_fixture_pairs() {
    let h = fixture_h();
    let graphs = fixture_graphs();
    for a in &graphs {
        for b in &graphs {
            let ab = join(a, b, &h);
            let ba = join(b, a, &h);
            assert!(oracles::isomorphic(&ab, &ba), "{}\n--\n{}", a.to_linear(), b.to_linear());
        }
    }
}

#[test]
fn fixture_graphs_are_valid_and_phi_is_injective() {
    let graphs = fixture_graphs();
    let h = fixture_h();
    for g in &graphs {
        g.validate().unwrap();
        g.validate_types(&h).unwrap();
        let f = phi(g);
        assert_eq!(f.atoms.len(), g.concepts().len() + g.relations().len());
        assert_eq!(f.vars.len(), generic_count(g));
    }
    for (i, a) in graphs.iter().enumerate() {
        for b in &graphs[i + 1..] {
            let mut fa = phi(a).atoms;
            let mut fb = phi(b).atoms;
            fa.sort();
            fb.sort();
            if !oracles::isomorphic(a, b) {
                assert_ne!(fa, fb, "{}\n--\n{}", a.to_linear(), b.to_linear());
            }
        }
    }
}
