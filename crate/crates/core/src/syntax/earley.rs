//! Earley chart parser over the rule set, followed by tree enumeration.
//!
//! A starred item `X*` is rewritten into a private list symbol with the
//! right-recursive rules `L -> X` and `L -> X L`; trees are flattened back so
//! the repeated items appear as siblings.
//!
//! Tree enumeration admits a finite, canonical tree set:
//! - a symbol may not rederive itself over the same span (no unary cycles);
//! - an item repeated by a starred rule may not itself be built by that same
//!   rule (`np(np(a, b), c)` and `np(a, b, c)` describe one sequence).

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{CStructure, Category, GrammarRule};
use crate::lexicon::{lemmatize, LexicalEntry, Lexicon, Token};

/// Upper bound on the number of trees returned for one sentence.
pub const MAX_PARSES: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("no parse; the chart reached token position {reached}")]
    NoParse { reached: usize },
    #[error("nothing to parse")]
    EmptyInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sym {
    Cat(Category),
    /// Repetition list introduced for the starred item of user rule `n`.
    List(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    User(usize),
    ListOne,
    ListMore,
}

struct InternalRule {
    lhs: Sym,
    rhs: Vec<Sym>,
    origin: Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Item {
    rule: usize,
    dot: usize,
    start: usize,
}

struct Chart<'a> {
    rules: Vec<InternalRule>,
    by_lhs: HashMap<Sym, Vec<usize>>,
    /// (lexical category, entry) options per token.
    lexical: Vec<Vec<(Category, &'a LexicalEntry)>>,
    /// Completed (rule, start, end) triples indexed by (lhs, start, end).
    complete: HashMap<(Sym, usize, usize), Vec<usize>>,
    tokens: &'a [Token],
}

fn internal_rules(grammar: &[GrammarRule]) -> Vec<InternalRule> {
    let mut out = Vec::new();
    for (idx, rule) in grammar.iter().enumerate() {
        let rhs = rule
            .rhs
            .iter()
            .map(|item| if item.starred { Sym::List(idx) } else { Sym::Cat(item.category) })
            .collect();
        out.push(InternalRule { lhs: Sym::Cat(rule.lhs), rhs, origin: Origin::User(idx) });
        if let Some(star) = rule.starred_index() {
            let item = Sym::Cat(rule.rhs[star].category);
            out.push(InternalRule { lhs: Sym::List(idx), rhs: vec![item], origin: Origin::ListOne });
            out.push(InternalRule {
                lhs: Sym::List(idx),
                rhs: vec![item, Sym::List(idx)],
                origin: Origin::ListMore,
            });
        }
    }
    out
}

/// Parses `tokens` and returns every tree rooted at `s`, in leftmost-derivation order.
///
/// Leftmost-derivation order compares the rule indices met in a pre-order walk
/// of each tree, so a tree built from earlier grammar lines sorts first.
pub fn parse(tokens: &[Token], lexicon: &Lexicon, grammar: &[GrammarRule]) -> Result<Vec<CStructure>, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let resolved: Vec<Vec<LexicalEntry>> = tokens
        .iter()
        .map(|t| {
            let lemma = lemmatize(t, lexicon);
            let entries = lexicon.lookup(&lemma);
            if entries.is_empty() {
                vec![LexicalEntry::unknown(&lemma)]
            } else {
                entries.to_vec()
            }
        })
        .collect();
    let lexical = resolved
        .iter()
        .map(|entries| entries.iter().map(|e| (Category::of_lexical(e.category), e)).collect())
        .collect();

    let rules = internal_rules(grammar);
    let mut by_lhs: HashMap<Sym, Vec<usize>> = HashMap::new();
    for (i, r) in rules.iter().enumerate() {
        by_lhs.entry(r.lhs).or_default().push(i);
    }
    let mut chart = Chart { rules, by_lhs, lexical, complete: HashMap::new(), tokens };
    let reached = chart.recognize();

    let n = tokens.len();
    let mut trees = Vec::new();
    let mut stack = Vec::new();
    for t in chart.trees(Sym::Cat(Category::S), 0, n, &mut stack) {
        if let Some(tree) = t.flatten(&chart, None) {
            trees.push(tree);
        }
        if trees.len() >= MAX_PARSES {
            break;
        }
    }
    if trees.is_empty() {
        return Err(ParseError::NoParse { reached });
    }
    trees.sort_by(|a, b| a.1.cmp(&b.1));
    trees.dedup_by(|a, b| a.1 == b.1);
    Ok(trees.into_iter().map(|(tree, _)| tree).collect())
}

impl<'a> Chart<'a> {
    fn is_lexical(&self, cat: Category, pos: usize) -> bool {
        self.lexical.get(pos).is_some_and(|opts| opts.iter().any(|(c, _)| *c == cat))
    }

    /// Runs the recognizer and returns the rightmost position with a live chart set.
    fn recognize(&mut self) -> usize {
        let n = self.tokens.len();
        let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
        let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
        let push = |sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>, k: usize, item: Item| {
            if seen[k].insert(item) {
                sets[k].push(item);
            }
        };
        for &r in self.by_lhs.get(&Sym::Cat(Category::S)).into_iter().flatten() {
            push(&mut sets, &mut seen, 0, Item { rule: r, dot: 0, start: 0 });
        }
        let mut reached = 0;
        for k in 0..=n {
            if !sets[k].is_empty() {
                reached = k;
            }
            let mut i = 0;
            while i < sets[k].len() {
                let item = sets[k][i];
                i += 1;
                let rule = &self.rules[item.rule];
                match rule.rhs.get(item.dot).copied() {
                    None => {
                        self.complete.entry((rule.lhs, item.start, k)).or_default().push(item.rule);
                        let waiting: Vec<Item> = sets[item.start]
                            .iter()
                            .filter(|w| self.rules[w.rule].rhs.get(w.dot) == Some(&rule.lhs))
                            .copied()
                            .collect();
                        for w in waiting {
                            push(&mut sets, &mut seen, k, Item { dot: w.dot + 1, ..w });
                        }
                    }
                    Some(next) => {
                        for &r in self.by_lhs.get(&next).into_iter().flatten() {
                            push(&mut sets, &mut seen, k, Item { rule: r, dot: 0, start: k });
                        }
                        if let Sym::Cat(cat) = next {
                            if k < n && self.is_lexical(cat, k) {
                                push(&mut sets, &mut seen, k + 1, Item { dot: item.dot + 1, ..item });
                            }
                        }
                    }
                }
            }
        }
        reached
    }

    fn derives(&self, sym: Sym, from: usize, to: usize) -> bool {
        if let Sym::Cat(cat) = sym {
            if to == from + 1 && self.is_lexical(cat, from) {
                return true;
            }
        }
        self.complete.contains_key(&(sym, from, to))
    }

    /// Every way of cutting `from..to` into consecutive spans for `rhs`.
    fn splits(&self, rhs: &[Sym], from: usize, to: usize) -> Vec<Vec<(Sym, usize, usize)>> {
        let Some((&first, rest)) = rhs.split_first() else {
            return if from == to { vec![Vec::new()] } else { Vec::new() };
        };
        let mut out = Vec::new();
        let max_end = to.saturating_sub(rest.len());
        for mid in from + 1..=max_end {
            if !self.derives(first, from, mid) {
                continue;
            }
            for mut tail in self.splits(rest, mid, to) {
                tail.insert(0, (first, from, mid));
                out.push(tail);
            }
        }
        out
    }

    fn trees(&self, sym: Sym, from: usize, to: usize, stack: &mut Vec<(Sym, usize, usize)>) -> Vec<RawTree> {
        if stack.contains(&(sym, from, to)) {
            return Vec::new();
        }
        let mut out = Vec::new();
        if let Sym::Cat(cat) = sym {
            if to == from + 1 {
                for (idx, (c, _)) in self.lexical[from].iter().enumerate() {
                    if *c == cat {
                        out.push(RawTree::Leaf { category: cat, pos: from, entry: idx });
                    }
                }
            }
        }
        let Some(rules) = self.complete.get(&(sym, from, to)) else {
            return out;
        };
        let mut rules = rules.clone();
        rules.sort_unstable();
        rules.dedup();
        stack.push((sym, from, to));
        for r in rules {
            for split in self.splits(&self.rules[r].rhs, from, to) {
                let mut combos: Vec<Vec<RawTree>> = vec![Vec::new()];
                for &(child, a, b) in &split {
                    let options = self.trees(child, a, b, stack);
                    if options.is_empty() {
                        combos.clear();
                        break;
                    }
                    combos = combos
                        .into_iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |opt| {
                                let mut next = prefix.clone();
                                next.push(opt.clone());
                                next
                            })
                        })
                        .collect();
                    if combos.len() > MAX_PARSES {
                        combos.truncate(MAX_PARSES);
                    }
                }
                out.extend(combos.into_iter().map(|children| RawTree::Node { rule: r, children }));
            }
        }
        stack.pop();
        out
    }
}

#[derive(Clone, Debug)]
enum RawTree {
    Leaf { category: Category, pos: usize, entry: usize },
    Node { rule: usize, children: Vec<RawTree> },
}

/// Pre-order key: user rule indices for phrases, entry indices for leaves.
type OrderKey = Vec<(u8, usize, usize)>;

impl RawTree {
    /// Converts to a user-facing tree, expanding list symbols. `None` when the
    /// tree nests a starred rule directly inside its own repetition.
    fn flatten(&self, chart: &Chart<'_>, parent_star_rule: Option<usize>) -> Option<(CStructure, OrderKey)> {
        match self {
            RawTree::Leaf { category, pos, entry } => {
                let (_, e) = chart.lexical[*pos][*entry];
                let tree = CStructure::leaf(*category, chart.tokens[*pos].clone(), e.clone());
                Some((tree, vec![(1, *entry, *pos)]))
            }
            RawTree::Node { rule, children } => {
                let internal = &chart.rules[*rule];
                let Origin::User(user_idx) = internal.origin else {
                    unreachable!("list nodes are expanded by their parent")
                };
                if parent_star_rule == Some(user_idx) {
                    return None;
                }
                let Sym::Cat(category) = internal.lhs else { unreachable!() };
                let mut key = vec![(0, user_idx, 0)];
                let mut out = Vec::new();
                for child in children {
                    match child {
                        RawTree::Node { rule, .. } if matches!(chart.rules[*rule].lhs, Sym::List(_)) => {
                            for item in child.list_items(chart) {
                                let (tree, k) = item.flatten(chart, Some(user_idx))?;
                                key.extend(k);
                                out.push(tree);
                            }
                        }
                        _ => {
                            let (tree, k) = child.flatten(chart, None)?;
                            key.extend(k);
                            out.push(tree);
                        }
                    }
                }
                key.push((2, 0, 0));
                Some((CStructure::node(category, out), key))
            }
        }
    }

    fn list_items<'t>(&'t self, chart: &Chart<'_>) -> Vec<&'t RawTree> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            let RawTree::Node { rule, children } = cur else { unreachable!() };
            match chart.rules[*rule].origin {
                Origin::ListOne => {
                    items.push(&children[0]);
                    return items;
                }
                Origin::ListMore => {
                    items.push(&children[0]);
                    cur = &children[1];
                }
                Origin::User(_) => unreachable!(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::segment;
    use crate::resources::{FIXTURE_GRAMMAR, FIXTURE_LEXICON, BASE_GRAMMAR};
    use crate::syntax::load_grammar;

    fn lex() -> Lexicon {
        Lexicon::parse(FIXTURE_LEXICON).unwrap()
    }

    fn parse_str(text: &str, grammar: &str) -> Result<Vec<CStructure>, ParseError> {
        let tokens = segment(text, "t").unwrap();
        parse(&tokens, &lex(), &load_grammar(grammar).unwrap())
    }

    #[test]
    fn access_sentence_has_one_flat_tree_under_base_rules() {
        let trees = parse_str("access to the interior of the car for the driver", BASE_GRAMMAR).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(
            trees[0].to_string(),
            "s(vp(v:access), np(np(p:to, d:the, n:interior), np(p:of, d:the, n:car), np(p:for, d:the, n:driver)))"
        );
    }

    #[test]
    fn smallest_derivation() {
        let trees = parse_str("rotate", "s -> vp\nvp -> v").unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "s(vp(v:rotate))");
    }

    #[test]
    fn no_parse_reports_reached_position() {
        assert_eq!(parse_str("the the the", BASE_GRAMMAR), Err(ParseError::NoParse { reached: 0 }));
        // "open to the" stops after the determiner.
        assert_eq!(parse_str("open to the", BASE_GRAMMAR), Err(ParseError::NoParse { reached: 3 }));
        assert_eq!(parse_str("rotate", ""), Err(ParseError::NoParse { reached: 0 }));
    }

    #[test]
    fn fixture_grammar_orders_base_parse_first() {
        let trees = parse_str("access to the interior of the car", FIXTURE_GRAMMAR).unwrap();
        assert!(trees.len() > 1);
        assert_eq!(
            trees[0].to_string(),
            "s(vp(v:access), np(np(p:to, d:the, n:interior), np(p:of, d:the, n:car)))"
        );
    }

    #[test]
    fn modal_and_coordination_sentences() {
        let trees = parse_str("a driver must open the door", FIXTURE_GRAMMAR).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "s(np(d:a, n:driver), aux:must, vp(v:open, np(d:the, n:door)))");
        let trees = parse_str("A driver must be able to open and close the door", FIXTURE_GRAMMAR).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(
            trees[0].to_string(),
            "s(np(d:a, n:driver), aux:must, vp(v:be, adj:able, p:to, vp(v:open, conj:and, v:close, np(d:the, n:door))))"
        );
    }

    #[test]
    fn yield_matches_tokens() {
        let tokens = segment("the hinge must rotate the door around the body", "t").unwrap();
        for tree in parse(&tokens, &lex(), &load_grammar(FIXTURE_GRAMMAR).unwrap()).unwrap() {
            let y: Vec<_> = tree.yield_tokens().into_iter().cloned().collect();
            assert_eq!(y, tokens);
        }
    }
}
