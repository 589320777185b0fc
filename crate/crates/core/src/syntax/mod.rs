//! Constituent grammar, chart parsing and f-structure derivation.
//!
//! Grammar files hold one rule per line in the form `lhs -> rhs1 rhs2 ...`.
//! A `*` suffix marks a repeated item, so `np -> np*` reads "an np is a
//! sequence of one or more nps".

mod earley;
mod fstructure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{LexCategory, LexicalEntry, Token};

pub use earley::{parse, ParseError, MAX_PARSES};
pub use fstructure::{derive_fstructure, FStructure, FStructureError, FValue, Feature, Number};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    S,
    Vp,
    Np,
    V,
    N,
    P,
    D,
    Adj,
    Adv,
    Aux,
    Conj,
}

impl Category {
    pub const ALL: [Category; 11] = [
        Category::S,
        Category::Vp,
        Category::Np,
        Category::V,
        Category::N,
        Category::P,
        Category::D,
        Category::Adj,
        Category::Adv,
        Category::Aux,
        Category::Conj,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::S => "s",
            Category::Vp => "vp",
            Category::Np => "np",
            Category::V => "v",
            Category::N => "n",
            Category::P => "p",
            Category::D => "d",
            Category::Adj => "adj",
            Category::Adv => "adv",
            Category::Aux => "aux",
            Category::Conj => "conj",
        }
    }

    /// Symbols used by the seven base rules; the rest are extensions.
    pub fn is_base_symbol(self) -> bool {
        matches!(
            self,
            Category::S | Category::Vp | Category::Np | Category::V | Category::N | Category::P | Category::D
        )
    }

    pub fn of_lexical(cat: LexCategory) -> Category {
        match cat {
            LexCategory::Noun => Category::N,
            LexCategory::Verb => Category::V,
            LexCategory::Preposition => Category::P,
            LexCategory::Determiner => Category::D,
            LexCategory::Adjective => Category::Adj,
            LexCategory::Adverb => Category::Adv,
            LexCategory::Auxiliary => Category::Aux,
            LexCategory::Conjunction => Category::Conj,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category symbol `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RhsItem {
    pub category: Category,
    pub starred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrammarRule {
    pub lhs: Category,
    pub rhs: Vec<RhsItem>,
}

impl GrammarRule {
    pub fn new(lhs: Category, rhs: &[(Category, bool)]) -> Self {
        GrammarRule {
            lhs,
            rhs: rhs.iter().map(|&(category, starred)| RhsItem { category, starred }).collect(),
        }
    }

    pub fn starred_index(&self) -> Option<usize> {
        self.rhs.iter().position(|item| item.starred)
    }
}

impl fmt::Display for GrammarRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for item in &self.rhs {
            write!(f, " {}{}", item.category, if item.starred { "*" } else { "" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("grammar line {line}: {message}")]
pub struct GrammarSyntaxError {
    pub line: usize,
    pub message: String,
}

pub fn load_grammar(text: &str) -> Result<Vec<GrammarRule>, GrammarSyntaxError> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| GrammarSyntaxError { line: idx + 1, message };
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| err(format!("expected `lhs -> rhs`, got `{line}`")))?;
        let lhs: Category = lhs.trim().parse().map_err(err)?;
        let mut items = Vec::new();
        for word in rhs.split_whitespace() {
            let (name, starred) = match word.strip_suffix('*') {
                Some(name) => (name, true),
                None => (word, false),
            };
            items.push(RhsItem { category: name.parse().map_err(err)?, starred });
        }
        if items.is_empty() {
            return Err(err("empty right-hand side".into()));
        }
        if items.iter().filter(|i| i.starred).count() > 1 {
            return Err(err("at most one starred item per rule".into()));
        }
        rules.push(GrammarRule { lhs, rhs: items });
    }
    Ok(rules)
}

pub fn render_grammar(rules: &[GrammarRule]) -> String {
    rules.iter().map(|r| format!("{r}\n")).collect()
}

/// A lexical leaf: the token and the lexicon entry chosen for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub token: Token,
    pub entry: LexicalEntry,
}

/// Constituent tree. Leaves carry a preterminal category plus their token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CStructure {
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<Leaf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CStructure>,
}

impl CStructure {
    pub fn node(category: Category, children: Vec<CStructure>) -> Self {
        CStructure { category, leaf: None, children }
    }

    pub fn leaf(category: Category, token: Token, entry: LexicalEntry) -> Self {
        CStructure { category, leaf: Some(Leaf { token, entry }), children: Vec::new() }
    }

    /// Tokens under this node, left to right.
    pub fn yield_tokens(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_yield(&mut out);
        out
    }

    fn collect_yield<'a>(&'a self, out: &mut Vec<&'a Token>) {
        if let Some(leaf) = &self.leaf {
            out.push(&leaf.token);
        }
        for c in &self.children {
            c.collect_yield(out);
        }
    }

    pub fn lemma(&self) -> Option<&str> {
        self.leaf.as_ref().map(|l| l.entry.lemma.as_str())
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(CStructure::depth).max().unwrap_or(0)
    }
}

/// Bracketed form, e.g. `s(vp(v:access), np(p:to, d:the, n:interior))`.
impl fmt::Display for CStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(leaf) = &self.leaf {
            return write!(f, "{}:{}", self.category, leaf.token.surface);
        }
        write!(f, "{}(", self.category)?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}
