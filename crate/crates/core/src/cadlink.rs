//! Neutral CAD bill of materials and `IF condition THEN action` check rules.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::TypeHierarchy;
use crate::zspec::ZSchema;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Part,
    Assembly,
}

impl std::str::FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "part" => Ok(NodeKind::Part),
            "assembly" => Ok(NodeKind::Assembly),
            _ => Err(format!("unknown component kind `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Number(f64),
    Quantity { value: f64, unit: String },
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BomNode {
    pub name: String,
    pub kind: NodeKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub children: Vec<BomNode>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CadError {
    #[error("component `{0}` has no resolvable parent or root assembly")]
    OrphanComponent(String),
    #[error("containment cycle through {0:?}")]
    CyclicStructure(Vec<String>),
    #[error("duplicate component name `{0}`")]
    DuplicateName(String),
    #[error("part `{0}` cannot have children")]
    PartHasChildren(String),
    #[error("several root components: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("type `{0}` matches no BOM node")]
    UnboundType(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid BOM document: {0}")]
    Json(String),
}

impl BomNode {
    pub fn new(name: &str, kind: NodeKind) -> Self {
        BomNode { name: name.to_string(), kind, parameters: BTreeMap::new(), children: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self, CadError> {
        let node: BomNode = serde_json::from_str(text).map_err(|e| CadError::Json(e.to_string()))?;
        node.validate()?;
        Ok(node)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("BOM serializes")
    }

    pub fn validate(&self) -> Result<(), CadError> {
        if self.kind == NodeKind::Part && !self.children.is_empty() {
            return Err(CadError::PartHasChildren(self.name.clone()));
        }
        let mut seen = HashSet::new();
        for c in &self.children {
            if !seen.insert(c.name.as_str()) {
                return Err(CadError::DuplicateName(c.name.clone()));
            }
            c.validate()?;
        }
        Ok(())
    }

    /// Node at a dotted path starting with this node's name.
    pub fn find(&self, path: &[&str]) -> Option<&BomNode> {
        let (first, rest) = path.split_first()?;
        if *first != self.name {
            return None;
        }
        match rest.first() {
            None => Some(self),
            Some(_) => self.children.iter().find_map(|c| c.find(rest)),
        }
    }

    pub fn find_mut(&mut self, path: &[&str]) -> Option<&mut BomNode> {
        let (first, rest) = path.split_first()?;
        if *first != self.name {
            return None;
        }
        if rest.is_empty() {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(rest))
    }

    /// Dotted path of the first node (pre-order) named `name`.
    pub fn path_of(&self, name: &str) -> Option<String> {
        if self.name == name {
            return Some(self.name.clone());
        }
        self.children.iter().find_map(|c| c.path_of(name)).map(|p| format!("{}.{p}", self.name))
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        usize::from(self.kind == kind) + self.children.iter().map(|c| c.count(kind)).sum::<usize>()
    }

    pub fn set_parameter(&mut self, path: &str, value: ParamValue) -> bool {
        let segments: Vec<&str> = path.split('.').collect();
        let Some((param, node)) = segments.split_last() else { return false };
        match self.find_mut(node) {
            Some(n) => {
                n.parameters.insert(param.to_string(), value);
                true
            }
            None => false,
        }
    }

    fn parameter(&self, path: &[&str]) -> Option<&ParamValue> {
        let (param, node) = path.split_last()?;
        self.find(node)?.parameters.get(*param)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub kind: NodeKind,
    pub parent: Option<String>,
    pub type_label: Option<String>,
}

/// Parses `name<TAB>kind<TAB>parent<TAB>type` lines; `-` marks an absent field.
pub fn parse_components(text: &str) -> Result<Vec<Component>, CadError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| CadError::Syntax { line: idx + 1, message };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let opt = |s: &str| (s != "-").then(|| s.to_string());
        out.push(Component {
            name: fields[0].to_string(),
            kind: fields[1].parse().map_err(err)?,
            parent: opt(fields[2]),
            type_label: opt(fields[3]),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltBom {
    pub root: BomNode,
    pub warnings: Vec<String>,
}

/// Assembles the containment tree. Component types not below `component`
/// in the hierarchy are accepted with a warning.
pub fn build_bom(components: &[Component], h: &TypeHierarchy) -> Result<BuiltBom, CadError> {
    let mut by_name: IndexMap<&str, &Component> = IndexMap::new();
    for c in components {
        if by_name.insert(c.name.as_str(), c).is_some() {
            return Err(CadError::DuplicateName(c.name.clone()));
        }
    }
    for c in components {
        if let Some(p) = &c.parent {
            if !by_name.contains_key(p.as_str()) {
                return Err(CadError::OrphanComponent(c.name.clone()));
            }
        }
    }
    for c in components {
        let mut trail = vec![c.name.clone()];
        let mut at = c;
        while let Some(p) = &at.parent {
            if trail.contains(p) {
                trail.push(p.clone());
                return Err(CadError::CyclicStructure(trail));
            }
            trail.push(p.clone());
            at = by_name[p.as_str()];
        }
    }
    let roots: Vec<&Component> = components.iter().filter(|c| c.parent.is_none()).collect();
    match roots.as_slice() {
        [] => return Err(CadError::OrphanComponent(String::new())),
        [root] if root.kind != NodeKind::Assembly => return Err(CadError::OrphanComponent(root.name.clone())),
        [_] => {}
        many => return Err(CadError::MultipleRoots(many.iter().map(|c| c.name.clone()).collect())),
    }
    let mut children: HashMap<&str, Vec<&Component>> = HashMap::new();
    for c in components {
        if let Some(p) = &c.parent {
            if by_name[p.as_str()].kind == NodeKind::Part {
                return Err(CadError::PartHasChildren(p.clone()));
            }
            children.entry(p.as_str()).or_default().push(c);
        }
    }
    fn assemble(c: &Component, children: &HashMap<&str, Vec<&Component>>) -> BomNode {
        let mut node = BomNode::new(&c.name, c.kind);
        for child in children.get(c.name.as_str()).into_iter().flatten() {
            node.children.push(assemble(child, children));
        }
        node
    }
    let mut warnings = Vec::new();
    for c in components {
        if let Some(ty) = &c.type_label {
            if !h.leq(ty, "component") {
                warnings.push(format!("`{}` has type `{ty}`, which is not a component", c.name));
            }
        }
    }
    Ok(BuiltBom { root: assemble(roots[0], &children), warnings })
}

/// Z type to BOM node path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    map: IndexMap<String, String>,
}

impl Bindings {
    pub fn parse(text: &str) -> Result<Self, CadError> {
        let mut map = IndexMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (ty, path) = line.split_once('\t').ok_or_else(|| CadError::Syntax {
                line: idx + 1,
                message: format!("expected `TYPE<TAB>path`, got `{line}`"),
            })?;
            map.insert(ty.trim().to_string(), path.trim().to_string());
        }
        Ok(Bindings { map })
    }

    /// Explicit binding, else a node named after the type.
    pub fn resolve(&self, z_type: &str, bom: &BomNode) -> Option<String> {
        if let Some(p) = self.map.get(z_type) {
            let segments: Vec<&str> = p.split('.').collect();
            return bom.find(&segments).map(|_| p.clone());
        }
        bom.path_of(&z_type.to_lowercase().replace('_', "-"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    #[default]
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRule {
    pub name: String,
    pub condition: Expr,
    pub message: String,
    #[serde(default)]
    pub severity: Severity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Expr {
    Or { left: Box<Expr>, right: Box<Expr> },
    And { left: Box<Expr>, right: Box<Expr> },
    Not { expr: Box<Expr> },
    Cmp { left: Box<Expr>, cmp: CmpOp, right: Box<Expr> },
    Path { path: String },
    Literal { value: ParamValue },
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Or { left, right } => write!(f, "({left} or {right})"),
            Expr::And { left, right } => write!(f, "({left} and {right})"),
            Expr::Not { expr } => write!(f, "not {expr}"),
            Expr::Cmp { left, cmp, right } => {
                let side = |e: &Expr| match e {
                    Expr::Path { .. } | Expr::Literal { .. } | Expr::Or { .. } | Expr::And { .. } => e.to_string(),
                    _ => format!("({e})"),
                };
                write!(f, "{} {} {}", side(left), cmp.as_str(), side(right))
            }
            Expr::Path { path } => f.write_str(path),
            Expr::Literal { value } => match value {
                ParamValue::Bool(b) => write!(f, "{b}"),
                ParamValue::Number(n) => write!(f, "{n}"),
                ParamValue::Quantity { value, unit } => write!(f, "{value}{unit}"),
                ParamValue::Text(t) => write!(f, "{t:?}"),
            },
        }
    }
}

impl fmt::Display for CheckRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RULE {}: IF {} THEN {:?}", self.name, self.condition, self.message)?;
        if self.severity == Severity::Warning {
            f.write_str(" SEVERITY warning")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64, String),
    Str(String),
    Op(CmpOp),
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.';
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '"' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') => {
                            text.push(*chars.get(i + 1).ok_or("dangling escape")?);
                            i += 2;
                        }
                        Some(&c) => {
                            text.push(c);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Tok::Str(text));
            }
            '=' | '!' | '<' | '>' => {
                let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
                let (op, len) = match two.as_str() {
                    "==" => (CmpOp::Eq, 2),
                    "!=" => (CmpOp::Ne, 2),
                    "<=" => (CmpOp::Le, 2),
                    ">=" => (CmpOp::Ge, 2),
                    _ if c == '<' => (CmpOp::Lt, 1),
                    _ if c == '>' => (CmpOp::Gt, 1),
                    _ => return Err(format!("bad operator at `{two}`")),
                };
                out.push(Tok::Op(op));
                i += len;
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                let value = num.parse().map_err(|_| format!("bad number `{num}`"))?;
                let ustart = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push(Tok::Num(value, chars[ustart..i].iter().collect()));
            }
            c if is_ident(c) => {
                let start = i;
                while i < chars.len() && is_ident(chars[i]) {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct ExprParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl ExprParser {
    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.toks.get(self.pos), Some(Tok::Ident(w)) if w == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Expr, String> {
        let mut left = self.and()?;
        while self.keyword("or") {
            left = Expr::Or { left: Box::new(left), right: Box::new(self.and()?) };
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Expr, String> {
        let mut left = self.not()?;
        while self.keyword("and") {
            left = Expr::And { left: Box::new(left), right: Box::new(self.not()?) };
        }
        Ok(left)
    }

    fn not(&mut self) -> Result<Expr, String> {
        if self.keyword("not") {
            return Ok(Expr::Not { expr: Box::new(self.not()?) });
        }
        let left = self.primary()?;
        if let Some(Tok::Op(cmp)) = self.toks.get(self.pos) {
            let cmp = *cmp;
            self.pos += 1;
            let right = self.primary()?;
            return Ok(Expr::Cmp { left: Box::new(left), cmp, right: Box::new(right) });
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Expr, String> {
        let tok = self.toks.get(self.pos).cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        Ok(match tok {
            Tok::LParen => {
                let e = self.or()?;
                if self.toks.get(self.pos) != Some(&Tok::RParen) {
                    return Err("expected `)`".into());
                }
                self.pos += 1;
                e
            }
            Tok::Num(value, unit) if unit.is_empty() => Expr::Literal { value: ParamValue::Number(value) },
            Tok::Num(value, unit) => Expr::Literal { value: ParamValue::Quantity { value, unit } },
            Tok::Str(s) => Expr::Literal { value: ParamValue::Text(s) },
            Tok::Ident(w) if w == "true" => Expr::Literal { value: ParamValue::Bool(true) },
            Tok::Ident(w) if w == "false" => Expr::Literal { value: ParamValue::Bool(false) },
            Tok::Ident(w) if ["and", "or", "not"].contains(&w.as_str()) => {
                return Err(format!("unexpected keyword `{w}`"))
            }
            Tok::Ident(w) => Expr::Path { path: w },
            other => return Err(format!("unexpected token {other:?}")),
        })
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, String> {
    let mut p = ExprParser { toks: tokenize(text)?, pos: 0 };
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing tokens in `{text}`"));
    }
    Ok(e)
}

/// Parses a rule file: `RULE <name>: IF <expr> THEN "<message>"` per line,
/// optionally followed by `SEVERITY warning|error`.
pub fn parse_rules(text: &str) -> Result<Vec<CheckRule>, CadError> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| CadError::Syntax { line: idx + 1, message };
        let rest = line.strip_prefix("RULE ").ok_or_else(|| err("expected `RULE`".into()))?;
        let (name, rest) = rest.split_once(':').ok_or_else(|| err("expected `:` after rule name".into()))?;
        let rest = rest.trim().strip_prefix("IF ").ok_or_else(|| err("expected `IF`".into()))?;
        let (cond, action) = rest.rsplit_once(" THEN ").ok_or_else(|| err("expected `THEN`".into()))?;
        let action = action.trim();
        let (message, severity) = match action.rsplit_once(" SEVERITY ") {
            Some((m, "warning")) => (m.trim(), Severity::Warning),
            Some((m, "error")) => (m.trim(), Severity::Error),
            Some((_, other)) => return Err(err(format!("unknown severity `{other}`"))),
            None => (action, Severity::Error),
        };
        let message = match tokenize(message).map_err(&err)?.as_slice() {
            [Tok::Str(s)] => s.clone(),
            _ => return Err(err("THEN must be followed by a quoted message".into())),
        };
        rules.push(CheckRule {
            name: name.trim().to_string(),
            condition: parse_expr(cond).map_err(err)?,
            message,
            severity,
        });
    }
    Ok(rules)
}

pub fn render_rules(rules: &[CheckRule]) -> String {
    rules.iter().map(|r| format!("{r}\n")).collect()
}

/// One rule per predicate line: the flag named after the predicate must be
/// set on the node bound to the line's last argument.
pub fn emit_check_rules(schemas: &[ZSchema], bom: &BomNode, bindings: &Bindings) -> Result<Vec<CheckRule>, CadError> {
    let mut rules = Vec::new();
    for s in schemas {
        let mut paths: HashMap<&str, String> = HashMap::new();
        for d in &s.signature {
            let z = d.z_type();
            let path = bindings.resolve(&z, bom).ok_or(CadError::UnboundType(z))?;
            paths.insert(d.name.as_str(), path);
        }
        for (i, p) in s.predicates.iter().enumerate() {
            let idx = i + 1;
            let Some(node) = p.args.last().and_then(|a| paths.get(a.as_str())) else { continue };
            rules.push(CheckRule {
                name: format!("{}_{idx}", s.name),
                condition: Expr::Cmp {
                    left: Box::new(Expr::Path { path: format!("{node}.{}", p.predicate) }),
                    cmp: CmpOp::Eq,
                    right: Box::new(Expr::Literal { value: ParamValue::Bool(true) }),
                },
                message: format!("requirement {}.{idx} violated", s.name),
                severity: Severity::Error,
            });
        }
    }
    Ok(rules)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unresolved { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleResult {
    pub rule: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub message: String,
    pub severity: Severity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub results: Vec<RuleResult>,
}

impl Report {
    pub fn count(&self, f: impl Fn(&Verdict) -> bool) -> usize {
        self.results.iter().filter(|r| f(&r.verdict)).count()
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn render(&self) -> String {
        self.results
            .iter()
            .map(|r| match &r.verdict {
                Verdict::Pass => format!("PASS {}\n", r.rule),
                Verdict::Fail => format!("FAIL {}: {}\n", r.rule, r.message),
                Verdict::Unresolved { reason } => format!("UNRESOLVED {}: {reason}\n", r.rule),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Bool(bool),
    Num(f64, String),
    Text(String),
}

fn eval(e: &Expr, bom: &BomNode) -> Result<Value, String> {
    let boolean = |e: &Expr| match eval(e, bom)? {
        Value::Bool(b) => Ok(b),
        other => Err(format!("`{e}` is {other:?}, not a boolean")),
    };
    Ok(match e {
        Expr::Or { left, right } => Value::Bool(boolean(left)? || boolean(right)?),
        Expr::And { left, right } => Value::Bool(boolean(left)? && boolean(right)?),
        Expr::Not { expr } => Value::Bool(!boolean(expr)?),
        Expr::Path { path } => {
            let segments: Vec<&str> = path.split('.').collect();
            match bom.parameter(&segments) {
                Some(v) => literal(v),
                None => return Err(format!("unresolved parameter `{path}`")),
            }
        }
        Expr::Literal { value } => literal(value),
        Expr::Cmp { left, cmp, right } => {
            let (l, r) = (eval(left, bom)?, eval(right, bom)?);
            let ord = match (&l, &r) {
                (Value::Num(a, ua), Value::Num(b, ub)) if ua == ub || ua.is_empty() || ub.is_empty() => a.partial_cmp(b),
                (Value::Bool(a), Value::Bool(b)) if matches!(cmp, CmpOp::Eq | CmpOp::Ne) => Some(a.cmp(b)),
                (Value::Text(a), Value::Text(b)) if matches!(cmp, CmpOp::Eq | CmpOp::Ne) => Some(a.cmp(b)),
                _ => None,
            };
            let ord = ord.ok_or_else(|| format!("cannot compare {l:?} {} {r:?}", cmp.as_str()))?;
            use std::cmp::Ordering::*;
            Value::Bool(match cmp {
                CmpOp::Eq => ord == Equal,
                CmpOp::Ne => ord != Equal,
                CmpOp::Lt => ord == Less,
                CmpOp::Le => ord != Greater,
                CmpOp::Gt => ord == Greater,
                CmpOp::Ge => ord != Less,
            })
        }
    })
}

fn literal(v: &ParamValue) -> Value {
    match v {
        ParamValue::Bool(b) => Value::Bool(*b),
        ParamValue::Number(n) => Value::Num(*n, String::new()),
        ParamValue::Quantity { value, unit } => Value::Num(*value, unit.clone()),
        ParamValue::Text(t) => Value::Text(t.clone()),
    }
}

/// Evaluates every rule against the BOM's parameters, in rule order.
pub fn evaluate(rules: &[CheckRule], bom: &BomNode) -> Report {
    let results = rules
        .iter()
        .map(|r| {
            let verdict = match eval(&r.condition, bom) {
                Ok(Value::Bool(true)) => Verdict::Pass,
                Ok(Value::Bool(false)) => Verdict::Fail,
                Ok(other) => Verdict::Unresolved { reason: format!("condition yields {other:?}") },
                Err(reason) => Verdict::Unresolved { reason },
            };
            RuleResult { rule: r.name.clone(), verdict, message: r.message.clone(), severity: r.severity }
        })
        .collect();
    Report { results }
}
