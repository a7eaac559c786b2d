//! The generalization hierarchy over token classes.
//!
//! Leaves are token shapes (digit runs, letter runs, symbol runs and, when
//! decimal merging is on, decimal numbers). Every token can stay a literal
//! constant; its other generalizations are the nodes whose match-set contains
//! it. Fixed-length nodes are instantiated with the token length. Edges are
//! checked on load so that a parent's match-set always contains its child's.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::class::TokenClass;
use super::token::{Shape, Token, TokenizerOptions};

const DEFAULT_TOML: &str = include_str!("default_hierarchy.toml");

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("hierarchy config is not valid TOML: {0}")]
    Parse(String),
    #[error("unknown hierarchy node `{0}`")]
    UnknownNode(String),
    #[error("edge endpoint `{0}` is not listed in nodes")]
    UndeclaredNode(String),
    #[error("hierarchy must contain the `any` root and the digits/letters/symbols leaves")]
    MissingRequiredNode,
    #[error("leaf `decimal` is only allowed when merge_decimals = true (and then required)")]
    DecimalLeaf,
    #[error("invalid edge {0} -> {1}: {2}")]
    InvalidEdge(Node, Node, &'static str),
    #[error("hierarchy contains a cycle through `{0}`")]
    Cycle(Node),
    #[error("`any` is not reachable from `{0}`")]
    Unreachable(Node),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// A node of the hierarchy. Fixed-length nodes stand for the whole family
/// `<digit>{k}` etc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(Shape),
    DigitFixed,
    DigitPlus,
    Num,
    LetterFixed,
    LetterPlus,
    AlnumFixed,
    AlnumPlus,
    Any,
}

impl Node {
    pub fn name(self) -> &'static str {
        match self {
            Node::Leaf(s) => s.name(),
            Node::DigitFixed => "digit{k}",
            Node::DigitPlus => "digit+",
            Node::Num => "num",
            Node::LetterFixed => "letter{k}",
            Node::LetterPlus => "letter+",
            Node::AlnumFixed => "alphanum{k}",
            Node::AlnumPlus => "alphanum+",
            Node::Any => "any",
        }
    }

    pub fn from_name(name: &str) -> Option<Node> {
        Some(match name {
            "digit{k}" => Node::DigitFixed,
            "digit+" => Node::DigitPlus,
            "num" => Node::Num,
            "letter{k}" => Node::LetterFixed,
            "letter+" => Node::LetterPlus,
            "alphanum{k}" => Node::AlnumFixed,
            "alphanum+" => Node::AlnumPlus,
            "any" => Node::Any,
            other => return Shape::ALL.into_iter().find(|s| s.name() == other).map(Node::Leaf),
        })
    }

    /// The hierarchy node a class belongs to; `None` for literals.
    pub fn of_class(class: &TokenClass) -> Option<Node> {
        Some(match class {
            TokenClass::Const(_) => return None,
            TokenClass::DigitFixed(_) => Node::DigitFixed,
            TokenClass::DigitPlus => Node::DigitPlus,
            TokenClass::Num => Node::Num,
            TokenClass::LetterFixed(_) => Node::LetterFixed,
            TokenClass::LetterPlus => Node::LetterPlus,
            TokenClass::AlnumFixed(_) => Node::AlnumFixed,
            TokenClass::AlnumPlus => Node::AlnumPlus,
            TokenClass::Any => Node::Any,
        })
    }

    fn is_fixed(self) -> bool {
        matches!(self, Node::DigitFixed | Node::LetterFixed | Node::AlnumFixed)
    }

    /// Whether tokens of `shape` lie in this node's match-set.
    fn accepts(self, shape: Shape, merge_decimals: bool) -> bool {
        match self {
            Node::Leaf(s) => s == shape,
            Node::DigitFixed | Node::DigitPlus => shape == Shape::Digits,
            Node::Num => shape == Shape::Digits || (merge_decimals && shape == Shape::Decimal),
            Node::LetterFixed | Node::LetterPlus => shape == Shape::Letters,
            Node::AlnumFixed | Node::AlnumPlus => matches!(shape, Shape::Digits | Shape::Letters),
            Node::Any => true,
        }
    }

    fn instantiate(self, token: &Token<'_>) -> TokenClass {
        match self {
            Node::Leaf(_) => TokenClass::Const(token.text.to_owned()),
            Node::DigitFixed => TokenClass::DigitFixed(token.len()),
            Node::DigitPlus => TokenClass::DigitPlus,
            Node::Num => TokenClass::Num,
            Node::LetterFixed => TokenClass::LetterFixed(token.len()),
            Node::LetterPlus => TokenClass::LetterPlus,
            Node::AlnumFixed => TokenClass::AlnumFixed(token.len()),
            Node::AlnumPlus => TokenClass::AlnumPlus,
            Node::Any => TokenClass::Any,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct HierarchyFile {
    #[serde(default)]
    merge_decimals: bool,
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

/// A validated generalization DAG.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    merge_decimals: bool,
    nodes: BTreeSet<Node>,
    edges: BTreeSet<(Node, Node)>,
    depth: HashMap<Node, u32>,
    /// ancestor-or-self sets
    ancestors: HashMap<Node, BTreeSet<Node>>,
    /// non-leaf nodes whose match-set covers each shape, shallowest first
    reach: HashMap<Shape, Vec<Node>>,
    fingerprint: [u8; 32],
}

impl Default for Hierarchy {
    fn default() -> Self {
        Hierarchy::from_toml_str(DEFAULT_TOML).expect("embedded default hierarchy is valid")
    }
}

impl PartialEq for Hierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
    }
}

impl Hierarchy {
    /// The embedded default, with decimal merging switched on and `<num>`
    /// re-parented directly under `<any>`.
    pub fn default_with_decimals() -> Self {
        let text = DEFAULT_TOML
            .replace("merge_decimals = false", "merge_decimals = true")
            .replace("\"digits\", \"letters\", \"symbols\",", "\"digits\", \"letters\", \"symbols\", \"decimal\",")
            .replace("[\"num\", \"alphanum+\"]", "[\"num\", \"any\"],\n  [\"decimal\", \"num\"]");
        Hierarchy::from_toml_str(&text).expect("decimal variant of the default hierarchy is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, HierarchyError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| HierarchyError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HierarchyError> {
        let file: HierarchyFile = toml::from_str(text).map_err(|e| HierarchyError::Parse(e.to_string()))?;
        let node = |name: &str| Node::from_name(name).ok_or_else(|| HierarchyError::UnknownNode(name.to_owned()));
        let nodes = file.nodes.iter().map(|n| node(n)).collect::<Result<BTreeSet<_>, _>>()?;
        let mut edges = BTreeSet::new();
        for (child, parent) in &file.edges {
            let (c, p) = (node(child)?, node(parent)?);
            for n in [c, p] {
                if !nodes.contains(&n) {
                    return Err(HierarchyError::UndeclaredNode(n.name().to_owned()));
                }
            }
            edges.insert((c, p));
        }
        Self::new(file.merge_decimals, nodes, edges)
    }

    pub fn new(
        merge_decimals: bool,
        nodes: BTreeSet<Node>,
        edges: BTreeSet<(Node, Node)>,
    ) -> Result<Self, HierarchyError> {
        let required = [Node::Any, Node::Leaf(Shape::Digits), Node::Leaf(Shape::Letters), Node::Leaf(Shape::Symbols)];
        if required.iter().any(|n| !nodes.contains(n)) {
            return Err(HierarchyError::MissingRequiredNode);
        }
        if nodes.contains(&Node::Leaf(Shape::Decimal)) != merge_decimals {
            return Err(HierarchyError::DecimalLeaf);
        }
        let shapes: Vec<Shape> = Shape::ALL
            .into_iter()
            .filter(|s| merge_decimals || *s != Shape::Decimal)
            .collect();
        for &(c, p) in &edges {
            let invalid = |why| Err(HierarchyError::InvalidEdge(c, p, why));
            if c == p {
                return invalid("self loop");
            }
            if matches!(p, Node::Leaf(_)) {
                return invalid("leaves cannot be parents");
            }
            if c == Node::Any {
                return invalid("`any` is the root");
            }
            if shapes.iter().any(|&s| c.accepts(s, merge_decimals) && !p.accepts(s, merge_decimals)) {
                return invalid("parent does not contain the child's match-set");
            }
            if p.is_fixed() && !(c.is_fixed() || matches!(c, Node::Leaf(_))) {
                return invalid("a fixed-length node cannot generalize an unbounded one");
            }
        }

        let mut parents: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        let mut children: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
        for &(c, p) in &edges {
            parents.entry(c).or_default().push(p);
            children.entry(p).or_default().push(c);
        }

        // Kahn's algorithm for cycle detection and longest-path depths.
        let mut indegree: BTreeMap<Node, usize> =
            nodes.iter().map(|&n| (n, children.get(&n).map_or(0, Vec::len))).collect();
        let mut queue: Vec<Node> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut depth: HashMap<Node, u32> = HashMap::new();
        let mut order = Vec::new();
        while let Some(n) = queue.pop() {
            let d = match n {
                Node::Leaf(_) => 0,
                _ => children.get(&n).map_or(1, |cs| cs.iter().map(|c| depth[c] + 1).max().unwrap_or(1)),
            };
            depth.insert(n, d);
            order.push(n);
            for p in parents.get(&n).into_iter().flatten() {
                let e = indegree.get_mut(p).expect("declared");
                *e -= 1;
                if *e == 0 {
                    queue.push(*p);
                }
            }
        }
        if let Some(n) = nodes.iter().find(|n| !depth.contains_key(n)) {
            return Err(HierarchyError::Cycle(*n));
        }

        let mut ancestors: HashMap<Node, BTreeSet<Node>> = HashMap::new();
        for &n in order.iter().rev() {
            let mut set = BTreeSet::from([n]);
            for p in parents.get(&n).into_iter().flatten() {
                set.extend(ancestors[p].iter().copied());
            }
            ancestors.insert(n, set);
        }
        if let Some(n) = nodes.iter().find(|n| !ancestors[n].contains(&Node::Any)) {
            return Err(HierarchyError::Unreachable(*n));
        }

        let reach = shapes
            .iter()
            .map(|&s| {
                let mut up: Vec<Node> = nodes
                    .iter()
                    .copied()
                    .filter(|n| !matches!(n, Node::Leaf(_)) && n.accepts(s, merge_decimals))
                    .collect();
                up.sort_by_key(|n| (depth[n], *n));
                (s, up)
            })
            .collect();

        let mut h = Hierarchy {
            merge_decimals,
            nodes,
            edges,
            depth,
            ancestors,
            reach,
            fingerprint: [0; 32],
        };
        h.fingerprint = Sha256::digest(h.to_toml_string().as_bytes()).into();
        Ok(h)
    }

    /// Canonical serialization (sorted nodes and edges); also the fingerprint input.
    pub fn to_toml_string(&self) -> String {
        let file = HierarchyFile {
            merge_decimals: self.merge_decimals,
            nodes: self.nodes.iter().map(|n| n.name().to_owned()).collect(),
            edges: self.edges.iter().map(|(c, p)| (c.name().to_owned(), p.name().to_owned())).collect(),
        };
        toml::to_string(&file).expect("hierarchy serializes")
    }

    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    pub fn fingerprint_hex(&self) -> String {
        hex::encode(self.fingerprint)
    }

    pub fn tokenizer_options(&self) -> TokenizerOptions {
        TokenizerOptions { merge_decimals: self.merge_decimals }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.nodes.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, node: Node) -> bool {
        self.nodes.contains(&node)
    }

    /// `true` when `ancestor` is `node` or reachable from it.
    pub fn is_ancestor_or_self(&self, node: Node, ancestor: Node) -> bool {
        self.ancestors.get(&node).is_some_and(|a| a.contains(&ancestor))
    }

    /// Generalization depth of a class: literals are 0, nodes use their
    /// longest path from a leaf. Classes whose node is absent count as the root.
    pub fn depth_of(&self, class: &TokenClass) -> u32 {
        match Node::of_class(class) {
            None => 0,
            Some(n) => self.depth.get(&n).copied().unwrap_or_else(|| self.depth[&Node::Any]),
        }
    }

    /// All classes whose match-set contains `token`, shallowest first,
    /// starting with the literal and ending with `<any>`.
    pub fn generalizations(&self, token: &Token<'_>) -> Vec<TokenClass> {
        self.generalizations_with_depth(token).into_iter().map(|(c, _)| c).collect()
    }

    pub(crate) fn generalizations_with_depth(&self, token: &Token<'_>) -> Vec<(TokenClass, u32)> {
        let mut out = vec![(TokenClass::Const(token.text.to_owned()), 0)];
        if let Some(up) = self.reach.get(&token.shape()) {
            out.extend(up.iter().map(|n| (n.instantiate(token), self.depth[n])));
        }
        out
    }
}
