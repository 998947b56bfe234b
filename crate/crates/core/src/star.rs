//! Labeled trees, labeled star graphs and the ultrametric they generate.
//!
//! A labeling `l` of a tree induces `d_l(u, v)`: the largest label on the
//! unique `u`–`v` path (endpoints included), and 0 on the diagonal. It is an
//! ultrametric exactly when no edge has two endpoints labeled 0.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::FiniteMetricSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    vertices: Vec<String>,
    /// Index pairs `(u, v)` with `u < v`, sorted.
    edges: Vec<(usize, usize)>,
    labels: Vec<Rational>,
}

impl LabeledTree {
    pub fn new<S: AsRef<str>>(vertices: Vec<String>, edges: &[(S, S)], labels: Vec<Rational>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        if labels.len() != vertices.len() {
            return Err(Error::InvalidTree(format!(
                "{} labels for {} vertices",
                labels.len(),
                vertices.len()
            )));
        }
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateLabel(v.clone()));
            }
        }
        for (v, l) in vertices.iter().zip(&labels) {
            if l.is_negative() {
                return Err(Error::NegativeLabel { vertex: v.clone(), value: l.clone() });
            }
        }
        let index = |s: &str| {
            vertices.iter().position(|v| v == s).ok_or_else(|| Error::UnknownLabel(s.to_string()))
        };
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (u, v) = (index(a.as_ref())?, index(b.as_ref())?);
            if u == v {
                return Err(Error::InvalidTree(format!("loop at `{}`", vertices[u])));
            }
            idx_edges.push((u.min(v), u.max(v)));
        }
        idx_edges.sort();
        if idx_edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTree("repeated edge".into()));
        }
        if idx_edges.len() + 1 != vertices.len() {
            return Err(Error::InvalidTree(format!(
                "{} edges for {} vertices",
                idx_edges.len(),
                vertices.len()
            )));
        }
        let tree = LabeledTree { vertices, edges: idx_edges, labels };
        let reached = tree.bfs_order(0).len();
        if reached != tree.vertices.len() {
            return Err(Error::InvalidTree("not connected".into()));
        }
        Ok(tree)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn labels(&self) -> &[Rational] {
        &self.labels
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|&(u, v)| (self.vertices[u].as_str(), self.vertices[v].as_str()))
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn bfs_order(&self, root: usize) -> Vec<(usize, usize)> {
        let adj = self.neighbors();
        let mut parent = vec![usize::MAX; self.vertices.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([root]);
        parent[root] = root;
        while let Some(u) = queue.pop_front() {
            order.push((u, parent[u]));
            for &w in &adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// The first edge (in sorted order) whose endpoints both carry label 0.
    pub fn degenerate_edge(&self) -> Option<(String, String)> {
        self.edges
            .iter()
            .find(|&&(u, v)| self.labels[u].is_zero() && self.labels[v].is_zero())
            .map(|&(u, v)| (self.vertices[u].clone(), self.vertices[v].clone()))
    }

    /// The path-maximum ultrametric `d_l` on the vertex set.
    pub fn tree_metric(&self) -> Result<FiniteMetricSpace> {
        if let Some((u, v)) = self.degenerate_edge() {
            return Err(Error::DegenerateLabeling { u, v });
        }
        let n = self.vertices.len();
        let mut table = vec![Rational::zero(); n * n];
        for root in 0..n {
            let mut path_max = vec![Rational::zero(); n];
            for (u, parent) in self.bfs_order(root) {
                path_max[u] = if u == root {
                    self.labels[u].clone()
                } else {
                    path_max[parent].clone().max(self.labels[u].clone())
                };
            }
            table[root * n..(root + 1) * n].clone_from_slice(&path_max);
        }
        FiniteMetricSpace::from_fn(self.vertices.clone(), |i, j| table[i * n + j].clone())
    }

    /// The hub of a star. For two or fewer vertices every vertex qualifies
    /// and the first is returned.
    pub fn star_center(&self) -> Option<&str> {
        let n = self.vertices.len();
        if n <= 2 {
            return Some(&self.vertices[0]);
        }
        let adj = self.neighbors();
        (0..n).find(|&u| adj[u].len() == n - 1).map(|u| self.vertices[u].as_str())
    }

    pub fn to_dot(&self, name: &str) -> String {
        let center = self.star_center().filter(|_| self.vertices.len() > 2);
        dot(name, &self.vertices, &self.labels, self.edges(), center)
    }
}

pub fn is_nondegenerate(tree: &LabeledTree) -> Option<(String, String)> {
    tree.degenerate_edge()
}

pub fn tree_metric(tree: &LabeledTree) -> Result<FiniteMetricSpace> {
    tree.tree_metric()
}

pub fn is_star(tree: &LabeledTree) -> Option<String> {
    tree.star_center().map(str::to_string)
}

/// A labeled star graph: a center adjacent to every leaf and no other edges.
///
/// The vertex order is kept so that reconstructing a star from a space
/// reproduces that space's matrix exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledStarGraph {
    vertices: Vec<String>,
    labels: Vec<Rational>,
    center: usize,
}

impl LabeledStarGraph {
    /// A star with the center listed first, then the leaves in order.
    pub fn new(center: &str, center_label: Rational, leaves: Vec<(String, Rational)>) -> Result<Self> {
        let mut vertices = vec![center.to_string()];
        let mut labels = vec![center_label];
        for (leaf, label) in leaves {
            vertices.push(leaf);
            labels.push(label);
        }
        LabeledStarGraph::with_order(vertices, labels, 0)
    }

    pub fn with_order(vertices: Vec<String>, labels: Vec<Rational>, center: usize) -> Result<Self> {
        if vertices.is_empty() || center >= vertices.len() {
            return Err(Error::InvalidTree("star needs a center vertex".into()));
        }
        if labels.len() != vertices.len() {
            return Err(Error::InvalidTree("label count differs from vertex count".into()));
        }
        let mut seen = HashSet::new();
        for (v, l) in vertices.iter().zip(&labels) {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateLabel(v.clone()));
            }
            if l.is_negative() {
                return Err(Error::NegativeLabel { vertex: v.clone(), value: l.clone() });
            }
        }
        Ok(LabeledStarGraph { vertices, labels, center })
    }

    pub fn center(&self) -> &str {
        &self.vertices[self.center]
    }

    pub fn center_label(&self) -> &Rational {
        &self.labels[self.center]
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn labels(&self) -> &[Rational] {
        &self.labels
    }

    pub fn label_of(&self, vertex: &str) -> Option<&Rational> {
        self.vertices.iter().position(|v| v == vertex).map(|i| &self.labels[i])
    }

    /// Leaves with their labels, in vertex order.
    pub fn leaves(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.vertices
            .iter()
            .zip(&self.labels)
            .enumerate()
            .filter(move |(i, _)| *i != self.center)
            .map(|(_, (v, l))| (v.as_str(), l))
    }

    /// The first leaf that shares label 0 with a zero-labeled center.
    pub fn degenerate_leaf(&self) -> Option<&str> {
        if !self.center_label().is_zero() {
            return None;
        }
        self.leaves().find(|(_, l)| l.is_zero()).map(|(v, _)| v)
    }

    pub fn to_tree(&self) -> LabeledTree {
        let c = self.center().to_string();
        let edges: Vec<(String, String)> = self.leaves().map(|(leaf, _)| (c.clone(), leaf.to_string())).collect();
        LabeledTree::new(self.vertices.clone(), &edges, self.labels.clone()).expect("a star is a tree")
    }

    /// `d(leaf_i, leaf_j) = max(l(i), l(j), l(c))`, `d(c, leaf) = max(l(leaf), l(c))`.
    pub fn star_metric(&self) -> Result<FiniteMetricSpace> {
        if let Some(leaf) = self.degenerate_leaf() {
            return Err(Error::DegenerateLabeling { u: self.center().to_string(), v: leaf.to_string() });
        }
        let c = self.center;
        let lc = &self.labels[c];
        FiniteMetricSpace::from_fn(self.vertices.clone(), |i, j| {
            let m = self.labels[i].clone().max(self.labels[j].clone());
            if i == c || j == c {
                m
            } else {
                m.max(lc.clone())
            }
        })
    }

    /// The sub-star keeping the center and the given leaves, in vertex order.
    pub fn sub_star<S: AsRef<str>>(&self, leaves: &[S]) -> Result<LabeledStarGraph> {
        let keep: HashSet<&str> = leaves.iter().map(|s| s.as_ref()).collect();
        for leaf in &keep {
            if !self.vertices.iter().any(|v| v == leaf) {
                return Err(Error::UnknownLabel(leaf.to_string()));
            }
        }
        let mut vertices = Vec::new();
        let mut labels = Vec::new();
        let mut center = 0;
        for (i, (v, l)) in self.vertices.iter().zip(&self.labels).enumerate() {
            if i == self.center {
                center = vertices.len();
            } else if !keep.contains(v.as_str()) {
                continue;
            }
            vertices.push(v.clone());
            labels.push(l.clone());
        }
        LabeledStarGraph::with_order(vertices, labels, center)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let edges = self.leaves().map(|(leaf, _)| (self.center(), leaf));
        dot(name, &self.vertices, &self.labels, edges, Some(self.center()))
    }
}

pub fn star_metric(star: &LabeledStarGraph) -> Result<FiniteMetricSpace> {
    star.star_metric()
}

/// First pair `(x, y)` with `x0 != x != y` and `d(x0, x) > d(y, x)`,
/// scanning `y` in the outer loop.
pub fn center_violation(space: &FiniteMetricSpace, x0: usize) -> Option<(usize, usize)> {
    let n = space.len();
    for y in 0..n {
        if y == x0 {
            continue;
        }
        for x in 0..n {
            if x == x0 || x == y {
                continue;
            }
            if space.d(x0, x) > space.d(y, x) {
                return Some((x, y));
            }
        }
    }
    None
}

/// The star with center `x0`, center label 0 and leaf labels `d(x, x0)`.
pub fn star_from_center(space: &FiniteMetricSpace, x0: &str) -> Result<LabeledStarGraph> {
    space.require_ultrametric()?;
    let c = space.require_index(x0)?;
    if let Some((x, y)) = center_violation(space, c) {
        return Err(Error::NotACenter {
            center: x0.to_string(),
            x: space.label(x).to_string(),
            y: space.label(y).to_string(),
        });
    }
    let labels = (0..space.len()).map(|i| space.d(i, c).clone()).collect();
    LabeledStarGraph::with_order(space.points().to_vec(), labels, c)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot<'a>(
    name: &str,
    vertices: &[String],
    labels: &[Rational],
    edges: impl Iterator<Item = (&'a str, &'a str)>,
    center: Option<&str>,
) -> String {
    let mut nodes: Vec<(&String, &Rational)> = vertices.iter().zip(labels).collect();
    nodes.sort();
    let mut edges: Vec<(&str, &str)> = edges.map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
    edges.sort();

    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", dot_escape(name));
    for (v, l) in nodes {
        let shape = if Some(v.as_str()) == center { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  \"{}\" [label=\"{} ({})\"{}];", dot_escape(v), dot_escape(v), l, shape);
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", dot_escape(a), dot_escape(b));
    }
    out.push_str("}\n");
    out
}

/// JSON shape: `{ "center": "c", "center_label": "0", "leaves": {"a": "1", ...} }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarFile {
    pub center: String,
    pub center_label: Rational,
    #[serde(serialize_with = "ser_leaves", deserialize_with = "de_leaves")]
    pub leaves: Vec<(String, Rational)>,
}

fn ser_leaves<S: Serializer>(leaves: &[(String, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(leaves.len()))?;
    for (k, v) in leaves {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

fn de_leaves<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(String, Rational)>, D::Error> {
    struct LeafVisitor;
    impl<'de> Visitor<'de> for LeafVisitor {
        type Value = Vec<(String, Rational)>;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a map from leaf labels to rational strings")
        }
        fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
            let mut out: Vec<(String, Rational)> = Vec::new();
            while let Some((k, v)) = map.next_entry::<String, Rational>()? {
                if out.iter().any(|(seen, _)| *seen == k) {
                    return Err(serde::de::Error::custom(format!("duplicate leaf `{k}`")));
                }
                out.push((k, v));
            }
            Ok(out)
        }
    }
    d.deserialize_map(LeafVisitor)
}

impl From<&LabeledStarGraph> for StarFile {
    fn from(star: &LabeledStarGraph) -> Self {
        StarFile {
            center: star.center().to_string(),
            center_label: star.center_label().clone(),
            leaves: star.leaves().map(|(v, l)| (v.to_string(), l.clone())).collect(),
        }
    }
}

impl TryFrom<StarFile> for LabeledStarGraph {
    type Error = Error;
    fn try_from(file: StarFile) -> Result<Self> {
        LabeledStarGraph::new(&file.center, file.center_label, file.leaves)
    }
}

impl Serialize for LabeledStarGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StarFile::from(self).serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn star(center: &str, cl: &str, leaves: &[(&str, &str)]) -> LabeledStarGraph {
        LabeledStarGraph::new(center, r(cl), leaves.iter().map(|(v, l)| (v.to_string(), r(l))).collect()).unwrap()
    }

    fn path(labels: [&str; 3]) -> LabeledTree {
        LabeledTree::new(
            vec!["u".into(), "v".into(), "w".into()],
            &[("u", "v"), ("v", "w")],
            labels.iter().map(|s| r(s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn nondegeneracy_examples() {
        assert_eq!(is_nondegenerate(&star("c", "0", &[("a", "1"), ("b", "2"), ("d", "3")]).to_tree()), None);
        assert_eq!(
            is_nondegenerate(&star("c", "0", &[("a", "1"), ("b", "0")]).to_tree()),
            Some(("c".into(), "b".into()))
        );
        assert_eq!(is_nondegenerate(&path(["1", "0", "1"])), None);
    }

    #[test]
    fn tree_metric_examples() {
        let m = tree_metric(&star("c", "0", &[("a", "1"), ("b", "2")]).to_tree()).unwrap();
        assert_eq!(m.distance("a", "b").unwrap(), &r("2"));
        assert_eq!(m.distance("c", "a").unwrap(), &r("1"));
        assert_eq!(m.distance("c", "b").unwrap(), &r("2"));

        let m = tree_metric(&star("c", "5", &[("a", "1"), ("b", "2")]).to_tree()).unwrap();
        for (x, y) in [("a", "b"), ("a", "c"), ("b", "c")] {
            assert_eq!(m.distance(x, y).unwrap(), &r("5"));
        }

        let m = tree_metric(&path(["1", "0", "1"])).unwrap();
        assert_eq!(m.distance("u", "w").unwrap(), &r("1"));
        assert_eq!(m.distance("u", "v").unwrap(), &r("1"));
        assert_eq!(m.distance("v", "w").unwrap(), &r("1"));
        assert!(m.validate().is_ultrametric);

        let deg = star("c", "0", &[("a", "0"), ("b", "1")]).to_tree();
        assert!(matches!(tree_metric(&deg), Err(Error::DegenerateLabeling { .. })));
    }

    #[test]
    fn longer_path_takes_interior_maximum() {
        let t = LabeledTree::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[("a", "b"), ("b", "c"), ("c", "d")],
            vec![r("1"), r("4"), r("0"), r("2")],
        )
        .unwrap();
        let m = t.tree_metric().unwrap();
        assert_eq!(m.distance("a", "d").unwrap(), &r("4"));
        assert_eq!(m.distance("c", "d").unwrap(), &r("2"));
        assert!(m.validate().is_ultrametric);
        assert_eq!(is_star(&t), None);
    }

    #[test]
    fn star_metric_examples() {
        let s = star("s1", "0", &[("s2", "3"), ("s3", "1"), ("s4", "2")]);
        assert_eq!(star_metric(&s).unwrap(), models::s4());

        let e = star("c", "0", &[("a", "1"), ("b", "1"), ("d", "1")]);
        let m = star_metric(&e).unwrap();
        assert!(m.spectrum().positive() == [r("1")]);

        let m = star_metric(&star("c", "2", &[("a", "1"), ("b", "1")])).unwrap();
        for (x, y) in [("a", "b"), ("a", "c"), ("b", "c")] {
            assert_eq!(m.distance(x, y).unwrap(), &r("2"));
        }
    }

    #[test]
    fn star_from_center_examples() {
        let s4 = models::s4();
        let st = star_from_center(&s4, "s1").unwrap();
        assert_eq!(st.center(), "s1");
        assert_eq!(st.center_label(), &r("0"));
        assert_eq!(st.label_of("s2"), Some(&r("3")));
        assert_eq!(st.label_of("s3"), Some(&r("1")));
        assert_eq!(st.label_of("s4"), Some(&r("2")));
        assert_eq!(st.star_metric().unwrap(), s4);

        let e4 = models::e4();
        let st = star_from_center(&e4, "p1").unwrap();
        assert!(st.leaves().all(|(_, l)| *l == r("1")));
        assert_eq!(st.star_metric().unwrap(), e4);

        match star_from_center(&models::x4(), "x1") {
            Err(Error::NotACenter { x, y, .. }) => assert_eq!((x.as_str(), y.as_str()), ("x4", "x2")),
            other => panic!("expected NotACenter, got {other:?}"),
        }
    }

    #[test]
    fn center_in_the_middle_keeps_point_order() {
        let w4 = models::w4();
        let st = star_from_center(&w4, "w3").unwrap();
        assert_eq!(st.vertices(), w4.points());
        assert_eq!(st.star_metric().unwrap(), w4);
    }

    #[test]
    fn is_star_examples() {
        let hub = star("h", "0", &[("a", "1"), ("b", "1"), ("c", "1")]).to_tree();
        assert_eq!(is_star(&hub), Some("h".into()));
        let p4 = LabeledTree::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[("a", "b"), ("b", "c"), ("c", "d")],
            vec![r("1"); 4],
        )
        .unwrap();
        assert_eq!(is_star(&p4), None);
        let two = LabeledTree::new(vec!["q".into(), "p".into()], &[("q", "p")], vec![r("1"), r("1")]).unwrap();
        assert_eq!(is_star(&two), Some("q".into()));
    }

    #[test]
    fn invalid_trees_are_rejected() {
        let v = |n: usize| (0..n).map(|i| format!("v{i}")).collect::<Vec<_>>();
        assert!(LabeledTree::new(v(3), &[("v0", "v1")], vec![r("1"); 3]).is_err());
        assert!(LabeledTree::new(v(3), &[("v0", "v1"), ("v1", "v0")], vec![r("1"); 3]).is_err());
        assert!(LabeledTree::new(v(4), &[("v0", "v1"), ("v1", "v0"), ("v2", "v3")], vec![r("1"); 4]).is_err());
        assert!(LabeledTree::new(v(2), &[("v0", "v0")], vec![r("1"); 2]).is_err());
        assert!(LabeledTree::new(v(2), &[("v0", "v1")], vec![r("1"), r("-1")]).is_err());
    }

    #[test]
    fn star_json_keeps_leaf_order() {
        let s = star("c", "0", &[("z", "1"), ("a", "1/2")]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"center":"c","center_label":"0","leaves":{"z":"1","a":"1/2"}}"#);
        let file: StarFile = serde_json::from_str(&json).unwrap();
        assert_eq!(LabeledStarGraph::try_from(file).unwrap(), s);
        assert!(serde_json::from_str::<StarFile>(r#"{"center":"c","center_label":"0","leaves":{"a":"1","a":"2"}}"#)
            .is_err());
    }

    #[test]
    fn dot_is_sorted() {
        let s = star("c", "0", &[("z", "1"), ("a", "2")]);
        let dot = s.to_dot("S");
        assert_eq!(
            dot,
            "graph \"S\" {\n  \"a\" [label=\"a (2)\"];\n  \"c\" [label=\"c (0)\", shape=doublecircle];\n  \"z\" [label=\"z (1)\"];\n  \"a\" -- \"c\";\n  \"c\" -- \"z\";\n}\n"
        );
    }
}
