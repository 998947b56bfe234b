//! Diametrical graphs and complete multipartite recognition.
//!
//! The diametrical graph of a finite space joins two points exactly when
//! their distance equals the diameter. For ultrametric spaces with at least
//! two points this graph is always complete multipartite, and the sorted
//! part sizes classify it up to isomorphism.

use std::fmt;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// A simple undirected graph on labeled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    vertices: Vec<String>,
    adj: Vec<bool>,
}

impl SimpleGraph {
    pub fn new<S: AsRef<str>>(vertices: Vec<String>, edges: &[(S, S)]) -> Result<Self> {
        let n = vertices.len();
        let mut g = SimpleGraph { vertices, adj: vec![false; n * n] };
        for (a, b) in edges {
            let i = g.index(a.as_ref())?;
            let j = g.index(b.as_ref())?;
            if i == j {
                return Err(Error::InvalidTree(format!("loop at `{}`", a.as_ref())));
            }
            g.set(i, j);
        }
        Ok(g)
    }

    fn index(&self, label: &str) -> Result<usize> {
        self.vertices.iter().position(|v| v == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn set(&mut self, i: usize, j: usize) {
        let n = self.vertices.len();
        self.adj[i * n + j] = true;
        self.adj[j * n + i] = true;
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.vertices.len() + j]
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).count()
    }

    /// Index pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| self.adjacent(i, j))
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        self.edge_indices().map(|(i, j)| (self.vertices[i].clone(), self.vertices[j].clone())).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_indices().count()
    }

    /// On four vertices, 2-regular means a single 4-cycle.
    pub fn is_four_cycle(&self) -> bool {
        self.len() == 4 && (0..4).all(|i| self.degree(i) == 2)
    }

    /// DOT text with vertices and edges sorted by label.
    pub fn to_dot(&self, name: &str) -> String {
        let mut vs: Vec<&String> = self.vertices.iter().collect();
        vs.sort();
        let mut es: Vec<(String, String)> =
            self.edges().into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        es.sort();
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", name.replace('"', "\\\""));
        for v in vs {
            let _ = writeln!(out, "  \"{}\";", v.replace('"', "\\\""));
        }
        for (a, b) in es {
            let _ = writeln!(out, "  \"{}\" -- \"{}\";", a.replace('"', "\\\""), b.replace('"', "\\\""));
        }
        out.push_str("}\n");
        out
    }
}

/// `{u, v}` is an edge iff `u != v` and `d(u, v) = diam X`.
pub fn diametrical_graph(space: &FiniteMetricSpace) -> Result<SimpleGraph> {
    let n = space.len();
    if n < 2 {
        return Err(Error::SingletonSpace);
    }
    let diam = space.diameter();
    let mut g = SimpleGraph { vertices: space.points().to_vec(), adj: vec![false; n * n] };
    for i in 0..n {
        for j in (i + 1)..n {
            if *space.d(i, j) == diam {
                g.set(i, j);
            }
        }
    }
    Ok(g)
}

/// The partition of a complete multipartite graph, with part sizes sorted
/// ascending (ties broken by the first vertex of each part).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipartiteSignature {
    pub part_sizes: Vec<usize>,
    pub parts: Vec<Vec<String>>,
    part_indices: Vec<Vec<usize>>,
}

impl MultipartiteSignature {
    pub fn part_indices(&self) -> &[Vec<usize>] {
        &self.part_indices
    }
}

impl Serialize for MultipartiteSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Report<'a> {
            signature: &'a [usize],
            parts: &'a [Vec<String>],
        }
        Report { signature: &self.part_sizes, parts: &self.parts }.serialize(serializer)
    }
}

/// Recovers the parts as connected components of the complement and checks
/// that each is independent and fully joined to every other part.
#[allow(clippy::needless_range_loop)]
pub fn multipartite_signature(graph: &SimpleGraph) -> Option<MultipartiteSignature> {
    let n = graph.len();
    let mut component = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut members = vec![start];
        component[start] = id;
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            for w in 0..n {
                if w != u && !graph.adjacent(u, w) && component[w] == usize::MAX {
                    component[w] = id;
                    members.push(w);
                }
            }
            k += 1;
        }
        members.sort();
        parts.push(members);
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let same = component[i] == component[j];
            if same == graph.adjacent(i, j) {
                return None;
            }
        }
    }

    parts.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
    Some(MultipartiteSignature {
        part_sizes: parts.iter().map(Vec::len).collect(),
        parts: parts.iter().map(|p| p.iter().map(|&i| graph.vertices[i].clone()).collect()).collect(),
        part_indices: parts,
    })
}

/// The four complete multipartite graphs on four vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FourPointClass {
    K1111,
    K112,
    K13,
    K22,
}

impl FourPointClass {
    pub fn from_sizes(sizes: &[usize]) -> Option<Self> {
        match sizes {
            [1, 1, 1, 1] => Some(FourPointClass::K1111),
            [1, 1, 2] => Some(FourPointClass::K112),
            [1, 3] => Some(FourPointClass::K13),
            [2, 2] => Some(FourPointClass::K22),
            _ => None,
        }
    }

    pub fn sizes(self) -> &'static [usize] {
        match self {
            FourPointClass::K1111 => &[1, 1, 1, 1],
            FourPointClass::K112 => &[1, 1, 2],
            FourPointClass::K13 => &[1, 3],
            FourPointClass::K22 => &[2, 2],
        }
    }
}

impl fmt::Display for FourPointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FourPointClass::K1111 => "K1111",
            FourPointClass::K112 => "K112",
            FourPointClass::K13 => "K13",
            FourPointClass::K22 => "K22",
        };
        f.write_str(s)
    }
}

/// Classifies a four-point ultrametric space by its diametrical graph.
///
/// A non-ultrametric input whose diametrical graph is not complete
/// multipartite gets [`Error::NotCompleteMultipartite`], which certifies
/// non-ultrametricity on its own.
pub fn classify_four_point(space: &FiniteMetricSpace) -> Result<FourPointClass> {
    if space.len() != 4 {
        return Err(Error::WrongCardinality { expected: 4, found: space.len() });
    }
    let graph = diametrical_graph(space)?;
    let Some(sig) = multipartite_signature(&graph) else {
        return Err(Error::NotCompleteMultipartite);
    };
    space.require_ultrametric()?;
    FourPointClass::from_sizes(&sig.part_sizes)
        .ok_or_else(|| Error::Internal(format!("ultrametric quad has signature {:?}", sig.part_sizes)))
}

/// Class of an ultrametric quad given by indices, skipping validation.
pub(crate) fn classify_quad_unchecked(space: &FiniteMetricSpace, q: [usize; 4]) -> FourPointClass {
    let mut diam = space.d(q[0], q[1]);
    for a in 0..4 {
        for b in (a + 1)..4 {
            diam = diam.max(space.d(q[a], q[b]));
        }
    }
    // Ultrametric quads: the parts are the classes of "distance below diameter".
    let short: Vec<(usize, usize)> = (0..4)
        .flat_map(|a| ((a + 1)..4).map(move |b| (a, b)))
        .filter(|&(a, b)| space.d(q[a], q[b]) < diam)
        .collect();
    match short.len() {
        0 => FourPointClass::K1111,
        1 => FourPointClass::K112,
        2 => FourPointClass::K22,
        3 => FourPointClass::K13,
        k => unreachable!("ultrametric quad with {k} sub-diameter pairs"),
    }
}

/// Every 4-subset of point indices, in lexicographic order.
pub fn quads(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |a| {
        ((a + 1)..n).flat_map(move |b| ((b + 1)..n).flat_map(move |c| ((c + 1)..n).map(move |d| [a, b, c, d])))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn diametrical_graph_examples() {
        let g = diametrical_graph(&models::x4()).unwrap();
        assert_eq!(
            g.edges(),
            vec![("x1".into(), "x2".into()), ("x1".into(), "x4".into()), ("x2".into(), "x3".into()), ("x3".into(), "x4".into())]
        );
        assert!(g.is_four_cycle());

        let g = diametrical_graph(&models::e4()).unwrap();
        assert_eq!(g.edge_count(), 6);

        let g = diametrical_graph(&models::z4()).unwrap();
        assert_eq!(g.edges(), vec![("z1".into(), "z2".into()), ("z2".into(), "z3".into()), ("z2".into(), "z4".into())]);

        let single = FiniteMetricSpace::parse(&["p"], &[&["0"]]).unwrap();
        assert_eq!(diametrical_graph(&single), Err(Error::SingletonSpace));
    }

    #[test]
    fn signature_examples() {
        let sig = multipartite_signature(&diametrical_graph(&models::e4()).unwrap()).unwrap();
        assert_eq!(sig.part_sizes, vec![1, 1, 1, 1]);

        let sig = multipartite_signature(&diametrical_graph(&models::x4()).unwrap()).unwrap();
        assert_eq!(sig.part_sizes, vec![2, 2]);
        assert_eq!(sig.parts, vec![vec!["x1".to_string(), "x3".to_string()], vec!["x2".to_string(), "x4".to_string()]]);
        assert_eq!(
            serde_json::to_string(&sig).unwrap(),
            r#"{"signature":[2,2],"parts":[["x1","x3"],["x2","x4"]]}"#
        );

        let p3 = SimpleGraph::new(vec!["a".into(), "b".into(), "c".into()], &[("a", "b"), ("b", "c")]).unwrap();
        // a-b-c: complement has the single edge a-c, parts {a,c},{b}: this is K_{1,2}.
        assert_eq!(multipartite_signature(&p3).unwrap().part_sizes, vec![1, 2]);

        let p4 = SimpleGraph::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[("a", "b"), ("b", "c"), ("c", "d")],
        )
        .unwrap();
        assert_eq!(multipartite_signature(&p4), None);
    }

    #[test]
    fn three_vertex_path_plus_isolated_is_not_multipartite() {
        let g = SimpleGraph::new(vec!["a".into(), "b".into(), "c".into()], &[("a", "b")]).unwrap();
        assert_eq!(multipartite_signature(&g), None);
    }

    #[test]
    fn four_point_classes() {
        assert_eq!(classify_four_point(&models::x4()), Ok(FourPointClass::K22));
        assert_eq!(classify_four_point(&models::y4()), Ok(FourPointClass::K22));
        assert_eq!(classify_four_point(&models::w4()), Ok(FourPointClass::K112));
        assert_eq!(classify_four_point(&models::s4()), Ok(FourPointClass::K13));
        assert_eq!(classify_four_point(&models::z4()), Ok(FourPointClass::K13));
        assert_eq!(classify_four_point(&models::e4()), Ok(FourPointClass::K1111));
        for (_, m) in models::all() {
            assert_eq!(classify_quad_unchecked(&m, [0, 1, 2, 3]), classify_four_point(&m).unwrap());
        }
    }

    #[test]
    fn four_point_errors() {
        let s3 = models::s4().restrict(&["s1", "s2", "s3"]).unwrap();
        assert_eq!(classify_four_point(&s3), Err(Error::WrongCardinality { expected: 4, found: 3 }));

        // diameter pairs a-b, b-c, c-d only: a path, not multipartite
        let bad = FiniteMetricSpace::parse(
            &["a", "b", "c", "d"],
            &[&["0", "3", "2", "2"], &["3", "0", "3", "2"], &["2", "3", "0", "3"], &["2", "2", "3", "0"]],
        )
        .unwrap();
        assert_eq!(classify_four_point(&bad), Err(Error::NotCompleteMultipartite));

        // multipartite diametrical graph but still not ultrametric
        let sneaky = FiniteMetricSpace::parse(
            &["a", "b", "c", "d"],
            &[&["0", "1", "2", "3"], &["1", "0", "2", "3"], &["2", "2", "0", "3"], &["3", "3", "3", "0"]],
        )
        .unwrap();
        let mut rows = sneaky.rows();
        rows[0][2] = "1".parse().unwrap();
        rows[2][0] = "1".parse().unwrap();
        let sneaky = FiniteMetricSpace::new(sneaky.points().to_vec(), rows).unwrap();
        assert!(matches!(classify_four_point(&sneaky), Err(Error::NotUltrametric(_))));
    }

    #[test]
    fn quads_are_lexicographic() {
        let all: Vec<_> = quads(5).collect();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0], [0, 1, 2, 3]);
        assert_eq!(all[4], [1, 2, 3, 4]);
        assert_eq!(quads(3).count(), 0);
    }
}
