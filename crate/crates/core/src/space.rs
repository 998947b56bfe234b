//! Finite metric spaces with exact rational distances.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite metric space `(X, d)`: ordered unique labels plus a symmetric
/// distance matrix with zero diagonal and positive off-diagonal entries.
///
/// Construction validates every metric axiom except the triangle
/// inequality, which [`FiniteMetricSpace::validate`] reports separately.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Rational>,
}

/// The distance set of a space: sorted distinct values starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    pub values: Vec<Rational>,
    pub diameter: Rational,
}

impl Spectrum {
    /// The distance set without the leading 0.
    pub fn positive(&self) -> &[Rational] {
        &self.values[1..]
    }

    /// Index of `value` in the sorted distance set.
    pub fn rank_of(&self, value: &Rational) -> Option<usize> {
        self.values.binary_search(value).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    /// `d(x,y) <= d(x,z) + d(z,y)`
    Triangle,
    /// `d(x,y) <= max(d(x,z), d(z,y))`
    StrongTriangle,
}

/// A triple `(x, z, y)` for which `d(x, y)` exceeds the bound through `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleViolation {
    pub kind: InequalityKind,
    /// Path order: `x`, the intermediate point `z`, then `y`.
    pub triple: [String; 3],
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for TriangleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, z, y] = &self.triple;
        let op = match self.kind {
            InequalityKind::Triangle => "sum",
            InequalityKind::StrongTriangle => "max",
        };
        write!(f, "d({x},{y}) = {} > {op}(d({x},{z}), d({z},{y})) = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UltraDiagnosis {
    pub is_metric: bool,
    pub is_ultrametric: bool,
    pub violation: Option<TriangleViolation>,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::with_capacity(n);
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::DuplicateLabel(p.clone()));
            }
        }
        if rows.len() != n {
            return Err(Error::RowCountMismatch { expected: n, found: rows.len() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RowLengthMismatch { row: i, expected: n, found: row.len() });
            }
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return Err(Error::NonzeroDiagonal { point: points[i].clone(), value: rows[i][i].clone() });
            }
            for j in 0..n {
                if rows[i][j].is_negative() {
                    return Err(Error::NegativeEntry {
                        a: points[i].clone(),
                        b: points[j].clone(),
                        value: rows[i][j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Asymmetric {
                        a: points[i].clone(),
                        b: points[j].clone(),
                        ab: rows[i][j].clone(),
                        ba: rows[j][i].clone(),
                    });
                }
                if rows[i][j].is_zero() {
                    return Err(Error::ZeroDistance { a: points[i].clone(), b: points[j].clone() });
                }
            }
        }
        let dist = rows.into_iter().flatten().collect();
        Ok(FiniteMetricSpace { points, dist })
    }

    /// Builds a space from a distance function on point indices. Only the
    /// upper triangle is queried.
    #[allow(clippy::needless_range_loop)]
    pub fn from_fn<F>(points: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Rational,
    {
        let n = points.len();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                rows[j][i] = v.clone();
                rows[i][j] = v;
            }
        }
        FiniteMetricSpace::new(points, rows)
    }

    /// Convenience constructor from labels and integer/`p/q`/decimal strings.
    pub fn parse(points: &[&str], rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|s| s.parse::<Rational>().map_err(Error::from)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        FiniteMetricSpace::new(points.iter().map(|s| s.to_string()).collect(), rows)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a space has at least one point.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub(crate) fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.points.len() + j]
    }

    pub fn distance(&self, a: &str, b: &str) -> Result<&Rational> {
        Ok(self.d(self.require_index(a)?, self.require_index(b)?))
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    /// Same matrix under new labels.
    pub fn relabel(&self, points: Vec<String>) -> Result<Self> {
        FiniteMetricSpace::new(points, self.rows())
    }

    /// Applies `f` to every off-diagonal distance.
    pub fn map_distances<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Rational) -> Rational,
    {
        FiniteMetricSpace::from_fn(self.points.clone(), |i, j| f(self.d(i, j)))
    }

    /// Checks the triangle and strong triangle inequalities over all ordered
    /// triples, reporting the first failure in point order.
    pub fn validate(&self) -> UltraDiagnosis {
        let n = self.len();
        let mut ultra_violation = None;
        for x in 0..n {
            for z in 0..n {
                for y in 0..n {
                    if x == z || z == y || x == y {
                        continue;
                    }
                    let lhs = self.d(x, y);
                    let sum = self.d(x, z) + self.d(z, y);
                    if *lhs > sum {
                        return UltraDiagnosis {
                            is_metric: false,
                            is_ultrametric: false,
                            violation: Some(self.violation(InequalityKind::Triangle, x, z, y, sum)),
                        };
                    }
                    if ultra_violation.is_none() {
                        let max = self.d(x, z).max(self.d(z, y));
                        if lhs > max {
                            ultra_violation =
                                Some(self.violation(InequalityKind::StrongTriangle, x, z, y, max.clone()));
                        }
                    }
                }
            }
        }
        UltraDiagnosis { is_metric: true, is_ultrametric: ultra_violation.is_none(), violation: ultra_violation }
    }

    fn violation(&self, kind: InequalityKind, x: usize, z: usize, y: usize, rhs: Rational) -> TriangleViolation {
        TriangleViolation {
            kind,
            triple: [self.points[x].clone(), self.points[z].clone(), self.points[y].clone()],
            lhs: self.d(x, y).clone(),
            rhs,
        }
    }

    /// Fast unordered-triple check: in every triangle the two largest sides
    /// are equal.
    pub fn is_ultrametric(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (a, b, c) = (self.d(i, j), self.d(j, k), self.d(i, k));
                    let ok = if a >= b && a >= c {
                        b == a || c == a
                    } else if b >= c {
                        a == b || c == b
                    } else {
                        a == c || b == c
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Errors with the first strong-triangle violation unless ultrametric.
    pub fn require_ultrametric(&self) -> Result<()> {
        if self.is_ultrametric() {
            return Ok(());
        }
        let diag = self.validate();
        Err(Error::NotUltrametric(diag.violation.expect("non-ultrametric space has a violation")))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut values: Vec<Rational> = self.dist.clone();
        values.sort();
        values.dedup();
        let diameter = values.last().cloned().unwrap_or_else(Rational::zero);
        Spectrum { values, diameter }
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// The induced subspace on `subset`, in the subset's order.
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = subset.iter().map(|s| self.require_index(s.as_ref())).collect::<Result<Vec<_>>>()?;
        self.restrict_indices(&idx)
    }

    /// The induced subspace on point indices, in the given order.
    pub fn restrict_indices(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::EmptySubset);
        }
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        let mut seen = HashSet::new();
        for &i in idx {
            if !seen.insert(i) {
                return Err(Error::DuplicateLabel(self.points[i].clone()));
            }
        }
        let dist = idx.iter().flat_map(|&i| idx.iter().map(move |&j| self.d(i, j).clone())).collect();
        Ok(FiniteMetricSpace { points, dist })
    }

    /// Indices `(i, j)`, `i < j`, of the first pair attaining `min D₀(X)`.
    pub fn min_pair_indices(&self) -> Option<(usize, usize)> {
        let n = self.len();
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                match best {
                    Some((bi, bj)) if self.d(i, j) >= self.d(bi, bj) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// A pair attaining the smallest positive distance, first in point order.
    pub fn min_pair(&self) -> Option<(String, String, Rational)> {
        self.min_pair_indices()
            .map(|(i, j)| (self.points[i].clone(), self.points[j].clone(), self.d(i, j).clone()))
    }

    /// `min D₀(X)`, absent for a singleton.
    pub fn min_positive_distance(&self) -> Option<Rational> {
        self.min_pair_indices().map(|(i, j)| self.d(i, j).clone())
    }

    /// A label not yet used by this space: `c`, then `c1`, `c2`, ...
    pub fn fresh_label(&self) -> String {
        if self.index_of("c").is_none() {
            return "c".to_string();
        }
        (1..)
            .map(|k| format!("c{k}"))
            .find(|l| self.index_of(l).is_none())
            .expect("unbounded label supply")
    }

    /// Adds a point at distance `eps` from `anchor` that copies the anchor's
    /// distances to every other point. The new point gets a fresh label.
    pub fn adjoin_near(&self, anchor: &str, eps: &Rational) -> Result<Self> {
        self.adjoin_near_labeled(anchor, eps, &self.fresh_label())
    }

    pub fn adjoin_near_labeled(&self, anchor: &str, eps: &Rational, label: &str) -> Result<Self> {
        let a = self.require_index(anchor)?;
        if self.index_of(label).is_some() {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        self.require_ultrametric()?;
        if !eps.is_positive() {
            return Err(Error::NonPositiveEpsilon(eps.clone()));
        }
        if let Some(bound) = self.min_positive_distance() {
            if *eps >= bound {
                return Err(Error::EpsilonOutOfRange { eps: eps.clone(), bound });
            }
        }
        let n = self.len();
        let mut points = self.points.clone();
        points.push(label.to_string());
        FiniteMetricSpace::from_fn(points, |i, j| {
            if j < n {
                self.d(i, j).clone()
            } else if i == a {
                eps.clone()
            } else {
                self.d(a, i).clone()
            }
        })
    }
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteMetricSpace {:?}", self.points)?;
        for row in self.dist.chunks(self.len()) {
            let cells: Vec<String> = row.iter().map(|r| r.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// On-disk JSON shape of a space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<Rational>>,
}

impl From<&FiniteMetricSpace> for SpaceFile {
    fn from(space: &FiniteMetricSpace) -> Self {
        SpaceFile { points: space.points.clone(), dist: space.rows() }
    }
}

impl TryFrom<SpaceFile> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(file: SpaceFile) -> Result<Self> {
        FiniteMetricSpace::new(file.points, file.dist)
    }
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = SpaceFile::deserialize(deserializer)?;
        FiniteMetricSpace::try_from(file).map_err(serde::de::Error::custom)
    }
}
