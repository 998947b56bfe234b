//! Self-isometries and isometry tests between finite spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::first_bijection;
use crate::space::FiniteMetricSpace;

pub const DEFAULT_ISOMETRY_CAP: usize = 8;

/// A permutation of a space's points, `images[i]` being the image of point `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    pub images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    /// `self` after `other`: `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn preserves(&self, space: &FiniteMetricSpace) -> bool {
        let n = space.len();
        (0..n).all(|i| (0..n).all(|j| space.d(i, j) == space.d(self.images[i], self.images[j])))
    }

    pub fn labelled(&self, space: &FiniteMetricSpace) -> Vec<(String, String)> {
        self.images.iter().enumerate().map(|(i, &j)| (space.label(i).to_string(), space.label(j).to_string())).collect()
    }
}

/// A bijection between the points of two spaces, listed in domain order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointMap {
    pub pairs: Vec<(String, String)>,
}

impl PointMap {
    pub(crate) fn from_indices(a: &FiniteMetricSpace, b: &FiniteMetricSpace, phi: &[usize]) -> Self {
        PointMap {
            pairs: phi.iter().enumerate().map(|(i, &j)| (a.label(i).to_string(), b.label(j).to_string())).collect(),
        }
    }

    pub fn image(&self, label: &str) -> Option<&str> {
        self.pairs.iter().find(|(x, _)| x == label).map(|(_, y)| y.as_str())
    }

    pub fn inverse(&self) -> PointMap {
        PointMap { pairs: self.pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// Checks that this map is a bijection `a -> b` preserving every distance.
    pub fn is_isometry(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
        let Some(idx) = self.indices(a, b) else { return false };
        let n = a.len();
        (0..n).all(|i| (0..n).all(|j| a.d(i, j) == b.d(idx[i], idx[j])))
    }

    /// Target index for each domain index, if this is a bijection `a -> b`.
    pub fn indices(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Option<Vec<usize>> {
        if a.len() != b.len() || self.pairs.len() != a.len() {
            return None;
        }
        let mut idx = vec![usize::MAX; a.len()];
        let mut hit = vec![false; b.len()];
        for (x, y) in &self.pairs {
            let i = a.index_of(x)?;
            let j = b.index_of(y)?;
            if idx[i] != usize::MAX || hit[j] {
                return None;
            }
            idx[i] = j;
            hit[j] = true;
        }
        Some(idx)
    }
}

/// The transposition of a minimal pair, which is always a self-isometry of
/// an ultrametric space. The result is re-verified before it is returned.
pub fn swap_isometry(space: &FiniteMetricSpace, x1: &str, x2: &str) -> Result<Permutation> {
    space.require_ultrametric()?;
    let a = space.require_index(x1)?;
    let b = space.require_index(x2)?;
    if a == b {
        return Err(Error::Internal(format!("swap needs two distinct points, got `{x1}` twice")));
    }
    let minimum = space.min_positive_distance().expect("two distinct points exist");
    if *space.d(a, b) > minimum {
        return Err(Error::NotMinimalPair {
            x: x1.to_string(),
            y: x2.to_string(),
            distance: space.d(a, b).clone(),
            minimum,
        });
    }
    let perm = Permutation::transposition(space.len(), a, b);
    if !perm.preserves(space) {
        return Err(Error::Internal(format!("transposition ({x1} {x2}) of a minimal pair is not an isometry")));
    }
    Ok(perm)
}

pub fn are_isometric(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<Option<PointMap>> {
    are_isometric_with_cap(a, b, DEFAULT_ISOMETRY_CAP)
}

/// The lexicographically first distance-preserving bijection `a -> b`.
pub fn are_isometric_with_cap(a: &FiniteMetricSpace, b: &FiniteMetricSpace, cap: usize) -> Result<Option<PointMap>> {
    let n = a.len().max(b.len());
    if n > cap {
        return Err(Error::SizeCapExceeded { n, cap });
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    let n = a.len();
    let ka: Vec<_> = (0..n * n).map(|k| a.d(k / n, k % n)).collect();
    let kb: Vec<_> = (0..n * n).map(|k| b.d(k / n, k % n)).collect();
    Ok(first_bijection(n, &ka, &kb).map(|phi| PointMap::from_indices(a, b, &phi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::rational::Rational;

    #[test]
    fn swap_examples() {
        let x4 = models::x4();
        let perm = swap_isometry(&x4, "x1", "x3").unwrap();
        assert_eq!(perm.images, vec![2, 1, 0, 3]);
        assert!(perm.compose(&perm).is_identity());
        assert_eq!(x4.distance("x1", "x2").unwrap(), x4.distance("x3", "x2").unwrap());

        let e4 = models::e4();
        let perm = swap_isometry(&e4, "p1", "p2").unwrap();
        assert_eq!(perm.images, vec![1, 0, 2, 3]);

        match swap_isometry(&x4, "x2", "x4") {
            Err(Error::NotMinimalPair { distance, minimum, .. }) => {
                assert_eq!(distance, Rational::from(2));
                assert_eq!(minimum, Rational::from(1));
            }
            other => panic!("expected NotMinimalPair, got {other:?}"),
        }
    }

    #[test]
    fn isometry_examples() {
        let x4 = models::x4();
        let renamed = x4.relabel(vec!["a".into(), "b".into(), "c".into(), "d".into()]).unwrap();
        let map = are_isometric(&x4, &renamed).unwrap().unwrap();
        assert!(map.is_isometry(&x4, &renamed));
        assert_eq!(map.image("x3"), Some("c"));

        assert_eq!(are_isometric(&x4, &models::y4()).unwrap(), None);

        let big = FiniteMetricSpace::from_fn((0..9).map(|i| format!("q{i}")).collect(), |_, _| Rational::one()).unwrap();
        assert!(matches!(are_isometric(&big, &big), Err(Error::SizeCapExceeded { n: 9, cap: 8 })));
        assert!(are_isometric_with_cap(&big, &big, 9).unwrap().is_some());
    }

    #[test]
    fn deleting_either_end_of_new_minimum_pair_gives_isometric_spaces() {
        let s4 = models::s4();
        let out = s4.adjoin_near("s1", &Rational::new(1, 2)).unwrap();
        let without_s1 = out.restrict(&["s2", "s3", "s4", "c"]).unwrap();
        let without_c = out.restrict(&["s1", "s2", "s3", "s4"]).unwrap();
        let map = are_isometric(&without_s1, &without_c).unwrap().unwrap();
        assert!(map.is_isometry(&without_s1, &without_c));
        // s1 and s3 are swappable in S4, so c may land on either
        assert!(matches!(map.image("c"), Some("s1" | "s3")));
    }
}
