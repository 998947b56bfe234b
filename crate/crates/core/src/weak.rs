//! Weak similarity: a point bijection `Φ` together with a strictly
//! increasing bijection `f` between distance sets such that
//! `d(x, y) = f(δ(Φx, Φy))`.
//!
//! Between finite totally ordered sets of equal size there is exactly one
//! strictly increasing bijection, so `f` is determined by the spectra and
//! the search reduces to finding `Φ` that matches rank matrices.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::diametrical::{diametrical_graph, multipartite_signature};
use crate::error::{Error, Result};
use crate::isometry::{PointMap, DEFAULT_ISOMETRY_CAP};
use crate::models::{self, ModelName};
use crate::rational::Rational;
use crate::search::first_bijection;
use crate::space::FiniteMetricSpace;

/// Each distance replaced by its index in the sorted distance set; the
/// diagonal is rank 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    n: usize,
    ranks: Vec<usize>,
}

impl RankMatrix {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.ranks[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.ranks.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

pub fn rank_matrix(space: &FiniteMetricSpace) -> RankMatrix {
    let spectrum = space.spectrum();
    let n = space.len();
    let ranks = (0..n * n)
        .map(|k| spectrum.rank_of(space.d(k / n, k % n)).expect("every distance is in the spectrum"))
        .collect();
    RankMatrix { n, ranks }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakSimilarityWitness {
    /// `Φ`, from the first space to the second.
    pub phi: PointMap,
    /// `f` restricted to positive distances: `(value in D(second), value in D(first))`,
    /// increasing. `f(0) = 0` is implicit.
    pub f_pairs: Vec<(Rational, Rational)>,
}

impl WeakSimilarityWitness {
    /// Re-checks the witness from scratch against both spaces.
    pub fn verify(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
        let Some(idx) = self.phi.indices(a, b) else { return false };
        if self.f_pairs.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
            return false;
        }
        let (sa, sb) = (a.spectrum(), b.spectrum());
        let dom: Vec<&Rational> = self.f_pairs.iter().map(|p| &p.0).collect();
        let cod: Vec<&Rational> = self.f_pairs.iter().map(|p| &p.1).collect();
        if dom != sb.positive().iter().collect::<Vec<_>>() || cod != sa.positive().iter().collect::<Vec<_>>() {
            return false;
        }
        let maps_to = |v: &Rational, target: &Rational| {
            if v.is_zero() {
                target.is_zero()
            } else {
                self.f_pairs.iter().any(|(x, y)| x == v && y == target)
            }
        };
        let n = a.len();
        (0..n).all(|i| (0..n).all(|j| maps_to(b.d(idx[i], idx[j]), a.d(i, j))))
    }

    /// Checks that `f` is the identity, i.e. `Φ` is an isometry.
    pub fn is_isometric(&self) -> bool {
        self.f_pairs.iter().all(|(x, y)| x == y)
    }
}

impl Serialize for WeakSimilarityWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Phi<'a>(&'a PointMap);
        impl Serialize for Phi<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.pairs.len()))?;
                for (x, y) in &self.0.pairs {
                    map.serialize_entry(x, y)?;
                }
                map.end()
            }
        }
        #[derive(Serialize)]
        struct Out<'a> {
            phi: Phi<'a>,
            f: &'a [(Rational, Rational)],
        }
        Out { phi: Phi(&self.phi), f: &self.f_pairs }.serialize(serializer)
    }
}

fn f_pairs(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Vec<(Rational, Rational)> {
    let (sa, sb) = (a.spectrum(), b.spectrum());
    sb.positive().iter().cloned().zip(sa.positive().iter().cloned()).collect()
}

pub fn weakly_similar(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<Option<WeakSimilarityWitness>> {
    weakly_similar_with_cap(a, b, DEFAULT_ISOMETRY_CAP)
}

/// The first weak similarity `a -> b` in lexicographic order of `Φ`.
pub fn weakly_similar_with_cap(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    cap: usize,
) -> Result<Option<WeakSimilarityWitness>> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.len() > cap {
        return Err(Error::SizeCapExceeded { n: a.len(), cap });
    }
    let (ra, rb) = (rank_matrix(a), rank_matrix(b));
    if ra.ranks.iter().max() != rb.ranks.iter().max() {
        return Ok(None);
    }
    Ok(first_bijection(a.len(), &ra.ranks, &rb.ranks).map(|phi| WeakSimilarityWitness {
        phi: PointMap::from_indices(a, b, &phi),
        f_pairs: f_pairs(a, b),
    }))
}

/// X4- or Y4-type of a forbidden quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ForbiddenModel {
    X4,
    Y4,
}

impl ForbiddenModel {
    pub fn model(self) -> ModelName {
        match self {
            ForbiddenModel::X4 => ModelName::X4,
            ForbiddenModel::Y4 => ModelName::Y4,
        }
    }
}

/// Which of the three explicit maps to a model was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ForbiddenMap {
    /// `p_i -> y_i`, chords equal.
    Phi1,
    /// `p_i -> x_i`, `ρ(p1,p3) < ρ(p2,p4)`.
    Phi2,
    /// `p1 -> x2, p2 -> x1, p3 -> x4, p4 -> x3`, `ρ(p2,p4) < ρ(p1,p3)`.
    Phi3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenClassification {
    pub model: ForbiddenModel,
    pub map: ForbiddenMap,
    pub witness: WeakSimilarityWitness,
}

/// Classifies a four-point ultrametric space whose diametrical graph is the
/// 4-cycle.
///
/// The cycle is numbered `p1 p2 p3 p4` so that the non-adjacent pairs are
/// `{p1, p3}` (the part holding the first point) and `{p2, p4}`. Equal
/// chords give the Y4 type; otherwise the space is X4-type, with the map
/// chosen by which chord is shorter.
pub fn classify_forbidden(space: &FiniteMetricSpace) -> Result<ForbiddenClassification> {
    if space.len() != 4 {
        return Err(Error::WrongCardinality { expected: 4, found: space.len() });
    }
    space.require_ultrametric()?;
    let sig = multipartite_signature(&diametrical_graph(space)?).ok_or(Error::NotCompleteMultipartite)?;
    if sig.part_sizes != [2, 2] {
        return Err(Error::NotForbiddenQuad(sig.part_sizes));
    }
    let parts = sig.part_indices();
    let (p1, p3, p2, p4) = (parts[0][0], parts[0][1], parts[1][0], parts[1][1]);
    let (c13, c24) = (space.d(p1, p3), space.d(p2, p4));

    let (model, map, targets) = if c13 == c24 {
        (ForbiddenModel::Y4, ForbiddenMap::Phi1, [0, 1, 2, 3])
    } else if c13 < c24 {
        (ForbiddenModel::X4, ForbiddenMap::Phi2, [0, 1, 2, 3])
    } else {
        (ForbiddenModel::X4, ForbiddenMap::Phi3, [1, 0, 3, 2])
    };
    let target = model.model().space();
    let mut phi = vec![0; 4];
    for (p, t) in [p1, p2, p3, p4].into_iter().zip(targets) {
        phi[p] = t;
    }
    let witness = WeakSimilarityWitness { phi: PointMap::from_indices(space, &target, &phi), f_pairs: f_pairs(space, &target) };
    if !witness.verify(space, &target) {
        return Err(Error::Internal(format!("{map:?} is not a weak similarity onto {}", model.model())));
    }
    Ok(ForbiddenClassification { model, map, witness })
}

/// The unique model among the six landmark spaces that `space` is weakly
/// similar to.
pub fn model_match(space: &FiniteMetricSpace) -> Result<Option<ModelName>> {
    if space.len() != 4 {
        return Err(Error::WrongCardinality { expected: 4, found: space.len() });
    }
    let mut found = None;
    for (name, model) in models::all() {
        if weakly_similar(space, &model)?.is_some() {
            if let Some(prev) = found {
                return Err(Error::Internal(format!("space matches both {prev} and {name}")));
            }
            found = Some(name);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diametrical::{classify_four_point, FourPointClass};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn rank_examples() {
        let x4 = rank_matrix(&models::x4());
        assert_eq!(x4.get(0, 2), 1);
        assert_eq!(x4.get(1, 3), 2);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            assert_eq!(x4.get(i, j), 3);
        }

        let e4 = rank_matrix(&models::e4());
        assert!((0..4).all(|i| (0..4).all(|j| e4.get(i, j) == usize::from(i != j))));

        let y4 = rank_matrix(&models::y4());
        assert_eq!(y4.get(0, 2), 1);
        assert_eq!(y4.get(1, 3), 1);
        assert_eq!(y4.get(0, 1), 2);
    }

    #[test]
    fn weakly_similar_examples() {
        let x4 = models::x4();
        let doubled = x4.map_distances(|d| d.scale(2)).unwrap();
        let w = weakly_similar(&x4, &doubled).unwrap().unwrap();
        assert_eq!(w.f_pairs, vec![(r("2"), r("1")), (r("4"), r("2")), (r("6"), r("3"))]);
        assert!(w.verify(&x4, &doubled));

        assert_eq!(weakly_similar(&x4, &models::y4()).unwrap(), None);

        let s3 = models::s4().restrict(&["s1", "s2", "s3"]).unwrap();
        assert_eq!(weakly_similar(&x4, &s3), Err(Error::SizeMismatch { left: 4, right: 3 }));
    }

    #[test]
    fn classify_forbidden_examples() {
        let x4 = models::x4();
        let c = classify_forbidden(&x4).unwrap();
        assert_eq!((c.model, c.map), (ForbiddenModel::X4, ForbiddenMap::Phi2));
        assert!(c.witness.phi.pairs.iter().all(|(a, b)| a == b));

        let y4 = models::y4();
        let c = classify_forbidden(&y4).unwrap();
        assert_eq!((c.model, c.map), (ForbiddenModel::Y4, ForbiddenMap::Phi1));
        assert!(c.witness.phi.pairs.iter().all(|(a, b)| a == b));

        let mut rows = x4.rows();
        rows[0][2] = r("2");
        rows[2][0] = r("2");
        rows[1][3] = r("1");
        rows[3][1] = r("1");
        let swapped = FiniteMetricSpace::new(x4.points().to_vec(), rows).unwrap();
        let c = classify_forbidden(&swapped).unwrap();
        assert_eq!((c.model, c.map), (ForbiddenModel::X4, ForbiddenMap::Phi3));
        assert_eq!(c.witness.phi.image("x1"), Some("x2"));
        assert_eq!(c.witness.phi.image("x2"), Some("x1"));
        assert_eq!(c.witness.phi.image("x3"), Some("x4"));
        assert_eq!(c.witness.phi.image("x4"), Some("x3"));
        assert!(c.witness.verify(&swapped, &x4));

        assert!(matches!(classify_forbidden(&models::s4()), Err(Error::NotForbiddenQuad(_))));
    }

    #[test]
    fn model_match_examples() {
        let dplus = FiniteMetricSpace::from_fn(vec!["1".into(), "2".into(), "3".into(), "4".into()], |i, j| {
            Rational::from((i.max(j) + 1) as i64)
        })
        .unwrap();
        assert_eq!(model_match(&dplus).unwrap(), Some(ModelName::S4));
        assert_eq!(model_match(&models::e4()).unwrap(), Some(ModelName::E4));
        let w7 = models::w4().map_distances(|d| d.scale(7)).unwrap();
        assert_eq!(model_match(&w7).unwrap(), Some(ModelName::W4));
        for (name, m) in models::all() {
            assert_eq!(model_match(&m).unwrap(), Some(name));
        }
    }

    #[test]
    fn models_are_pairwise_not_weakly_similar() {
        let all = models::all();
        for (i, (na, a)) in all.iter().enumerate() {
            for (j, (nb, b)) in all.iter().enumerate() {
                let found = weakly_similar(a, b).unwrap().is_some();
                assert_eq!(found, i == j, "{na} vs {nb}");
            }
        }
    }

    #[test]
    fn witness_preserves_signature() {
        let s4 = models::s4();
        let scaled = s4.map_distances(|d| d + &r("1/3")).unwrap();
        let w = weakly_similar(&s4, &scaled).unwrap().unwrap();
        assert!(w.verify(&s4, &scaled));
        assert_eq!(classify_four_point(&scaled).unwrap(), FourPointClass::K13);
    }

    #[test]
    fn witness_json_shape() {
        let x4 = models::x4();
        let w = weakly_similar(&x4, &x4).unwrap().unwrap();
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"phi":{"x1":"x1","x2":"x2","x3":"x3","x4":"x4"},"f":[["1","1"],["2","2"],["3","3"]]}"#
        );
    }
}
