//! Membership in the class of star-generated ultrametric spaces.
//!
//! A finite ultrametric space is generated by a labeled star graph iff it
//! has a center `x0` with `d(x0, x) <= d(y, x)` whenever `x0 != x != y`, iff
//! no four-point subspace has the 4-cycle as its diametrical graph. Both
//! criteria are computed independently and must agree.

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::diametrical::{classify_quad_unchecked, quads, FourPointClass, MultipartiteSignature};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::FiniteMetricSpace;
use crate::star::{center_violation, star_from_center, LabeledStarGraph};
use crate::weak::{classify_forbidden, ForbiddenClassification, ForbiddenModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterWitness {
    pub center: String,
}

impl CenterWitness {
    pub fn verify(&self, space: &FiniteMetricSpace) -> bool {
        space.index_of(&self.center).is_some_and(|c| center_violation(space, c).is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenWitness {
    pub quad: [String; 4],
    pub signature: MultipartiteSignature,
    pub classification: ForbiddenClassification,
}

impl ForbiddenWitness {
    pub fn model(&self) -> ForbiddenModel {
        self.classification.model
    }

    pub fn verify(&self, space: &FiniteMetricSpace) -> bool {
        let Ok(sub) = space.restrict(&self.quad) else { return false };
        sub.is_ultrametric() && classify_quad_unchecked(&sub, [0, 1, 2, 3]) == FourPointClass::K22
    }

    fn write_fields<M: SerializeMap>(&self, map: &mut M) -> std::result::Result<(), M::Error> {
        map.serialize_entry("quad", &self.quad)?;
        map.serialize_entry("model", &self.classification.model)?;
        map.serialize_entry("signature", &self.signature.part_sizes)?;
        map.serialize_entry("parts", &self.signature.parts)?;
        Ok(())
    }
}

impl Serialize for ForbiddenWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        self.write_fields(&mut map)?;
        map.end()
    }
}

/// First point (in point order) satisfying the center inequality.
pub fn find_center(space: &FiniteMetricSpace) -> Result<Option<CenterWitness>> {
    space.require_ultrametric()?;
    Ok(find_center_unchecked(space))
}

pub(crate) fn find_center_unchecked(space: &FiniteMetricSpace) -> Option<CenterWitness> {
    (0..space.len())
        .find(|&c| center_violation(space, c).is_none())
        .map(|c| CenterWitness { center: space.label(c).to_string() })
}

fn witness_for(space: &FiniteMetricSpace, q: [usize; 4]) -> Result<ForbiddenWitness> {
    let sub = space.restrict_indices(&q)?;
    let classification = classify_forbidden(&sub)?;
    let signature = crate::diametrical::multipartite_signature(&crate::diametrical::diametrical_graph(&sub)?)
        .ok_or(Error::NotCompleteMultipartite)?;
    Ok(ForbiddenWitness {
        quad: q.map(|i| space.label(i).to_string()),
        signature,
        classification,
    })
}

/// The first 4-subset (lexicographic in point order) whose diametrical
/// graph is the 4-cycle, classified as X4- or Y4-type.
pub fn forbidden_scan(space: &FiniteMetricSpace) -> Result<Option<ForbiddenWitness>> {
    space.require_ultrametric()?;
    forbidden_scan_unchecked(space)
}

pub(crate) fn forbidden_scan_unchecked(space: &FiniteMetricSpace) -> Result<Option<ForbiddenWitness>> {
    quads(space.len())
        .find(|&q| classify_quad_unchecked(space, q) == FourPointClass::K22)
        .map(|q| witness_for(space, q))
        .transpose()
}

/// Same result as [`forbidden_scan`], with the subsets split across the
/// rayon thread pool.
pub fn forbidden_scan_parallel(space: &FiniteMetricSpace) -> Result<Option<ForbiddenWitness>> {
    space.require_ultrametric()?;
    let all: Vec<[usize; 4]> = quads(space.len()).collect();
    all.par_iter()
        .find_first(|&&q| classify_quad_unchecked(space, q) == FourPointClass::K22)
        .map(|&q| witness_for(space, q))
        .transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "US")]
    Us,
    /// Reserved for inputs that are not finite matrices; never produced here.
    #[serde(rename = "EMBEDDABLE_NOT_DECIDED")]
    EmbeddableNotDecided,
    #[serde(rename = "FORBIDDEN")]
    Forbidden,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosisReport {
    pub verdict: Verdict,
    pub center: Option<CenterWitness>,
    pub star: Option<LabeledStarGraph>,
    pub forbidden: Option<ForbiddenWitness>,
}

impl Serialize for DiagnosisReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("verdict", &self.verdict)?;
        if let Some(c) = &self.center {
            map.serialize_entry("center", &c.center)?;
        }
        if let Some(s) = &self.star {
            map.serialize_entry("star", s)?;
        }
        if let Some(f) = &self.forbidden {
            f.write_fields(&mut map)?;
        }
        map.end()
    }
}

/// Runs both criteria and reports the verdict with its witness.
pub fn diagnose(space: &FiniteMetricSpace) -> Result<DiagnosisReport> {
    space.require_ultrametric()?;
    let center = find_center_unchecked(space);
    let forbidden = forbidden_scan_unchecked(space)?;
    match (center, forbidden) {
        (Some(c), None) => {
            let star = star_from_center(space, &c.center)?;
            Ok(DiagnosisReport { verdict: Verdict::Us, center: Some(c), star: Some(star), forbidden: None })
        }
        (None, Some(f)) => Ok(DiagnosisReport { verdict: Verdict::Forbidden, center: None, star: None, forbidden: Some(f) }),
        (Some(c), Some(f)) => Err(Error::CriteriaDisagree(format!(
            "center `{}` exists but quad {:?} is forbidden",
            c.center, f.quad
        ))),
        (None, None) => Err(Error::CriteriaDisagree("no center and no forbidden quad".into())),
    }
}

/// Subtracts `delta` from every off-diagonal distance; requires
/// `0 <= delta < min D₀(X)`.
pub fn shift(space: &FiniteMetricSpace, delta: &Rational) -> Result<FiniteMetricSpace> {
    space.require_ultrametric()?;
    if delta.is_negative() {
        return Err(Error::NegativeDelta(delta.clone()));
    }
    if let Some(bound) = space.min_positive_distance() {
        if *delta >= bound {
            return Err(Error::DeltaOutOfRange { delta: delta.clone(), bound });
        }
    }
    space.map_distances(|d| d - delta)
}

/// Adds `delta >= 0` to every off-diagonal distance.
pub fn unshift(space: &FiniteMetricSpace, delta: &Rational) -> Result<FiniteMetricSpace> {
    space.require_ultrametric()?;
    if delta.is_negative() {
        return Err(Error::NegativeDelta(delta.clone()));
    }
    space.map_distances(|d| d + delta)
}

/// The subspace of `(R+, d+)` on the given values, `d+(p, q) = max(p, q)`.
/// Points are labeled by their values, in the given order.
pub fn dplus_space(values: &[Rational]) -> Result<FiniteMetricSpace> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_positive() {
            return Err(Error::NonPositiveValue(v.clone()));
        }
        if values[..i].contains(v) {
            return Err(Error::DuplicateValue(v.clone()));
        }
    }
    FiniteMetricSpace::from_fn(values.iter().map(|v| v.to_string()).collect(), |i, j| {
        values[i].clone().max(values[j].clone())
    })
}

/// An injective positive weight per point with `d(x, y) = max(w(x), w(y))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DplusEmbedding {
    pub weights: Vec<(String, Rational)>,
}

impl DplusEmbedding {
    pub fn weight(&self, label: &str) -> Option<&Rational> {
        self.weights.iter().find(|(p, _)| p == label).map(|(_, w)| w)
    }

    pub fn verify(&self, space: &FiniteMetricSpace) -> bool {
        let n = space.len();
        if self.weights.len() != n {
            return false;
        }
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            match self.weight(space.label(i)) {
                Some(v) if v.is_positive() => w.push(v),
                _ => return false,
            }
        }
        max_equation_holds(space, &w)
    }
}

fn max_equation_holds(space: &FiniteMetricSpace, w: &[&Rational]) -> bool {
    let n = space.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if w[i] == w[j] || space.d(i, j) != w[i].max(w[j]) {
                return false;
            }
        }
    }
    true
}

impl Serialize for DplusEmbedding {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.weights.len()))?;
        for (p, w) in &self.weights {
            map.serialize_entry(p, w)?;
        }
        map.end()
    }
}

/// Decides whether the space is isometric to a subspace of `(R+, d+)`.
///
/// Every point except the bottom one must carry the weight
/// `min_{y != x} d(x, y)`. The bottom point is the smaller member of the
/// unique minimal pair and gets half the second-smallest candidate weight.
pub fn embeds_in_dplus(space: &FiniteMetricSpace) -> Option<DplusEmbedding> {
    let n = space.len();
    if n == 1 {
        return Some(DplusEmbedding { weights: vec![(space.label(0).to_string(), Rational::one())] });
    }
    let mut weights: Vec<Rational> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| space.d(i, j)).min().expect("n >= 2").clone())
        .collect();

    let (a, b) = space.min_pair_indices().expect("n >= 2");
    let minimum = space.d(a, b);
    let ties = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| space.d(i, j) == minimum).count();
    if ties != 1 {
        return None;
    }

    let mut sorted = weights.clone();
    sorted.sort();
    let mut bottom = sorted[1].half();
    while weights.iter().enumerate().any(|(i, w)| i != a && *w == bottom) {
        bottom = bottom.half();
    }
    weights[a] = bottom;

    let refs: Vec<&Rational> = weights.iter().collect();
    if !max_equation_holds(space, &refs) {
        return None;
    }
    Some(DplusEmbedding { weights: space.points().iter().cloned().zip(weights).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diametrical::classify_four_point;
    use crate::isometry::are_isometric;
    use crate::models;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| r(s)).collect()
    }

    #[test]
    fn find_center_examples() {
        assert_eq!(find_center(&models::s4()).unwrap(), Some(CenterWitness { center: "s1".into() }));
        assert_eq!(find_center(&models::x4()).unwrap(), None);
        assert_eq!(find_center(&models::e4()).unwrap(), Some(CenterWitness { center: "p1".into() }));
        assert!(CenterWitness { center: "s1".into() }.verify(&models::s4()));
        assert!(!CenterWitness { center: "s2".into() }.verify(&models::s4()));
    }

    #[test]
    fn forbidden_scan_examples() {
        let x4 = models::x4();
        let w = forbidden_scan(&x4).unwrap().unwrap();
        assert_eq!(w.quad, ["x1", "x2", "x3", "x4"].map(String::from));
        assert_eq!(w.model(), ForbiddenModel::X4);
        assert_eq!(w.signature.part_sizes, vec![2, 2]);
        assert!(w.verify(&x4));

        let bigger = x4.adjoin_near("x1", &r("1/2")).unwrap();
        let w = forbidden_scan(&bigger).unwrap().unwrap();
        assert_eq!(w.quad, ["x1", "x2", "x3", "x4"].map(String::from));
        assert_eq!(forbidden_scan_parallel(&bigger).unwrap(), Some(w));

        assert_eq!(forbidden_scan(&models::s4()).unwrap(), None);
    }

    #[test]
    fn diagnose_examples() {
        let rep = diagnose(&models::s4()).unwrap();
        assert_eq!(rep.verdict, Verdict::Us);
        assert_eq!(rep.center.unwrap().center, "s1");

        let rep = diagnose(&models::x4()).unwrap();
        assert_eq!(rep.verdict, Verdict::Forbidden);
        assert_eq!(rep.forbidden.as_ref().unwrap().model(), ForbiddenModel::X4);
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            r#"{"verdict":"FORBIDDEN","quad":["x1","x2","x3","x4"],"model":"X4","signature":[2,2],"parts":[["x1","x3"],["x2","x4"]]}"#
        );

        let rep = diagnose(&models::w4()).unwrap();
        assert_eq!(rep.verdict, Verdict::Us);
        assert_eq!(rep.center.as_ref().unwrap().center, "w1");
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            r#"{"verdict":"US","center":"w1","star":{"center":"w1","center_label":"0","leaves":{"w2":"3","w3":"1","w4":"3"}}}"#
        );
    }

    #[test]
    fn shift_examples() {
        let s4 = models::s4();
        let shifted = shift(&s4, &r("1/2")).unwrap();
        assert_eq!(shifted.spectrum().positive(), rs(&["1/2", "3/2", "5/2"]));
        assert_eq!(classify_four_point(&shifted).unwrap(), FourPointClass::K13);
        assert_eq!(shift(&s4, &r("0")).unwrap(), s4);
        assert!(matches!(shift(&s4, &r("1")), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(shift(&s4, &r("-1")), Err(Error::NegativeDelta(_))));
    }

    #[test]
    fn unshift_examples() {
        let s4 = models::s4();
        assert_eq!(unshift(&shift(&s4, &r("1/2")).unwrap(), &r("1/2")).unwrap(), s4);

        let e = unshift(&models::e4(), &r("1")).unwrap();
        assert_eq!(e.spectrum().positive(), rs(&["2"]));

        let x = unshift(&models::x4(), &r("1/2")).unwrap();
        assert_eq!(x.spectrum().positive(), rs(&["3/2", "5/2", "7/2"]));
        assert_eq!(diagnose(&x).unwrap().verdict, Verdict::Forbidden);
    }

    #[test]
    fn dplus_examples() {
        let d = dplus_space(&rs(&["1/2", "1", "2", "3"])).unwrap();
        let map = are_isometric(&models::s4(), &d).unwrap().unwrap();
        // s1 and s3 are interchangeable; the first map sends s1 to the bottom
        assert_eq!(map.image("s1"), Some("1/2"));
        assert_eq!(map.image("s3"), Some("1"));
        assert_eq!(map.image("s4"), Some("2"));
        assert_eq!(map.image("s2"), Some("3"));

        assert_eq!(dplus_space(&rs(&["1"])).unwrap().len(), 1);
        assert_eq!(classify_four_point(&dplus_space(&rs(&["1", "2", "3", "4"])).unwrap()).unwrap(), FourPointClass::K13);

        assert_eq!(dplus_space(&rs(&["1", "1"])), Err(Error::DuplicateValue(r("1"))));
        assert_eq!(dplus_space(&rs(&["0", "1"])), Err(Error::NonPositiveValue(r("0"))));
        assert_eq!(dplus_space(&[]), Err(Error::EmptyValues));
    }

    #[test]
    fn embeds_in_dplus_examples() {
        let s4 = models::s4();
        let emb = embeds_in_dplus(&s4).unwrap();
        assert_eq!(emb.weight("s1"), Some(&r("1/2")));
        assert_eq!(emb.weight("s3"), Some(&r("1")));
        assert_eq!(emb.weight("s4"), Some(&r("2")));
        assert_eq!(emb.weight("s2"), Some(&r("3")));
        assert!(emb.verify(&s4));

        assert_eq!(embeds_in_dplus(&models::z4()), None);

        let single = FiniteMetricSpace::parse(&["p"], &[&["0"]]).unwrap();
        assert_eq!(embeds_in_dplus(&single).unwrap().weight("p"), Some(&r("1")));
    }
}
