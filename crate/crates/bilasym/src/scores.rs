//! Composite asymmetry scores: weighted sums of transformed features.
//!
//! Two families exist. Coordinatewise scores consume absolute features of
//! a basis-registered shape; landmark-level scores consume per-landmark
//! distances and therefore work under axis registration too. The quadratic
//! members of both families coincide: summing squared coordinate gaps per
//! pair is the same as squaring the pair distance.

use crate::error::{Error, Result};
use crate::features::{absolute_features, landmark_from_coordinatewise};
use crate::model::{FeatureIndex, FeatureKind, FeatureVector, PairingScheme, RegistrationMode};
use crate::registration::RegisteredDataset;

/// Per-feature transform inside a composite score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Psi {
    /// Identity on magnitudes; yields L1-type scores.
    Linear,
    /// Square; yields L2-type scores.
    Quadratic,
}

impl Psi {
    fn apply(self, a: f64) -> f64 {
        match self {
            Psi::Linear => a,
            Psi::Quadratic => a * a,
        }
    }
}

/// Where a weight vector came from, carried into reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSource {
    Equal,
    Adaptive,
    User,
}

impl std::fmt::Display for WeightSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightSource::Equal => "equal",
            WeightSource::Adaptive => "adaptive",
            WeightSource::User => "user",
        })
    }
}

/// Nonnegative feature weights with at least one positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    source: WeightSource,
}

impl WeightVector {
    pub fn equal(len: usize) -> Result<Self> {
        Self::with_source(vec![1.0; len], WeightSource::Equal)
    }

    pub fn user(weights: Vec<f64>) -> Result<Self> {
        Self::with_source(weights, WeightSource::User)
    }

    fn with_source(weights: Vec<f64>, source: WeightSource) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput {
                what: "weight vector",
            });
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite()) {
            let _ = pos;
            return Err(Error::NonFinite {
                what: "weight vector",
            });
        }
        if let Some(position) = weights.iter().position(|&w| w < 0.0) {
            return Err(Error::NegativeWeight { position });
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::ZeroWeights);
        }
        Ok(Self { weights, source })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Which feature representation a score consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreFamily {
    /// Weighted sum over absolute coordinatewise features.
    Coordinatewise,
    /// Weighted sum over landmark-level distances.
    Landmark,
}

/// A fully specified composite score.
#[derive(Debug, Clone)]
pub struct ScoreSpec {
    pub family: ScoreFamily,
    pub psi: Psi,
    pub weights: WeightVector,
    pub label: String,
}

impl ScoreSpec {
    /// Sum of absolute features; `j` is the coordinatewise feature count.
    pub fn l1(j: usize) -> Result<Self> {
        Ok(Self {
            family: ScoreFamily::Coordinatewise,
            psi: Psi::Linear,
            weights: WeightVector::equal(j)?,
            label: "l1".into(),
        })
    }

    /// Sum of squared features.
    pub fn l2(j: usize) -> Result<Self> {
        Ok(Self {
            family: ScoreFamily::Coordinatewise,
            psi: Psi::Quadratic,
            weights: WeightVector::equal(j)?,
            label: "l2".into(),
        })
    }

    /// Sum of landmark-level distances; `n` is the pair + solo count.
    pub fn star_l1(n: usize) -> Result<Self> {
        Ok(Self {
            family: ScoreFamily::Landmark,
            psi: Psi::Linear,
            weights: WeightVector::equal(n)?,
            label: "star-l1".into(),
        })
    }

    /// Sum of squared landmark-level distances; identical in value to
    /// [`ScoreSpec::l2`] on the same shape.
    pub fn star_l2(n: usize) -> Result<Self> {
        Ok(Self {
            family: ScoreFamily::Landmark,
            psi: Psi::Quadratic,
            weights: WeightVector::equal(n)?,
            label: "star-l2".into(),
        })
    }

    /// Quadratic score counting solo departures twice: each solo sits a
    /// half-gap from the plane where a pair member sits a half-gap from
    /// its mirrored partner, and the doubled weight makes the two
    /// contribute on the same footing.
    pub fn bock(index_map: &[FeatureIndex]) -> Result<Self> {
        let weights: Vec<f64> = index_map
            .iter()
            .map(|ix| match ix {
                FeatureIndex::Pair { .. } => 1.0,
                FeatureIndex::Solo { .. } => 2.0,
            })
            .collect();
        Ok(Self {
            family: ScoreFamily::Coordinatewise,
            psi: Psi::Quadratic,
            weights: WeightVector::with_source(weights, WeightSource::User)?,
            label: "bock".into(),
        })
    }

    /// The same score with different weights, relabelled accordingly.
    pub fn reweighted(&self, weights: WeightVector) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                what: "weight vector length",
                expected: self.weights.len(),
                actual: weights.len(),
            });
        }
        let label = match weights.source() {
            WeightSource::Equal => self.label.clone(),
            _ => format!("weighted {}", self.label),
        };
        Ok(Self {
            family: self.family,
            psi: self.psi,
            weights,
            label,
        })
    }

    /// Evaluates the score on one subject's features, converting the
    /// representation where that loses nothing: signed features are taken
    /// to magnitudes, and coordinatewise features collapse to landmark
    /// level for the landmark family. Landmark-level input cannot feed a
    /// coordinatewise score.
    pub fn evaluate(&self, fv: &FeatureVector) -> Result<f64> {
        match self.family {
            ScoreFamily::Coordinatewise => {
                if fv.kind() == FeatureKind::LandmarkLevel {
                    return Err(Error::KindMismatch {
                        expected: "coordinatewise features",
                        actual: fv.kind().to_string(),
                    });
                }
                let a = absolute_features(fv);
                additive_score(&a, self.psi, &self.weights)
            }
            ScoreFamily::Landmark => {
                let dstar;
                let input = if fv.kind() == FeatureKind::LandmarkLevel {
                    fv
                } else {
                    dstar = landmark_from_coordinatewise(fv)?;
                    &dstar
                };
                star_score(input, self.psi, &self.weights)
            }
        }
    }
}

/// Weighted sum of transformed absolute features.
pub fn additive_score(a: &FeatureVector, psi: Psi, weights: &WeightVector) -> Result<f64> {
    if a.kind() != FeatureKind::Absolute {
        return Err(Error::KindMismatch {
            expected: "absolute",
            actual: a.kind().to_string(),
        });
    }
    if weights.len() != a.len() {
        return Err(Error::DimensionMismatch {
            what: "weight vector length vs features",
            expected: a.len(),
            actual: weights.len(),
        });
    }
    Ok(a.values()
        .iter()
        .zip(weights.weights())
        .map(|(&v, &w)| w * psi.apply(v))
        .sum())
}

/// Weighted sum of transformed landmark-level distances.
pub fn star_score(dstar: &FeatureVector, psi: Psi, weights: &WeightVector) -> Result<f64> {
    if dstar.kind() != FeatureKind::LandmarkLevel {
        return Err(Error::KindMismatch {
            expected: "landmark-level",
            actual: dstar.kind().to_string(),
        });
    }
    if weights.len() != dstar.len() {
        return Err(Error::DimensionMismatch {
            what: "weight vector length vs features",
            expected: dstar.len(),
            actual: weights.len(),
        });
    }
    Ok(dstar
        .values()
        .iter()
        .zip(weights.weights())
        .map(|(&v, &w)| w * psi.apply(v))
        .sum())
}

/// Data-driven weights from the registered cohort's symmetric mean shape:
/// each pair is downweighted by its mean between-sides distance, so pairs
/// that are far apart (and thus expected to wobble more) do not dominate.
/// Solos get weight 1. `layout` selects per-coordinate expansion (basis)
/// or one weight per landmark entry (axis).
pub fn adaptive_weights(
    registered: &RegisteredDataset,
    scheme: &PairingScheme,
    layout: RegistrationMode,
) -> Result<WeightVector> {
    adaptive_weights_with(registered, scheme, layout, 1.0)
}

/// [`adaptive_weights`] with a configurable solo weight.
pub fn adaptive_weights_with(
    registered: &RegisteredDataset,
    scheme: &PairingScheme,
    layout: RegistrationMode,
    solo_weight: f64,
) -> Result<WeightVector> {
    let mean = &registered.mean_shape;
    scheme.validate(mean.k())?;
    let mut pair_weights = Vec::with_capacity(scheme.pair_count());
    for &(left, right) in scheme.pairs() {
        let dist = (mean.landmark(left) - mean.landmark(right)).norm();
        if dist < 1e-12 {
            return Err(Error::ZeroPairDistance { left, right });
        }
        pair_weights.push(1.0 / dist);
    }
    let mut weights = Vec::new();
    match layout {
        RegistrationMode::Basis => {
            let m = mean.m();
            for w in &pair_weights {
                weights.extend(std::iter::repeat_n(*w, m));
            }
        }
        RegistrationMode::Axis => weights.extend_from_slice(&pair_weights),
    }
    weights.extend(std::iter::repeat_n(solo_weight, scheme.solo_count()));
    WeightVector::with_source(weights, WeightSource::Adaptive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{landmark_features, signed_features};
    use crate::model::Configuration;
    use crate::registration::from_preregistered;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn diamond_scheme() -> PairingScheme {
        PairingScheme::from_one_based(&[(1, 3)], &[2, 4]).unwrap()
    }

    fn perturbed_square() -> Configuration {
        Configuration::from_rows(&[
            vec![-0.95, 0.36],
            vec![-0.28, 2.11],
            vec![0.99, 0.54],
            vec![-0.31, -1.37],
        ])
        .unwrap()
    }

    fn golden_absolute() -> FeatureVector {
        absolute_features(&signed_features(&perturbed_square(), &diamond_scheme()).unwrap())
    }

    #[test]
    fn golden_scores_match_hand_computation() {
        let a = golden_absolute();
        let l1 = ScoreSpec::l1(4).unwrap().evaluate(&a).unwrap();
        assert_relative_eq!(l1, 0.81, epsilon = 1e-12);
        let l2 = ScoreSpec::l2(4).unwrap().evaluate(&a).unwrap();
        assert_relative_eq!(l2, 0.2085, epsilon = 1e-12);
        let bock = ScoreSpec::bock(a.index_map()).unwrap().evaluate(&a).unwrap();
        assert_relative_eq!(bock, 0.383, epsilon = 1e-12);
        let star1 = ScoreSpec::star_l1(3).unwrap().evaluate(&a).unwrap();
        assert_relative_eq!(star1, 0.7743908891458577, epsilon = 1e-12);
    }

    #[test]
    fn star_quadratic_equals_coordinatewise_quadratic() {
        let a = golden_absolute();
        let l2 = ScoreSpec::l2(4).unwrap().evaluate(&a).unwrap();
        let star2 = ScoreSpec::star_l2(3).unwrap().evaluate(&a).unwrap();
        assert_relative_eq!(l2, star2, epsilon = 1e-12);
    }

    #[test]
    fn star_score_accepts_landmark_features_directly() {
        let dstar = landmark_features(&perturbed_square(), &diamond_scheme()).unwrap();
        let w = WeightVector::equal(3).unwrap();
        let s = star_score(&dstar, Psi::Linear, &w).unwrap();
        assert_relative_eq!(s, 0.7743908891458577, epsilon = 1e-12);
    }

    #[test]
    fn bock_score_agrees_on_signed_and_absolute_input() {
        let scheme = diamond_scheme();
        let d = signed_features(&perturbed_square(), &scheme).unwrap();
        let a = absolute_features(&d);
        let spec = ScoreSpec::bock(d.index_map()).unwrap();
        assert_relative_eq!(
            spec.evaluate(&d).unwrap(),
            spec.evaluate(&a).unwrap(),
            epsilon = 0.0
        );
    }

    #[test]
    fn coordinatewise_scores_reject_landmark_input() {
        let dstar = landmark_features(&perturbed_square(), &diamond_scheme()).unwrap();
        let err = ScoreSpec::l1(3).unwrap().evaluate(&dstar).unwrap_err();
        assert!(matches!(err, Error::KindMismatch { .. }));
    }

    #[test]
    fn scores_are_invariant_under_pair_reordering() {
        // six landmarks, two pairs, two solos, listed in two orders
        let x = Configuration::from_rows(&[
            vec![-1.0, 0.1, 0.3],
            vec![-2.1, 1.2, -0.4],
            vec![0.2, 0.5, 1.1],
            vec![1.1, 0.2, 0.25],
            vec![2.0, 1.15, -0.35],
            vec![-0.1, -1.4, 0.6],
        ])
        .unwrap();
        let s1 = PairingScheme::from_one_based(&[(1, 4), (2, 5)], &[3, 6]).unwrap();
        let s2 = PairingScheme::from_one_based(&[(2, 5), (1, 4)], &[6, 3]).unwrap();
        for scheme_pair in [(&s1, &s2)] {
            let a1 = absolute_features(&signed_features(&x, scheme_pair.0).unwrap());
            let a2 = absolute_features(&signed_features(&x, scheme_pair.1).unwrap());
            for make in [ScoreSpec::l1, ScoreSpec::l2] {
                let spec = make(a1.len()).unwrap();
                assert_relative_eq!(
                    spec.evaluate(&a1).unwrap(),
                    spec.evaluate(&a2).unwrap(),
                    epsilon = 1e-12
                );
            }
            let b1 = ScoreSpec::bock(a1.index_map()).unwrap().evaluate(&a1).unwrap();
            let b2 = ScoreSpec::bock(a2.index_map()).unwrap().evaluate(&a2).unwrap();
            assert_relative_eq!(b1, b2, epsilon = 1e-12);
        }
    }

    #[test]
    fn weight_vector_validation() {
        assert!(matches!(
            WeightVector::user(vec![0.5, -0.1]),
            Err(Error::NegativeWeight { position: 1 })
        ));
        assert!(matches!(
            WeightVector::user(vec![0.0, 0.0]),
            Err(Error::ZeroWeights)
        ));
        assert!(WeightVector::user(vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn adaptive_weights_follow_inverse_pair_distances() {
        // symmetric shape with pair distances 2 and 4
        let x = Configuration::from_rows(&[
            vec![-1.0, 0.0],
            vec![-2.0, 1.0],
            vec![1.0, 0.0],
            vec![2.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let scheme = PairingScheme::from_one_based(&[(1, 3), (2, 4)], &[5]).unwrap();
        let reg = from_preregistered(&[x], &scheme, RegistrationMode::Basis).unwrap();
        let w = adaptive_weights(&reg, &scheme, RegistrationMode::Basis).unwrap();
        assert_eq!(w.weights(), &[0.5, 0.5, 0.25, 0.25, 1.0]);
        assert_eq!(w.source(), WeightSource::Adaptive);
        let wa = adaptive_weights_with(&reg, &scheme, RegistrationMode::Axis, 0.7).unwrap();
        assert_eq!(wa.weights(), &[0.5, 0.25, 0.7]);
    }

    #[test]
    fn adaptive_weights_reject_coincident_pairs() {
        let x = Configuration::from_rows(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]])
            .unwrap();
        let scheme = PairingScheme::from_one_based(&[(1, 2)], &[3]).unwrap();
        let reg = from_preregistered(&[x], &scheme, RegistrationMode::Basis).unwrap();
        let err = adaptive_weights(&reg, &scheme, RegistrationMode::Basis).unwrap_err();
        assert!(matches!(err, Error::ZeroPairDistance { left: 0, right: 1 }));
    }

    proptest! {
        /// The quadratic landmark score and the quadratic coordinatewise
        /// score are the same functional on every shape.
        #[test]
        fn star_l2_identity_holds_on_random_shapes(
            entries in proptest::collection::vec(-5.0f64..5.0, 18)
        ) {
            let rows: Vec<Vec<f64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let x = Configuration::from_rows(&rows).unwrap();
            let scheme = PairingScheme::from_one_based(&[(1, 4), (2, 5)], &[3, 6]).unwrap();
            let a = absolute_features(&signed_features(&x, &scheme).unwrap());
            let l2 = ScoreSpec::l2(a.len()).unwrap().evaluate(&a).unwrap();
            let s2 = ScoreSpec::star_l2(4).unwrap().evaluate(&a).unwrap();
            prop_assert!((l2 - s2).abs() <= 1e-12 * l2.abs().max(1.0));
        }
    }
}
