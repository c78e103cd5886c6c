//! Elementary asymmetry features of a registered configuration.
//!
//! With the midplane at {x_1 = 0}, a perfectly symmetric shape has every
//! pair summing to zero in coordinate 1, agreeing in the remaining
//! coordinates, and every solo sitting on the plane. The signed features
//! measure exactly these departures, in the canonical order: for each pair
//! its M coordinates, then the solos.

use crate::error::{Error, Result};
use crate::model::{
    Configuration, FeatureIndex, FeatureKind, FeatureVector, PairingScheme, RegistrationMode,
};

/// Signed coordinatewise asymmetries of a basis-registered configuration:
/// pair coordinate 1 is the sum of the two first coordinates, pair
/// coordinates 2..M are left minus right, and each solo contributes its
/// first coordinate. Zero exactly on bilaterally symmetric shapes.
pub fn signed_features(x: &Configuration, scheme: &PairingScheme) -> Result<FeatureVector> {
    scheme.validate(x.k())?;
    let m = x.m();
    let coords = x.coords();
    let mut values = Vec::with_capacity(scheme.basis_feature_count(m));
    for &(l, r) in scheme.pairs() {
        values.push(coords[(l, 0)] + coords[(r, 0)]);
        for c in 1..m {
            values.push(coords[(l, c)] - coords[(r, c)]);
        }
    }
    for &s in scheme.solos() {
        values.push(coords[(s, 0)]);
    }
    FeatureVector::new(
        values,
        FeatureKind::Signed,
        RegistrationMode::Basis,
        scheme.basis_index_map(m),
    )
}

/// Entrywise magnitudes. Signed features become absolute ones; magnitude
/// kinds pass through unchanged.
pub fn absolute_features(d: &FeatureVector) -> FeatureVector {
    let kind = match d.kind() {
        FeatureKind::Signed | FeatureKind::Absolute => FeatureKind::Absolute,
        FeatureKind::LandmarkLevel => FeatureKind::LandmarkLevel,
    };
    let values = d.values().iter().map(|v| v.abs()).collect();
    FeatureVector::new(values, kind, d.registration(), d.index_map().to_vec())
        .expect("magnitudes of a valid vector are valid")
}

/// Landmark-level asymmetries: the Euclidean distance between each pair's
/// signed coordinate block and zero (i.e. the length of the pair's signed
/// feature sub-vector), plus the absolute off-plane coordinate of each
/// solo. Needs only axis registration to be meaningful, so the result is
/// tagged `Axis`.
pub fn landmark_features(x: &Configuration, scheme: &PairingScheme) -> Result<FeatureVector> {
    let signed = signed_features(x, scheme)?;
    landmark_from_coordinatewise(&signed)
}

/// Collapses a coordinatewise feature vector (signed or absolute) to
/// landmark level: root of the summed squares per pair, magnitude per
/// solo. The coordinatewise registration carries more information than the
/// result needs, so this is always valid for basis-registered input.
pub fn landmark_from_coordinatewise(fv: &FeatureVector) -> Result<FeatureVector> {
    if fv.kind() == FeatureKind::LandmarkLevel {
        return Err(Error::KindMismatch {
            expected: "a coordinatewise feature vector",
            actual: fv.kind().to_string(),
        });
    }
    if fv.registration() != RegistrationMode::Basis {
        return Err(Error::KindMismatch {
            expected: "basis-registered coordinatewise features",
            actual: format!("{} registration", fv.registration()),
        });
    }
    let mut values = Vec::new();
    let mut map = Vec::new();
    let mut i = 0;
    let entries = fv.index_map();
    while i < entries.len() {
        match entries[i] {
            FeatureIndex::Pair { left, right, .. } => {
                let mut sq = 0.0;
                let mut j = i;
                while j < entries.len() {
                    match entries[j] {
                        FeatureIndex::Pair {
                            left: l2,
                            right: r2,
                            ..
                        } if l2 == left && r2 == right => {
                            sq += fv.values()[j] * fv.values()[j];
                            j += 1;
                        }
                        _ => break,
                    }
                }
                values.push(sq.sqrt());
                map.push(FeatureIndex::Pair {
                    left,
                    right,
                    coord: None,
                });
                i = j;
            }
            FeatureIndex::Solo { landmark } => {
                values.push(fv.values()[i].abs());
                map.push(FeatureIndex::Solo { landmark });
                i += 1;
            }
        }
    }
    FeatureVector::new(values, FeatureKind::LandmarkLevel, RegistrationMode::Axis, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reflect_config;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn diamond_scheme() -> PairingScheme {
        PairingScheme::from_one_based(&[(1, 3)], &[2, 4]).unwrap()
    }

    fn square() -> Configuration {
        Configuration::from_rows(&[
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, -1.0],
        ])
        .unwrap()
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

    #[test]
    fn symmetric_square_has_zero_features() {
        let d = signed_features(&square(), &diamond_scheme()).unwrap();
        assert_eq!(d.values(), &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.kind(), FeatureKind::Signed);
    }

    #[test]
    fn perturbed_square_features_match_hand_computation() {
        let scheme = diamond_scheme();
        let d = signed_features(&perturbed_square(), &scheme).unwrap();
        let expected = [0.04, -0.18, -0.28, -0.31];
        for (v, e) in d.values().iter().zip(expected) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
        let a = absolute_features(&d);
        let expected_abs = [0.04, 0.18, 0.28, 0.31];
        for (v, e) in a.values().iter().zip(expected_abs) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
        assert_eq!(a.kind(), FeatureKind::Absolute);
    }

    #[test]
    fn landmark_level_features_match_hand_computation() {
        let scheme = diamond_scheme();
        let dstar = landmark_features(&perturbed_square(), &scheme).unwrap();
        assert_eq!(dstar.len(), 3);
        assert_relative_eq!(dstar.values()[0], 0.034f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(dstar.values()[1], 0.28, epsilon = 1e-12);
        assert_relative_eq!(dstar.values()[2], 0.31, epsilon = 1e-12);
        assert_eq!(dstar.kind(), FeatureKind::LandmarkLevel);
        assert_eq!(dstar.registration(), RegistrationMode::Axis);
        assert_eq!(dstar.index_map()[0].to_string(), "pair (1, 3)");
    }

    #[test]
    fn feature_order_is_pairs_then_solos() {
        let scheme = diamond_scheme();
        let d = signed_features(&perturbed_square(), &scheme).unwrap();
        assert_eq!(d.index_map()[0].to_string(), "pair (1, 3), coordinate 1");
        assert_eq!(d.index_map()[1].to_string(), "pair (1, 3), coordinate 2");
        assert_eq!(d.index_map()[2].to_string(), "solo 2");
        assert_eq!(d.index_map()[3].to_string(), "solo 4");
    }

    proptest! {
        /// Reflection negates every signed feature.
        #[test]
        fn signed_features_are_antisymmetric_under_reflection(
            entries in proptest::collection::vec(-10.0f64..10.0, 8)
        ) {
            let rows: Vec<Vec<f64>> = entries.chunks(2).map(|c| c.to_vec()).collect();
            let x = Configuration::from_rows(&rows).unwrap();
            let scheme = diamond_scheme();
            let d = signed_features(&x, &scheme).unwrap();
            let r = reflect_config(&x, &scheme).unwrap();
            let dr = signed_features(&r, &scheme).unwrap();
            for (a, b) in d.values().iter().zip(dr.values()) {
                prop_assert!((a + b).abs() < 1e-12);
            }
        }

        /// Absolute features are reflection-invariant, so the landmark
        /// distances are too.
        #[test]
        fn absolute_features_are_reflection_invariant(
            entries in proptest::collection::vec(-10.0f64..10.0, 8)
        ) {
            let rows: Vec<Vec<f64>> = entries.chunks(2).map(|c| c.to_vec()).collect();
            let x = Configuration::from_rows(&rows).unwrap();
            let scheme = diamond_scheme();
            let a = absolute_features(&signed_features(&x, &scheme).unwrap());
            let r = reflect_config(&x, &scheme).unwrap();
            let ar = absolute_features(&signed_features(&r, &scheme).unwrap());
            for (p, q) in a.values().iter().zip(ar.values()) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
