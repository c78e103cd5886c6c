//! Synthetic cohorts with known ground truth.
//!
//! A bilaterally symmetric template is perturbed per subject: group 2
//! receives asymmetry offsets planted so the expected signed feature shift
//! equals the requested offset exactly, both groups receive isotropic
//! Gaussian landmark noise, and optionally a random rigid motion hides the
//! registration. Generation is bit-reproducible: subject n draws from an
//! independent RNG stream derived from (seed, n), so a cohort never
//! depends on generation order.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{reflect_config, Configuration, FeatureIndex, PairingScheme};

/// Subject RNG streams start here so they can never collide with the
/// bootstrap replicate streams (1..=B) under a shared seed.
const SUBJECT_STREAM_BASE: u64 = 1 << 32;

/// Half-width of the uniform translation used as nuisance motion.
const NUISANCE_SHIFT: f64 = 5.0;

/// Everything that determines a synthetic cohort.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub scheme: PairingScheme,
    /// Bilaterally symmetric base shape; see [`make_symmetric_template`].
    pub template: Configuration,
    /// Standard deviation of the per-coordinate Gaussian landmark noise.
    pub noise_sigma: f64,
    /// Planted signed-feature shifts for group 2, one per coordinatewise
    /// feature in canonical order.
    pub offsets: Vec<f64>,
    pub n1: usize,
    pub n2: usize,
    /// Apply a random rigid motion per subject, hiding the frame.
    pub nuisance_motion: bool,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        self.scheme.validate(self.template.k())?;
        let j = self.scheme.basis_feature_count(self.template.m());
        if self.offsets.len() != j {
            return Err(Error::DimensionMismatch {
                what: "offset vector length vs feature count",
                expected: j,
                actual: self.offsets.len(),
            });
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::NonFinite {
                what: "noise standard deviation",
            });
        }
        if self.offsets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "offset vector",
            });
        }
        if self.n1 + self.n2 == 0 {
            return Err(Error::EmptyInput { what: "cohort" });
        }
        let reflected = reflect_config(&self.template, &self.scheme)?;
        if reflected.coords() != self.template.coords() {
            return Err(Error::FileFormat {
                detail: "synthetic template must be exactly bilaterally symmetric".into(),
            });
        }
        Ok(())
    }
}

/// One generated subject; group is 1 or 2.
#[derive(Debug, Clone)]
pub struct SynthSubject {
    pub id: String,
    pub group: u8,
    pub config: Configuration,
}

/// What was actually planted, for later verification.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub offsets: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub subjects: Vec<SynthSubject>,
    pub truth: GroundTruth,
}

/// The scheme convention of [`make_symmetric_template`]: pair i joins
/// rows i and k_p + i, solos fill the remaining rows.
pub fn block_scheme(k_p: usize, k_s: usize) -> PairingScheme {
    let pairs = (0..k_p).map(|i| (i, k_p + i)).collect();
    let solos = (2 * k_p..2 * k_p + k_s).collect();
    PairingScheme::new(pairs, solos).expect("block layout has no duplicates")
}

/// Random bilaterally symmetric template under the block scheme: each
/// right-side landmark sits at least 0.5 off the plane with standard
/// normal in-plane coordinates, the left side mirrors it exactly, and
/// solos lie on the plane.
pub fn make_symmetric_template(
    k_p: usize,
    k_s: usize,
    m: usize,
    seed: u64,
) -> Result<Configuration> {
    symmetric_template_for(&block_scheme(k_p, k_s), m, seed)
}

/// Like [`make_symmetric_template`] but honouring an arbitrary scheme's
/// landmark layout.
pub fn symmetric_template_for(
    scheme: &PairingScheme,
    m: usize,
    seed: u64,
) -> Result<Configuration> {
    if scheme.landmark_count() == 0 {
        return Err(Error::EmptyInput {
            what: "pairing scheme",
        });
    }
    if m == 0 {
        return Err(Error::EmptyInput {
            what: "coordinate dimension",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = scheme.landmark_count();
    let mut coords = DMatrix::zeros(k, m);
    for &(left, right) in scheme.pairs() {
        // keep pairs clearly separated so inverse-distance weights exist
        let off_plane = 0.5 + rng.gen::<f64>();
        coords[(right, 0)] = off_plane;
        coords[(left, 0)] = -off_plane;
        for c in 1..m {
            let v: f64 = rng.sample(StandardNormal);
            coords[(right, c)] = v;
            coords[(left, c)] = v;
        }
    }
    for &solo in scheme.solos() {
        for c in 1..m {
            coords[(solo, c)] = rng.sample(StandardNormal);
        }
    }
    Configuration::new(coords)
}

/// Proper random rotation: QR of a Gaussian matrix with the signs of the
/// triangular diagonal absorbed, determinant corrected to +1.
pub fn random_rotation<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let gauss = DMatrix::from_fn(m, m, |_, _| rng.sample(StandardNormal));
    let qr = gauss.qr();
    let r_diag: Vec<f64> = (0..m).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        let last = m - 1;
        for i in 0..m {
            q[(i, last)] = -q[(i, last)];
        }
    }
    q
}

/// Generates the cohort: group 1 subjects first (ids s001, s002, ...),
/// then group 2.
pub fn generate_dataset(spec: &SynthSpec) -> Result<SynthDataset> {
    spec.validate()?;
    let m = spec.template.m();
    let map = spec.scheme.basis_index_map(m);
    let mut subjects = Vec::with_capacity(spec.n1 + spec.n2);
    for n in 0..spec.n1 + spec.n2 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(SUBJECT_STREAM_BASE + n as u64);
        let group: u8 = if n < spec.n1 { 1 } else { 2 };
        let mut coords = spec.template.coords().clone();

        if group == 2 {
            plant_offsets(&mut coords, &map, &spec.offsets);
        }
        for v in coords.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += spec.noise_sigma * z;
        }
        if spec.nuisance_motion {
            let rot = random_rotation(m, &mut rng);
            coords *= &rot;
            for c in 0..m {
                let shift = rng.gen_range(-NUISANCE_SHIFT..NUISANCE_SHIFT);
                for i in 0..coords.nrows() {
                    coords[(i, c)] += shift;
                }
            }
        }
        subjects.push(SynthSubject {
            id: format!("s{:03}", n + 1),
            group,
            config: Configuration::new(coords)?,
        });
    }
    Ok(SynthDataset {
        subjects,
        truth: GroundTruth {
            offsets: spec.offsets.clone(),
            seed: spec.seed,
        },
    })
}

/// Displaces pair landmarks by half the offset each, signed so the
/// corresponding signed feature shifts by exactly the offset; solos move
/// off-plane by the full offset for the same reason.
fn plant_offsets(coords: &mut DMatrix<f64>, map: &[FeatureIndex], offsets: &[f64]) {
    for (j, &delta) in offsets.iter().enumerate() {
        if delta == 0.0 {
            continue;
        }
        match map[j] {
            FeatureIndex::Pair {
                left,
                right,
                coord: Some(0),
            } => {
                // feature is the sum of the two off-plane coordinates
                coords[(left, 0)] += delta / 2.0;
                coords[(right, 0)] += delta / 2.0;
            }
            FeatureIndex::Pair {
                left,
                right,
                coord: Some(c),
            } => {
                // feature is left minus right
                coords[(left, c)] += delta / 2.0;
                coords[(right, c)] -= delta / 2.0;
            }
            FeatureIndex::Solo { landmark } => {
                coords[(landmark, 0)] += delta;
            }
            FeatureIndex::Pair { coord: None, .. } => {
                unreachable!("coordinatewise maps carry explicit coordinates")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::signed_features;
    use approx::assert_relative_eq;

    fn base_spec() -> SynthSpec {
        let scheme = block_scheme(2, 1);
        let template = make_symmetric_template(2, 1, 3, 11).unwrap();
        SynthSpec {
            offsets: vec![0.0; scheme.basis_feature_count(3)],
            scheme,
            template,
            noise_sigma: 0.0,
            n1: 2,
            n2: 2,
            nuisance_motion: false,
            seed: 99,
        }
    }

    #[test]
    fn template_is_exactly_symmetric() {
        let scheme = block_scheme(3, 2);
        let t = make_symmetric_template(3, 2, 3, 42).unwrap();
        let r = reflect_config(&t, &scheme).unwrap();
        assert_eq!(r.coords(), t.coords());
        let d = signed_features(&t, &scheme).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn template_pairs_are_separated() {
        let scheme = block_scheme(4, 0);
        let t = symmetric_template_for(&scheme, 2, 5).unwrap();
        for &(l, r) in scheme.pairs() {
            let dist = (t.landmark(l) - t.landmark(r)).norm();
            assert!(dist >= 1.0, "pair distance {dist} too small");
        }
    }

    #[test]
    fn noiseless_cohort_reproduces_the_template() {
        let spec = base_spec();
        let ds = generate_dataset(&spec).unwrap();
        assert_eq!(ds.subjects.len(), 4);
        for s in &ds.subjects {
            assert_eq!(s.config.coords(), spec.template.coords());
        }
        assert_eq!(ds.subjects[0].id, "s001");
        assert_eq!(ds.subjects[0].group, 1);
        assert_eq!(ds.subjects[3].group, 2);
    }

    #[test]
    fn planted_offsets_shift_signed_features_exactly() {
        let mut spec = base_spec();
        // one offset of each flavor: pair off-plane, pair in-plane, solo
        spec.offsets[0] = 0.8; // pair 1, coordinate 1
        spec.offsets[4] = -0.6; // pair 2, coordinate 2
        spec.offsets[6] = 0.3; // solo
        let ds = generate_dataset(&spec).unwrap();
        for s in &ds.subjects {
            let d = signed_features(&s.config, &spec.scheme).unwrap();
            let expected: Vec<f64> = if s.group == 2 {
                spec.offsets.clone()
            } else {
                vec![0.0; spec.offsets.len()]
            };
            for (v, e) in d.values().iter().zip(&expected) {
                assert_relative_eq!(*v, *e, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn generation_is_bit_reproducible() {
        let mut spec = base_spec();
        spec.noise_sigma = 0.05;
        spec.nuisance_motion = true;
        let a = generate_dataset(&spec).unwrap();
        let b = generate_dataset(&spec).unwrap();
        for (x, y) in a.subjects.iter().zip(&b.subjects) {
            assert_eq!(x.config.coords(), y.config.coords());
        }
        spec.seed += 1;
        let c = generate_dataset(&spec).unwrap();
        assert_ne!(a.subjects[0].config.coords(), c.subjects[0].config.coords());
    }

    #[test]
    fn nuisance_motion_is_rigid() {
        let mut spec = base_spec();
        spec.nuisance_motion = true;
        let ds = generate_dataset(&spec).unwrap();
        let t = &spec.template;
        for s in &ds.subjects {
            for a in 0..t.k() {
                for b in (a + 1)..t.k() {
                    let before = (t.landmark(a) - t.landmark(b)).norm();
                    let after = (s.config.landmark(a) - s.config.landmark(b)).norm();
                    assert_relative_eq!(before, after, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn random_rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 1..=4 {
            let q = random_rotation(m, &mut rng);
            let gram = q.transpose() * &q;
            assert_relative_eq!(gram, DMatrix::identity(m, m), epsilon = 1e-12);
            assert_relative_eq!(q.determinant(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spec_validation_catches_mismatches() {
        let mut spec = base_spec();
        spec.offsets.pop();
        assert!(matches!(
            spec.validate(),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut spec = base_spec();
        let mut coords = spec.template.coords().clone();
        coords[(0, 0)] += 0.1;
        spec.template = Configuration::new(coords).unwrap();
        assert!(matches!(spec.validate(), Err(Error::FileFormat { .. })));
    }
}
