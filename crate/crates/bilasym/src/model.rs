//! Core domain types: landmark configurations, bilateral pairing schemes,
//! midplanes, rigid motions, and asymmetry feature vectors.
//!
//! Conventions used throughout the crate:
//! - a configuration is a K x M matrix whose rows are landmark coordinates;
//! - landmark indices are 0-based internally and 1-based in files and
//!   reports, converted exactly once at the I/O boundary;
//! - after registration the symmetry midplane is the coordinate plane
//!   {x_1 = 0}, so coordinate 1 is the off-plane direction.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A landmark configuration: K landmarks in M coordinates, rows = landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    coords: DMatrix<f64>,
}

impl Configuration {
    /// Wraps a coordinate matrix. All entries must be finite and both
    /// dimensions nonzero.
    pub fn new(coords: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() == 0 || coords.ncols() == 0 {
            return Err(Error::EmptyInput {
                what: "configuration",
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "configuration",
            });
        }
        Ok(Self { coords })
    }

    /// Builds a configuration from per-landmark coordinate rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput {
                what: "configuration",
            });
        }
        let m = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::FileFormat {
                    detail: format!(
                        "landmark {} has {} coordinates, expected {}",
                        i + 1,
                        row.len(),
                        m
                    ),
                });
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(rows.len(), m, &flat))
    }

    /// Number of landmarks K.
    pub fn k(&self) -> usize {
        self.coords.nrows()
    }

    /// Coordinate dimension M.
    pub fn m(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.coords
    }

    /// Coordinates of landmark `k` as a column vector.
    pub fn landmark(&self, k: usize) -> DVector<f64> {
        self.coords.row(k).transpose()
    }

    /// Mean of the landmark rows.
    pub fn centroid(&self) -> DVector<f64> {
        let k = self.k() as f64;
        let mut c = DVector::zeros(self.m());
        for row in self.coords.row_iter() {
            c += row.transpose();
        }
        c / k
    }

    /// The same configuration translated so its centroid is the origin.
    pub fn centered(&self) -> Configuration {
        let c = self.centroid();
        let mut coords = self.coords.clone();
        for mut row in coords.row_iter_mut() {
            row -= c.transpose();
        }
        Configuration { coords }
    }

    /// Rows as plain vectors, for serialization.
    pub fn rows_vec(&self) -> Vec<Vec<f64>> {
        self.coords
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// Partition of the landmark set into bilateral pairs and midline solos.
///
/// Every landmark belongs to exactly one pair or is a solo. Indices are
/// 0-based; use [`PairingScheme::from_one_based`] at the I/O boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingScheme {
    pairs: Vec<(usize, usize)>,
    solos: Vec<usize>,
}

impl PairingScheme {
    /// Builds a scheme from 0-based indices. Rejects any landmark that
    /// appears twice (including a landmark paired with itself).
    pub fn new(pairs: Vec<(usize, usize)>, solos: Vec<usize>) -> Result<Self> {
        let scheme = Self { pairs, solos };
        let mut seen = std::collections::BTreeSet::new();
        for idx in scheme.iter_landmarks() {
            if !seen.insert(idx) {
                return Err(Error::DuplicateIndex(idx));
            }
        }
        Ok(scheme)
    }

    /// Builds a scheme from the 1-based indices used in files and reports.
    pub fn from_one_based(pairs: &[(usize, usize)], solos: &[usize]) -> Result<Self> {
        for &(l, r) in pairs {
            if l == 0 || r == 0 {
                return Err(Error::FileFormat {
                    detail: "landmark indices in files are 1-based; found 0".into(),
                });
            }
        }
        if solos.contains(&0) {
            return Err(Error::FileFormat {
                detail: "landmark indices in files are 1-based; found 0".into(),
            });
        }
        Self::new(
            pairs.iter().map(|&(l, r)| (l - 1, r - 1)).collect(),
            solos.iter().map(|&s| s - 1).collect(),
        )
    }

    /// Checks the scheme against a configuration of `k` landmarks: every
    /// index in range, every landmark covered exactly once.
    pub fn validate(&self, k: usize) -> Result<()> {
        let mut covered = vec![false; k];
        for idx in self.iter_landmarks() {
            if idx >= k {
                return Err(Error::IndexOutOfRange { index: idx, count: k });
            }
            // new() rejects duplicates, so each in-range index is fresh
            covered[idx] = true;
        }
        if let Some(missing) = covered.iter().position(|&c| !c) {
            return Err(Error::MissingIndex(missing));
        }
        Ok(())
    }

    fn iter_landmarks(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs
            .iter()
            .flat_map(|&(l, r)| [l, r])
            .chain(self.solos.iter().copied())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn solos(&self) -> &[usize] {
        &self.solos
    }

    /// Number of bilateral pairs K_P.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Number of midline solos K_S.
    pub fn solo_count(&self) -> usize {
        self.solos.len()
    }

    /// Total number of landmarks the scheme describes: 2 K_P + K_S.
    pub fn landmark_count(&self) -> usize {
        2 * self.pairs.len() + self.solos.len()
    }

    /// Length of a coordinatewise feature vector: M K_P + K_S.
    pub fn basis_feature_count(&self, m: usize) -> usize {
        m * self.pairs.len() + self.solos.len()
    }

    /// Length of a landmark-level feature vector: K_P + K_S.
    pub fn axis_feature_count(&self) -> usize {
        self.pairs.len() + self.solos.len()
    }

    /// Feature identities of a coordinatewise vector in canonical order:
    /// for each pair its M coordinates, then the solos.
    pub fn basis_index_map(&self, m: usize) -> Vec<FeatureIndex> {
        let mut map = Vec::with_capacity(self.basis_feature_count(m));
        for &(left, right) in &self.pairs {
            for coord in 0..m {
                map.push(FeatureIndex::Pair {
                    left,
                    right,
                    coord: Some(coord),
                });
            }
        }
        for &landmark in &self.solos {
            map.push(FeatureIndex::Solo { landmark });
        }
        map
    }

    /// Feature identities of a landmark-level vector: one entry per pair,
    /// then the solos.
    pub fn axis_index_map(&self) -> Vec<FeatureIndex> {
        let mut map = Vec::with_capacity(self.axis_feature_count());
        for &(left, right) in &self.pairs {
            map.push(FeatureIndex::Pair {
                left,
                right,
                coord: None,
            });
        }
        for &landmark in &self.solos {
            map.push(FeatureIndex::Solo { landmark });
        }
        map
    }
}

/// Reflects a configuration through the coordinate plane {x_1 = 0} and
/// swaps the rows of every bilateral pair.
///
/// This is the relabelled mirror image: a configuration is bilaterally
/// symmetric about {x_1 = 0} exactly when it equals its own image. The
/// map is an involution.
pub fn reflect_config(x: &Configuration, scheme: &PairingScheme) -> Result<Configuration> {
    scheme.validate(x.k())?;
    let mut coords = x.coords().clone();
    for v in coords.column_mut(0).iter_mut() {
        *v = -*v;
    }
    for &(l, r) in scheme.pairs() {
        coords.swap_rows(l, r);
    }
    Ok(Configuration { coords })
}

/// A hyperplane {x : n'x = b} with unit normal `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    normal: DVector<f64>,
    offset: f64,
}

impl Plane {
    const UNIT_TOL: f64 = 1e-10;

    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Self> {
        if normal.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::NonFinite { what: "plane" });
        }
        let norm = normal.norm();
        if (norm - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::NonUnitNormal { norm });
        }
        Ok(Self { normal, offset })
    }

    /// The canonical registered midplane {x_1 = 0} in dimension `m`.
    pub fn canonical(m: usize) -> Self {
        let mut normal = DVector::zeros(m);
        normal[0] = 1.0;
        Self { normal, offset: 0.0 }
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// A rigid motion acting on row-vector configurations as X -> X R + 1 c',
/// i.e. each landmark x maps to R'x + c. `rotation` must be a proper
/// rotation (orthogonal, determinant +1).
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion {
    rotation: DMatrix<f64>,
    translation: DVector<f64>,
}

impl RigidMotion {
    const ORTHO_TOL: f64 = 1e-10;

    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let m = rotation.nrows();
        if rotation.ncols() != m {
            return Err(Error::InvalidRotation {
                detail: format!("matrix is {}x{}, expected square", m, rotation.ncols()),
            });
        }
        if translation.len() != m {
            return Err(Error::DimensionMismatch {
                what: "translation length vs rotation size",
                expected: m,
                actual: translation.len(),
            });
        }
        if rotation.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "rigid motion" });
        }
        let gram = rotation.transpose() * &rotation;
        let dev = (&gram - DMatrix::identity(m, m)).norm();
        if dev > Self::ORTHO_TOL {
            return Err(Error::InvalidRotation {
                detail: format!("R'R deviates from identity by {dev:.3e}"),
            });
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > Self::ORTHO_TOL {
            return Err(Error::InvalidRotation {
                detail: format!("determinant is {det}, expected +1"),
            });
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            rotation: DMatrix::identity(m, m),
            translation: DVector::zeros(m),
        }
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }
}

/// What a feature value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Signed elementary asymmetry d_j.
    Signed,
    /// Absolute elementary asymmetry a_j = |d_j|.
    Absolute,
    /// Per-landmark asymmetry: Euclidean pair distance d*, |d| for solos.
    LandmarkLevel,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FeatureKind::Signed => "signed",
            FeatureKind::Absolute => "absolute",
            FeatureKind::LandmarkLevel => "landmark-level",
        };
        f.write_str(s)
    }
}

/// Which registration a feature vector assumes.
///
/// `Basis` means the full coordinate frame is pinned (coordinatewise
/// features are meaningful); `Axis` means only the off-plane direction is
/// pinned, so just landmark-level features are available. For M = 2 the
/// two coincide up to an in-plane rotation convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegistrationMode {
    Axis,
    Basis,
}

impl fmt::Display for RegistrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegistrationMode::Axis => "axis",
            RegistrationMode::Basis => "basis",
        })
    }
}

/// Identity of one feature position: which landmarks (and, for
/// coordinatewise features, which coordinate) it was computed from.
/// Indices are 0-based; `Display` renders them 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureIndex {
    Pair {
        left: usize,
        right: usize,
        /// `Some(c)` for the coordinate-c feature of the pair, `None` for
        /// the landmark-level pair distance.
        coord: Option<usize>,
    },
    Solo { landmark: usize },
}

impl fmt::Display for FeatureIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FeatureIndex::Pair {
                left,
                right,
                coord: Some(c),
            } => write!(f, "pair ({}, {}), coordinate {}", left + 1, right + 1, c + 1),
            FeatureIndex::Pair {
                left,
                right,
                coord: None,
            } => write!(f, "pair ({}, {})", left + 1, right + 1),
            FeatureIndex::Solo { landmark } => write!(f, "solo {}", landmark + 1),
        }
    }
}

/// A vector of asymmetry features for one subject, together with the
/// metadata needed to interpret each position.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    kind: FeatureKind,
    registration: RegistrationMode,
    index_map: Vec<FeatureIndex>,
}

impl FeatureVector {
    pub fn new(
        values: Vec<f64>,
        kind: FeatureKind,
        registration: RegistrationMode,
        index_map: Vec<FeatureIndex>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput {
                what: "feature vector",
            });
        }
        if values.len() != index_map.len() {
            return Err(Error::DimensionMismatch {
                what: "feature values vs index map",
                expected: index_map.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "feature vector",
            });
        }
        if kind != FeatureKind::Signed && values.iter().any(|&v| v < 0.0) {
            return Err(Error::KindMismatch {
                expected: "nonnegative values for a magnitude feature vector",
                actual: "a negative entry".into(),
            });
        }
        Ok(Self {
            values,
            kind,
            registration,
            index_map,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn registration(&self) -> RegistrationMode {
        self.registration
    }

    pub fn index_map(&self) -> &[FeatureIndex] {
        &self.index_map
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Feature vectors for two groups under comparison. Group 2 is the group
/// hypothesized to be more asymmetric; all vectors must share length,
/// kind, registration, and feature identities.
#[derive(Debug, Clone)]
pub struct TwoGroupDataset {
    group1: Vec<FeatureVector>,
    group2: Vec<FeatureVector>,
}

impl TwoGroupDataset {
    pub fn new(group1: Vec<FeatureVector>, group2: Vec<FeatureVector>) -> Result<Self> {
        let first = group1
            .first()
            .or_else(|| group2.first())
            .ok_or(Error::EmptyInput {
                what: "two-group dataset",
            })?
            .clone();
        for fv in group1.iter().chain(group2.iter()) {
            if fv.len() != first.len() {
                return Err(Error::DimensionMismatch {
                    what: "feature vector length across subjects",
                    expected: first.len(),
                    actual: fv.len(),
                });
            }
            if fv.kind() != first.kind()
                || fv.registration() != first.registration()
                || fv.index_map() != first.index_map()
            {
                return Err(Error::KindMismatch {
                    expected: "identical feature kind, registration, and identities across subjects",
                    actual: "a mismatching subject".into(),
                });
            }
        }
        Ok(Self { group1, group2 })
    }

    pub fn group1(&self) -> &[FeatureVector] {
        &self.group1
    }

    pub fn group2(&self) -> &[FeatureVector] {
        &self.group2
    }

    pub fn n1(&self) -> usize {
        self.group1.len()
    }

    pub fn n2(&self) -> usize {
        self.group2.len()
    }

    /// Number of feature positions J.
    pub fn feature_count(&self) -> usize {
        self.group1
            .first()
            .or_else(|| self.group2.first())
            .map(|fv| fv.len())
            .unwrap_or(0)
    }

    pub fn kind(&self) -> FeatureKind {
        self.group1
            .first()
            .or_else(|| self.group2.first())
            .expect("dataset is nonempty by construction")
            .kind()
    }

    pub fn index_map(&self) -> &[FeatureIndex] {
        self.group1
            .first()
            .or_else(|| self.group2.first())
            .expect("dataset is nonempty by construction")
            .index_map()
    }

    /// Values of feature `j` across one group.
    pub fn feature_column(&self, group: u8, j: usize) -> Vec<f64> {
        let group = match group {
            1 => &self.group1,
            2 => &self.group2,
            _ => panic!("group must be 1 or 2"),
        };
        group.iter().map(|fv| fv.values()[j]).collect()
    }
}
