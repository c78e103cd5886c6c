//! Rigid registration and symmetry-midplane estimation.
//!
//! All alignment here is rotation + translation only; scale is left alone
//! because asymmetry magnitudes are measured in the units of the data.
//! The registered frame always places the midplane at {x_1 = 0}, so the
//! first coordinate is the off-plane direction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    reflect_config, Configuration, PairingScheme, Plane, RegistrationMode, RigidMotion,
};

/// Relative objective change below which the generalized alignment stops.
const GPA_TOL: f64 = 1e-10;
/// Iteration cap for the generalized alignment.
const GPA_MAX_ITERS: usize = 200;
/// Relative eigenvalue threshold below which a direction estimate is
/// treated as carrying no information.
const DIRECTION_TOL: f64 = 1e-12;

/// The Householder reflection I - 2 n n' through the hyperplane with unit
/// normal `n`. Symmetric, involutive, determinant -1.
pub fn householder(normal: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = normal.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitNormal { norm });
    }
    let m = normal.len();
    Ok(DMatrix::identity(m, m) - 2.0 * normal * normal.transpose())
}

/// Applies a rigid motion to a configuration: X -> X R + 1 c'.
pub fn apply_rigid(x: &Configuration, motion: &RigidMotion) -> Result<Configuration> {
    if motion.rotation().nrows() != x.m() {
        return Err(Error::DimensionMismatch {
            what: "rigid motion dimension vs configuration",
            expected: x.m(),
            actual: motion.rotation().nrows(),
        });
    }
    let mut coords = x.coords() * motion.rotation();
    for mut row in coords.row_iter_mut() {
        row += motion.translation().transpose();
    }
    Configuration::new(coords)
}

/// Carries a plane {x : n'x = b} through a rigid motion: the image plane
/// is {y : (R'n)'y = b + n'R c}, so the transformed configuration bears
/// the same relation to the transformed plane.
pub fn transform_plane(plane: &Plane, motion: &RigidMotion) -> Result<Plane> {
    if motion.rotation().nrows() != plane.normal().len() {
        return Err(Error::DimensionMismatch {
            what: "rigid motion dimension vs plane",
            expected: plane.normal().len(),
            actual: motion.rotation().nrows(),
        });
    }
    let normal = motion.rotation().transpose() * plane.normal();
    let shift = plane.normal().dot(&(motion.rotation() * motion.translation()));
    Plane::new(normal, plane.offset() + shift)
}

/// Best orthogonal matrix with the requested determinant sign maximizing
/// tr(Q'A), by singular value decomposition of A with the smallest
/// singular direction flipped when the sign demands it.
fn best_orthogonal_with_det(a: &DMatrix<f64>, target_det: f64) -> DMatrix<f64> {
    let m = a.nrows();
    let svd = a.clone().svd(true, true);
    let mut u = svd.u.expect("svd was requested with u");
    let v_t = svd.v_t.expect("svd was requested with v_t");
    let current = u.determinant() * v_t.determinant();
    if current * target_det < 0.0 {
        // singular values are sorted descending, so the last column is
        // the cheapest direction to flip
        let last = m - 1;
        for i in 0..m {
            u[(i, last)] = -u[(i, last)];
        }
    }
    u * v_t
}

/// Ordinary rotation-only Procrustes alignment of `x` onto `target`.
///
/// Returns the rigid motion minimizing ||X R + 1 c' - Y||_F together with
/// the attained residual. Fails with a degenerate-configuration error when
/// all landmarks of `x` coincide, since no rotation is then identifiable.
pub fn opa_rigid(x: &Configuration, target: &Configuration) -> Result<(RigidMotion, f64)> {
    if x.k() != target.k() {
        return Err(Error::DimensionMismatch {
            what: "landmark count of source vs target",
            expected: target.k(),
            actual: x.k(),
        });
    }
    if x.m() != target.m() {
        return Err(Error::DimensionMismatch {
            what: "coordinate dimension of source vs target",
            expected: target.m(),
            actual: x.m(),
        });
    }
    let x_bar = x.centroid();
    let y_bar = target.centroid();
    let xc = x.centered().into_inner();
    let yc = target.centered().into_inner();
    if xc.norm() < 1e-12 {
        return Err(Error::DegenerateConfiguration {
            detail: "all landmarks coincide, the aligning rotation is unidentifiable",
        });
    }
    let cross = xc.transpose() * &yc;
    let rotation = best_orthogonal_with_det(&cross, 1.0);
    // with the optimal translation the residual reduces to the centered one
    let residual = (&xc * &rotation - &yc).norm();
    let translation = &y_bar - rotation.transpose() * &x_bar;
    let motion = RigidMotion::new(rotation, translation)?;
    Ok((motion, residual))
}

/// Outcome of generalized rotation-only alignment.
#[derive(Debug, Clone)]
pub struct GpaResult {
    /// Landmark-wise average of the fitted configurations, centered.
    pub mean: Configuration,
    /// Inputs centered and rotated onto the mean, in input order.
    pub fitted: Vec<Configuration>,
    /// Total squared distance to the mean after each iteration; monotone
    /// non-increasing.
    pub objective_trace: Vec<f64>,
}

/// Generalized rotation-only Procrustes alignment.
///
/// Centers every configuration, then alternates aligning each onto the
/// current mean and averaging, until the relative change of the objective
/// sum ||Z_i - mean||_F^2 drops below 1e-10 (at most 200 iterations).
/// An objective that is zero up to rounding, relative to the total
/// squared size of the data, also counts as converged: exactly congruent
/// inputs align perfectly and leave no relative change to measure.
pub fn gpa(configs: &[Configuration]) -> Result<GpaResult> {
    if configs.len() < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: configs.len(),
        });
    }
    let k = configs[0].k();
    let m = configs[0].m();
    for c in configs {
        if c.k() != k {
            return Err(Error::DimensionMismatch {
                what: "landmark count across configurations",
                expected: k,
                actual: c.k(),
            });
        }
        if c.m() != m {
            return Err(Error::DimensionMismatch {
                what: "coordinate dimension across configurations",
                expected: m,
                actual: c.m(),
            });
        }
    }
    let centered: Vec<Configuration> = configs.iter().map(Configuration::centered).collect();
    let scale: f64 = centered.iter().map(|c| c.coords().norm_squared()).sum();
    let mut mean = centered[0].clone();
    let mut trace = Vec::new();
    let mut prev: Option<f64> = None;
    for _ in 0..GPA_MAX_ITERS {
        let mut fitted = Vec::with_capacity(centered.len());
        for c in &centered {
            let (motion, _) = opa_rigid(c, &mean)?;
            fitted.push(apply_rigid(c, &motion)?);
        }
        let mut avg = DMatrix::zeros(k, m);
        for f in &fitted {
            avg += f.coords();
        }
        avg /= centered.len() as f64;
        let new_mean = Configuration::new(avg)?;
        let objective: f64 = fitted
            .iter()
            .map(|f| (f.coords() - new_mean.coords()).norm_squared())
            .sum();
        trace.push(objective);
        let converged = objective <= GPA_TOL * GPA_TOL * scale
            || prev
                .map(|p| (p - objective).abs() <= GPA_TOL * p.max(f64::MIN_POSITIVE))
                .unwrap_or(false);
        mean = new_mean;
        prev = Some(objective);
        if converged {
            return Ok(GpaResult {
                mean,
                fitted,
                objective_trace: trace,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: GPA_MAX_ITERS,
    })
}

/// How the registered frame was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Coordinates were born in the registered frame.
    Known,
    /// An expert supplied already-registered coordinates.
    Expert,
    /// The frame was estimated from the data.
    Estimated,
}

/// A cohort expressed in a common frame with midplane {x_1 = 0}.
#[derive(Debug, Clone)]
pub struct RegisteredDataset {
    pub configs: Vec<Configuration>,
    /// Bilaterally symmetric mean shape in the registered frame.
    pub mean_shape: Configuration,
    /// Always the canonical plane (e_1, 0); kept explicit so downstream
    /// code never hardcodes the convention.
    pub plane: Plane,
    pub mode: RegistrationMode,
    pub provenance: Provenance,
}

/// Options for orienting the in-plane axes when no hint is available.
#[derive(Debug, Clone)]
pub struct OrientationOptions {
    /// Landmarks (0-based) whose centroid must sit on the positive side of
    /// coordinate 2. Defaults to the first landmark.
    pub up_landmarks: Vec<usize>,
}

impl Default for OrientationOptions {
    fn default() -> Self {
        Self {
            up_landmarks: vec![0],
        }
    }
}

/// Accepts expert-registered coordinates as they are: no centering, no
/// rotation. The stored mean shape is the arithmetic landmark-wise mean
/// symmetrized with its own reflection, which equals the mean over the
/// reflection-augmented sample.
pub fn from_preregistered(
    configs: &[Configuration],
    scheme: &PairingScheme,
    mode: RegistrationMode,
) -> Result<RegisteredDataset> {
    if configs.is_empty() {
        return Err(Error::EmptyInput {
            what: "configurations",
        });
    }
    let k = configs[0].k();
    let m = configs[0].m();
    scheme.validate(k)?;
    for c in configs {
        if c.k() != k || c.m() != m {
            return Err(Error::DimensionMismatch {
                what: "configuration sizes across subjects",
                expected: k * m,
                actual: c.k() * c.m(),
            });
        }
    }
    let mut avg = DMatrix::zeros(k, m);
    for c in configs {
        avg += c.coords();
    }
    avg /= configs.len() as f64;
    let mean = Configuration::new(avg)?;
    let mean_shape = symmetrize(&mean, scheme)?;
    Ok(RegisteredDataset {
        configs: configs.to_vec(),
        mean_shape,
        plane: Plane::canonical(m),
        mode,
        provenance: Provenance::Expert,
    })
}

/// (X + reflect(X)) / 2: the closest bilaterally symmetric configuration.
fn symmetrize(x: &Configuration, scheme: &PairingScheme) -> Result<Configuration> {
    let r = reflect_config(x, scheme)?;
    Configuration::new((x.coords() + r.coords()) * 0.5)
}

/// Estimates the symmetry midplane and expresses a cohort in the
/// registered frame. See [`estimate_midplane_with`] for the procedure.
pub fn estimate_midplane(
    configs: &[Configuration],
    scheme: &PairingScheme,
    mode: RegistrationMode,
    orientation_hint: Option<&Configuration>,
) -> Result<RegisteredDataset> {
    estimate_midplane_with(
        configs,
        scheme,
        mode,
        orientation_hint,
        &OrientationOptions::default(),
    )
}

/// Midplane estimation via reflection augmentation.
///
/// 1. Augment the sample with the relabelled mirror image of every
///    configuration (reflection through {x_1 = 0} plus pair interchange).
/// 2. Run generalized rotation-only alignment on the 2N configurations.
/// 3. Take the aligned mean; by construction it is nearly invariant under
///    the relabelled reflection.
/// 4. Rotate so the estimated symmetry plane becomes exactly {x_1 = 0}:
///    the off-plane direction is the dominant eigenvector of the summed
///    outer products of pair differences of the mean (falling back to the
///    least-spread direction of the solo landmarks when the pairs carry no
///    signal). The rotated mean is then symmetrized, which makes it an
///    exact fixed point of the reflection. In basis mode the in-plane axes
///    are pinned either against `orientation_hint` (best block rotation
///    over both in-plane reflection classes) or by principal in-plane axes
///    with the `up_landmarks` sign convention.
/// 5. In basis mode, each fitted configuration is finally aligned onto the
///    oriented mean with one more rotation-only fit. Axis mode skips both
///    the in-plane orientation and this last fit: only the off-plane
///    direction is pinned.
pub fn estimate_midplane_with(
    configs: &[Configuration],
    scheme: &PairingScheme,
    mode: RegistrationMode,
    orientation_hint: Option<&Configuration>,
    options: &OrientationOptions,
) -> Result<RegisteredDataset> {
    if configs.is_empty() {
        return Err(Error::EmptyInput {
            what: "configurations",
        });
    }
    let k = configs[0].k();
    let m = configs[0].m();
    scheme.validate(k)?;
    for c in configs {
        if c.k() != k || c.m() != m {
            return Err(Error::DimensionMismatch {
                what: "configuration sizes across subjects",
                expected: k * m,
                actual: c.k() * c.m(),
            });
        }
    }
    if let Some(h) = orientation_hint {
        if h.k() != k || h.m() != m {
            return Err(Error::DimensionMismatch {
                what: "orientation hint size vs configurations",
                expected: k * m,
                actual: h.k() * h.m(),
            });
        }
    }

    let mut augmented = configs.to_vec();
    for c in configs {
        augmented.push(reflect_config(c, scheme)?);
    }
    let fit = gpa(&augmented)?;

    let normal = off_plane_direction(&fit.mean, scheme)?;
    let gamma = rotation_with_first_column(&normal);
    let rotated_mean = Configuration::new(fit.mean.coords() * &gamma)?;
    let mean_sym = symmetrize(&rotated_mean, scheme)?;

    let (mean_shape, out_configs) = match mode {
        RegistrationMode::Axis => {
            let outs = fit
                .fitted
                .iter()
                .take(configs.len())
                .map(|z| Configuration::new(z.coords() * &gamma))
                .collect::<Result<Vec<_>>>()?;
            (mean_sym, outs)
        }
        RegistrationMode::Basis => {
            let q = in_plane_orientation(&mean_sym, orientation_hint, options)?;
            let oriented = Configuration::new(mean_sym.coords() * &q)?;
            let outs = fit
                .fitted
                .iter()
                .take(configs.len())
                .map(|z| {
                    let (motion, _) = opa_rigid(z, &oriented)?;
                    apply_rigid(z, &motion)
                })
                .collect::<Result<Vec<_>>>()?;
            (oriented, outs)
        }
    };

    Ok(RegisteredDataset {
        configs: out_configs,
        mean_shape,
        plane: Plane::canonical(m),
        mode,
        provenance: Provenance::Estimated,
    })
}

/// Direction perpendicular to the symmetry plane of a near-symmetric mean
/// shape: the dominant eigenvector of the summed outer products of pair
/// differences, since each pair difference is (up to noise) parallel to
/// the plane normal. When the pairs are degenerate the solos must span the
/// plane, and the normal is their least-spread direction.
fn off_plane_direction(mean: &Configuration, scheme: &PairingScheme) -> Result<DVector<f64>> {
    let m = mean.m();
    if m == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let scale = mean.coords().norm_squared();
    if scale < 1e-300 {
        return Err(Error::DegenerateConfiguration {
            detail: "mean shape collapsed to a point",
        });
    }

    let mut spread = DMatrix::zeros(m, m);
    for &(l, r) in scheme.pairs() {
        let d = mean.landmark(l) - mean.landmark(r);
        spread += &d * d.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(spread);
    let (i_max, lambda_max) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("m >= 1 eigenvalues");
    if lambda_max > &(DIRECTION_TOL * scale) {
        return Ok(canonical_sign(eig.eigenvectors.column(i_max).into_owned()));
    }

    // pairs carry no direction (all coincide in the mean); use the solos,
    // whose least-spread direction is the normal of the plane they fill
    let mut solo_spread = DMatrix::zeros(m, m);
    for &s in scheme.solos() {
        let y = mean.landmark(s);
        solo_spread += &y * y.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(solo_spread);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let second_smallest = eig.eigenvalues[order[1]];
    if second_smallest <= DIRECTION_TOL * scale {
        return Err(Error::DegenerateConfiguration {
            detail: "neither pairs nor solos determine the symmetry plane",
        });
    }
    Ok(canonical_sign(eig.eigenvectors.column(order[0]).into_owned()))
}

/// Normalizes a direction to unit length with its largest-magnitude entry
/// positive, so eigenvector sign noise cannot flip results between runs.
fn canonical_sign(mut v: DVector<f64>) -> DVector<f64> {
    v /= v.norm();
    let lead = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .expect("nonzero length");
    if v[lead] < 0.0 {
        v = -v;
    }
    v
}

/// A rotation whose first column is the given unit vector, so that
/// right-multiplying a configuration by it sends the direction `n` to the
/// first coordinate axis. Built from the Householder reflection that swaps
/// `n` with e_1, with one in-plane axis flipped to restore determinant +1.
fn rotation_with_first_column(n: &DVector<f64>) -> DMatrix<f64> {
    let m = n.len();
    let mut e1 = DVector::zeros(m);
    e1[0] = 1.0;
    let v = n - &e1;
    let vv = v.norm_squared();
    if vv < 1e-24 {
        return DMatrix::identity(m, m);
    }
    let h = DMatrix::identity(m, m) - (&v * v.transpose()) * (2.0 / vv);
    let mut gamma = h;
    let last = m - 1;
    for i in 0..m {
        gamma[(i, last)] = -gamma[(i, last)];
    }
    gamma
}

/// In-plane gauge for basis registration, as a block rotation that fixes
/// the {x_1 = 0} plane setwise. With a hint, searches both in-plane
/// reflection classes for the best fit; the hint's first coordinate term
/// makes the label-consistent class win. Without a hint, uses principal
/// in-plane axes of the symmetric mean with deterministic sign rules.
fn in_plane_orientation(
    mean_sym: &Configuration,
    hint: Option<&Configuration>,
    options: &OrientationOptions,
) -> Result<DMatrix<f64>> {
    let m = mean_sym.m();
    if m == 1 {
        return Ok(DMatrix::identity(1, 1));
    }

    if let Some(h) = hint {
        let hc = h.centered();
        let a = mean_sym.coords().transpose() * hc.coords();
        let a11 = a[(0, 0)];
        let a22 = a.view((1, 1), (m - 1, m - 1)).into_owned();
        let mut best: Option<(f64, DMatrix<f64>)> = None;
        for s in [1.0, -1.0] {
            let q2 = if m == 2 {
                DMatrix::from_element(1, 1, s)
            } else {
                best_orthogonal_with_det(&a22, s)
            };
            let objective = s * a11 + (q2.transpose() * &a22).trace();
            if best.as_ref().map(|(b, _)| objective > *b).unwrap_or(true) {
                best = Some((objective, block_rotation(s, &q2)));
            }
        }
        return Ok(best.expect("two candidates evaluated").1);
    }

    if options.up_landmarks.is_empty() {
        return Err(Error::EmptyInput {
            what: "up landmark subset",
        });
    }
    for &u in &options.up_landmarks {
        if u >= mean_sym.k() {
            return Err(Error::IndexOutOfRange {
                index: u,
                count: mean_sym.k(),
            });
        }
    }

    if m == 2 {
        // the only in-plane freedom is a joint flip of both axes
        let up: f64 = options
            .up_landmarks
            .iter()
            .map(|&u| mean_sym.coords()[(u, 1)])
            .sum::<f64>()
            / options.up_landmarks.len() as f64;
        return Ok(if up < 0.0 {
            -DMatrix::identity(2, 2)
        } else {
            DMatrix::identity(2, 2)
        });
    }

    // principal axes of the in-plane block, by decreasing spread
    let y = mean_sym.coords().columns(1, m - 1).into_owned();
    let cov = y.transpose() * &y;
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m - 1).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut q2 = DMatrix::zeros(m - 1, m - 1);
    for (t, &src) in order.iter().enumerate() {
        q2.set_column(t, &eig.eigenvectors.column(src));
    }
    // coordinate 2 points toward the up subset
    let mut up = DVector::zeros(m - 1);
    for &u in &options.up_landmarks {
        up += y.row(u).transpose();
    }
    if up.dot(&q2.column(0).into_owned()) < 0.0 {
        let neg = -q2.column(0).into_owned();
        q2.set_column(0, &neg);
    }
    // middle axes: largest-magnitude entry positive
    for t in 1..m - 2 {
        let col = q2.column(t).into_owned();
        let lead = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .expect("nonzero length");
        if col[lead] < 0.0 {
            q2.set_column(t, &(-col));
        }
    }
    // last axis: restore a proper rotation
    if q2.determinant() < 0.0 {
        let last = m - 2;
        let neg = -q2.column(last).into_owned();
        q2.set_column(last, &neg);
    }
    Ok(block_rotation(1.0, &q2))
}

/// diag(s, Q2) as a full matrix.
fn block_rotation(s: f64, q2: &DMatrix<f64>) -> DMatrix<f64> {
    let m = q2.nrows() + 1;
    let mut q = DMatrix::zeros(m, m);
    q[(0, 0)] = s;
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            q[(i + 1, j + 1)] = q2[(i, j)];
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn config(rows: &[Vec<f64>]) -> Configuration {
        Configuration::from_rows(rows).unwrap()
    }

    #[test]
    fn householder_of_diagonal_normal() {
        let n = DVector::from_vec(vec![1.0, 1.0]).normalize();
        let h = householder(&n).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        assert_relative_eq!(h, expected, epsilon = 1e-14);
        assert_relative_eq!(&h * &h, DMatrix::identity(2, 2), epsilon = 1e-14);
        assert_relative_eq!(h.determinant(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn householder_rejects_non_unit_normals() {
        let err = householder(&DVector::from_vec(vec![2.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NonUnitNormal { .. }));
    }

    #[test]
    fn plane_follows_a_pure_translation() {
        let plane = Plane::canonical(3);
        let motion = RigidMotion::new(
            DMatrix::identity(3, 3),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
        )
        .unwrap();
        let moved = transform_plane(&plane, &motion).unwrap();
        assert_relative_eq!(moved.normal(), plane.normal(), epsilon = 1e-15);
        assert_relative_eq!(moved.offset(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn plane_transform_is_consistent_with_point_transform() {
        // a point on the plane must land on the transformed plane
        let normal = DVector::from_vec(vec![0.6, 0.8]);
        let plane = Plane::new(normal.clone(), 0.7).unwrap();
        let angle: f64 = 0.9;
        let rot = DMatrix::from_row_slice(
            2,
            2,
            &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()],
        );
        let motion = RigidMotion::new(rot, DVector::from_vec(vec![0.3, -1.1])).unwrap();
        let point = 0.7 * &normal; // n'x = 0.7
        let x = Configuration::new(DMatrix::from_row_slice(1, 2, point.as_slice())).unwrap();
        let moved_point = apply_rigid(&x, &motion).unwrap();
        let moved_plane = transform_plane(&plane, &motion).unwrap();
        let lhs = moved_plane.normal()[0] * moved_point.coords()[(0, 0)]
            + moved_plane.normal()[1] * moved_point.coords()[(0, 1)];
        assert_relative_eq!(lhs, moved_plane.offset(), epsilon = 1e-12);
    }

    #[test]
    fn opa_recovers_a_known_motion() {
        let x = config(&[
            vec![0.0, 0.0],
            vec![1.0, 0.2],
            vec![0.4, 1.3],
            vec![-0.7, 0.5],
        ]);
        let angle: f64 = 0.6;
        let rot = DMatrix::from_row_slice(
            2,
            2,
            &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()],
        );
        let motion = RigidMotion::new(rot, DVector::from_vec(vec![3.0, -2.0])).unwrap();
        let y = apply_rigid(&x, &motion).unwrap();
        let (recovered, residual) = opa_rigid(&x, &y).unwrap();
        assert!(residual < 1e-12, "residual {residual}");
        assert_relative_eq!(recovered.rotation(), motion.rotation(), epsilon = 1e-12);
        assert_relative_eq!(
            recovered.translation(),
            motion.translation(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn opa_rejects_collapsed_sources() {
        let x = config(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let y = config(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(
            opa_rigid(&x, &y),
            Err(Error::DegenerateConfiguration { .. })
        ));
    }

    #[test]
    fn opa_never_reflects() {
        // target is a mirror image; the best proper rotation cannot reach
        // it, but the result must still be a rotation
        let x = config(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]);
        let mirrored = config(&[vec![0.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0]]);
        let (motion, residual) = opa_rigid(&x, &mirrored).unwrap();
        assert_relative_eq!(motion.rotation().determinant(), 1.0, epsilon = 1e-12);
        assert!(residual > 0.5);
    }

    #[test]
    fn gpa_of_identical_configs_converges_immediately() {
        let x = config(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]);
        let fit = gpa(&[x.clone(), x.clone()]).unwrap();
        let xc = x.centered();
        assert_relative_eq!(fit.mean.coords(), xc.coords(), epsilon = 1e-12);
        for f in &fit.fitted {
            assert_relative_eq!(f.coords(), xc.coords(), epsilon = 1e-12);
        }
        assert!(fit.objective_trace.last().unwrap() < &1e-20);
    }

    #[test]
    fn gpa_objective_is_monotone() {
        let configs = vec![
            config(&[vec![0.1, 0.0], vec![1.0, 0.1], vec![0.2, 1.9], vec![-1.1, 0.4]]),
            config(&[vec![0.4, -0.2], vec![1.2, 0.6], vec![-0.3, 1.6], vec![-0.9, 0.1]]),
            config(&[vec![-0.2, 0.3], vec![0.8, -0.1], vec![0.5, 2.2], vec![-1.3, 0.7]]),
        ];
        let fit = gpa(&configs).unwrap();
        for w in fit.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "objective rose: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn gpa_needs_two_configurations() {
        let x = config(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert!(matches!(
            gpa(&[x]),
            Err(Error::SampleTooSmall { needed: 2, got: 1 })
        ));
    }

    fn diamond_scheme() -> PairingScheme {
        PairingScheme::from_one_based(&[(1, 3)], &[2, 4]).unwrap()
    }

    /// A symmetric diamond, rotated and shifted away from its own frame.
    fn moved_diamond(angle: f64, tx: f64, ty: f64) -> Configuration {
        let x = config(&[
            vec![-1.0, 0.2],
            vec![0.0, 1.0],
            vec![1.0, 0.2],
            vec![0.0, -1.3],
        ]);
        let rot = DMatrix::from_row_slice(
            2,
            2,
            &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()],
        );
        let motion = RigidMotion::new(rot, DVector::from_vec(vec![tx, ty])).unwrap();
        apply_rigid(&x, &motion).unwrap()
    }

    #[test]
    fn midplane_estimation_recovers_exact_symmetry_without_noise() {
        let scheme = diamond_scheme();
        let configs = vec![
            moved_diamond(0.7, 2.0, -1.0),
            moved_diamond(-1.2, 0.5, 3.0),
            moved_diamond(2.4, -4.0, 0.3),
        ];
        let reg = estimate_midplane(&configs, &scheme, RegistrationMode::Basis, None).unwrap();
        assert_eq!(reg.plane, Plane::canonical(2));
        assert_eq!(reg.provenance, Provenance::Estimated);
        let mean_refl = reflect_config(&reg.mean_shape, &scheme).unwrap();
        assert_relative_eq!(
            mean_refl.coords(),
            reg.mean_shape.coords(),
            epsilon = 1e-12
        );
        for c in &reg.configs {
            let r = reflect_config(c, &scheme).unwrap();
            let residual = (r.coords() - c.coords()).norm();
            assert!(residual < 1e-8, "asymmetry residual {residual}");
        }
    }

    #[test]
    fn axis_mode_mean_is_an_exact_reflection_fixed_point() {
        let scheme = diamond_scheme();
        let configs = vec![moved_diamond(0.4, 1.0, 1.0), moved_diamond(1.9, -2.0, 0.0)];
        let reg = estimate_midplane(&configs, &scheme, RegistrationMode::Axis, None).unwrap();
        let mean_refl = reflect_config(&reg.mean_shape, &scheme).unwrap();
        assert_relative_eq!(
            mean_refl.coords(),
            reg.mean_shape.coords(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hint_pins_the_in_plane_gauge() {
        let scheme = diamond_scheme();
        let hint = config(&[
            vec![-1.0, 0.2],
            vec![0.0, 1.0],
            vec![1.0, 0.2],
            vec![0.0, -1.3],
        ]);
        let configs = vec![moved_diamond(0.9, 0.0, 0.0), moved_diamond(-0.3, 1.0, -1.0)];
        let reg = estimate_midplane(&configs, &scheme, RegistrationMode::Basis, Some(&hint))
            .unwrap();
        // with the gauge matched to the hint, landmark 2 must sit near the
        // top, not the bottom
        assert!(reg.mean_shape.coords()[(1, 1)] > 0.5);
    }

    #[test]
    fn preregistered_data_pass_through_unchanged() {
        let scheme = diamond_scheme();
        let x = config(&[
            vec![-0.95, 0.36],
            vec![-0.28, 2.11],
            vec![0.99, 0.54],
            vec![-0.31, -1.37],
        ]);
        let reg =
            from_preregistered(std::slice::from_ref(&x), &scheme, RegistrationMode::Basis).unwrap();
        assert_eq!(reg.configs[0], x);
        assert_eq!(reg.provenance, Provenance::Expert);
        let mean_refl = reflect_config(&reg.mean_shape, &scheme).unwrap();
        assert_relative_eq!(
            mean_refl.coords(),
            reg.mean_shape.coords(),
            epsilon = 1e-15
        );
    }
}
