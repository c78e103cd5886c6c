//! Elementary asymmetry features of a single registered shape.
//!
//! A perfectly symmetric diamond produces all-zero features; a perturbed
//! quadrilateral produces the signed differences, their magnitudes, and
//! the per-landmark distances.

use bilasym::features::{absolute_features, landmark_features, signed_features};
use bilasym::model::{Configuration, PairingScheme};

fn main() -> bilasym::Result<()> {
    // Landmarks 1 and 3 mirror each other across {x_1 = 0}; 2 and 4 sit
    // on the midline (all labels 1-based).
    let scheme = PairingScheme::from_one_based(&[(1, 3)], &[2, 4])?;

    let symmetric = Configuration::from_rows(&[
        vec![-1.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![0.0, -1.0],
    ])?;
    let zero = signed_features(&symmetric, &scheme)?;
    println!("symmetric diamond:");
    for (ix, v) in zero.index_map().iter().zip(zero.values()) {
        println!("  {ix}: {v}");
    }

    let perturbed = Configuration::from_rows(&[
        vec![-0.95, 0.36],
        vec![-0.28, 2.11],
        vec![0.99, 0.54],
        vec![-0.31, -1.37],
    ])?;
    let signed = signed_features(&perturbed, &scheme)?;
    println!("\nperturbed quadrilateral, signed:");
    for (ix, v) in signed.index_map().iter().zip(signed.values()) {
        println!("  {ix}: {v:+.4}");
    }

    let magnitudes = absolute_features(&signed);
    println!("magnitudes:");
    for (ix, v) in magnitudes.index_map().iter().zip(magnitudes.values()) {
        println!("  {ix}: {v:.4}");
    }

    // Landmark level: one distance per pair, one plane offset per solo.
    let landmark = landmark_features(&perturbed, &scheme)?;
    println!("landmark level:");
    for (ix, v) in landmark.index_map().iter().zip(landmark.values()) {
        println!("  {ix}: {v:.6}");
    }

    Ok(())
}
