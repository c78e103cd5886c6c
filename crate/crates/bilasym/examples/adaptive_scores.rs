//! Composite asymmetry scores under equal and data-driven weights.
//!
//! The score families: l1/l2 sum (squared) coordinatewise magnitudes,
//! star-l1/star-l2 sum (squared) per-landmark distances, and bock is the
//! quadratic score that counts midline landmarks twice. Adaptive weights
//! downweight pairs that are far apart in the cohort's symmetric mean.

use bilasym::model::RegistrationMode;
use bilasym::registration::from_preregistered;
use bilasym::scores::{adaptive_weights, ScoreSpec};
use bilasym::synth::{block_scheme, generate_dataset, make_symmetric_template, SynthSpec};

fn main() -> bilasym::Result<()> {
    let scheme = block_scheme(3, 1);
    let template = make_symmetric_template(3, 1, 2, 11)?;
    let cohort = generate_dataset(&SynthSpec {
        scheme: scheme.clone(),
        template,
        noise_sigma: 0.05,
        offsets: vec![0.0; scheme.basis_feature_count(2)],
        n1: 5,
        n2: 0,
        nuisance_motion: false,
        seed: 11,
    })?;
    let configs: Vec<_> = cohort.subjects.iter().map(|s| s.config.clone()).collect();
    let registered = from_preregistered(&configs, &scheme, RegistrationMode::Basis)?;

    let m = configs[0].m();
    let j = scheme.basis_feature_count(m);
    let n = scheme.axis_feature_count();
    let specs = vec![
        ScoreSpec::l1(j)?,
        ScoreSpec::l2(j)?,
        ScoreSpec::star_l1(n)?,
        ScoreSpec::star_l2(n)?,
        ScoreSpec::bock(&scheme.basis_index_map(m))?,
    ];

    println!("equal weights:");
    print_scores(&registered.configs, &scheme, &specs)?;

    let coord_w = adaptive_weights(&registered, &scheme, RegistrationMode::Basis)?;
    let landmark_w = adaptive_weights(&registered, &scheme, RegistrationMode::Axis)?;
    println!("\nadaptive pair weights (one per landmark entry):");
    for (ix, w) in scheme.axis_index_map().iter().zip(landmark_w.weights()) {
        println!("  {ix}: {w:.4}");
    }

    // Bock keeps its own weights; the other four accept new ones.
    let reweighted = vec![
        specs[0].reweighted(coord_w.clone())?,
        specs[1].reweighted(coord_w)?,
        specs[2].reweighted(landmark_w.clone())?,
        specs[3].reweighted(landmark_w)?,
    ];
    println!("\nadaptive weights:");
    print_scores(&registered.configs, &scheme, &reweighted)?;

    Ok(())
}

fn print_scores(
    configs: &[bilasym::Configuration],
    scheme: &bilasym::PairingScheme,
    specs: &[ScoreSpec],
) -> bilasym::Result<()> {
    use bilasym::features::signed_features;
    for (n, config) in configs.iter().enumerate() {
        let features = signed_features(config, scheme)?;
        print!("  subject {}:", n + 1);
        for spec in specs {
            print!("  {}={:.4}", spec.label, spec.evaluate(&features)?);
        }
        println!();
    }
    Ok(())
}
