//! Dot plots of score distributions: SVG written to a file, ASCII to the
//! terminal. Every subject is exactly one dot.

use bilasym::features::{landmark_features, signed_features};
use bilasym::plot::{dot_plot_ascii, dot_plot_svg, DotPlotPanel};
use bilasym::scores::ScoreSpec;
use bilasym::synth::{block_scheme, generate_dataset, make_symmetric_template, SynthSpec};

fn main() -> bilasym::Result<()> {
    let scheme = block_scheme(4, 1);
    let m = 2;
    let template = make_symmetric_template(4, 1, m, 5)?;
    let mut offsets = vec![0.0; scheme.basis_feature_count(m)];
    offsets[2] = 0.15;
    let cohort = generate_dataset(&SynthSpec {
        scheme: scheme.clone(),
        template,
        noise_sigma: 0.05,
        offsets,
        n1: 20,
        n2: 20,
        nuisance_motion: false,
        seed: 5,
    })?;

    let l2 = ScoreSpec::l2(scheme.basis_feature_count(m))?;
    let star_l1 = ScoreSpec::star_l1(scheme.axis_feature_count())?;
    let mut panels = Vec::new();
    for spec in [&l2, &star_l1] {
        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        for s in &cohort.subjects {
            let value = if spec.label == "l2" {
                spec.evaluate(&signed_features(&s.config, &scheme)?)?
            } else {
                spec.evaluate(&landmark_features(&s.config, &scheme)?)?
            };
            if s.group == 1 {
                g1.push(value);
            } else {
                g2.push(value);
            }
        }
        panels.push(DotPlotPanel {
            title: spec.label.clone(),
            group1_name: "control".into(),
            group2_name: "case".into(),
            group1: g1,
            group2: g2,
        });
    }

    let svg = dot_plot_svg(&panels)?;
    let path = std::env::temp_dir().join("bilasym_dot_plots.svg");
    std::fs::write(&path, &svg)?;
    println!("wrote {} ({} dots)\n", path.display(), svg.matches("<circle").count());

    for panel in &panels {
        println!("{}", dot_plot_ascii(panel, 60)?);
    }
    Ok(())
}
