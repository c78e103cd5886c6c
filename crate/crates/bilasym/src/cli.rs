//! Command line interface: a thin, deterministic shell over the library.
//!
//! Subcommands mirror the analysis pipeline: `simulate` or external data,
//! `register`, then `features`, `score`, `test`, `select`, `plot`. All
//! tabular output is CSV or JSON; landmark data travels as JSON files.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::features::{absolute_features, landmark_features, signed_features};
use crate::io::{
    read_csv_cohort, Cohort, LandmarkFile, PlaneSpec, RegistrationFlag, SchemeSpec, SubjectRecord,
};
use crate::model::{FeatureVector, RegistrationMode, TwoGroupDataset};
use crate::plot::{dot_plot_ascii, dot_plot_svg, DotPlotPanel};
use crate::registration::{estimate_midplane_with, from_preregistered, OrientationOptions};
use crate::report::{
    write_csv, write_json, FeatureRow, ScoreRow, SelectionReport, SelectionRow, WeightRow,
};
use crate::scores::{adaptive_weights_with, Psi, ScoreFamily, ScoreSpec, WeightVector};
use crate::stats::{
    bootstrap_critical_with, run_comparison, Resampling, Sidedness, TestChoice,
};
use crate::synth::{block_scheme, generate_dataset, symmetric_template_for, SynthSpec};

#[derive(Parser, Debug)]
#[command(
    name = "bilasym",
    version,
    about = "Bilateral asymmetry analysis for landmark shapes"
)]
pub struct Cli {
    /// Report errors as a JSON object on stderr instead of plain text.
    #[arg(long, global = true)]
    pub error_json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the symmetry midplane and rewrite a cohort in the
    /// registered frame.
    Register(RegisterArgs),
    /// Emit per-subject asymmetry features.
    Features(FeatureArgs),
    /// Compute per-subject asymmetry scores.
    Score(ScoreArgs),
    /// Test whether one group is more asymmetric than the other.
    Test(TestArgs),
    /// Bootstrap-calibrated selection of asymmetric features.
    Select(SelectArgs),
    /// Dot plots of score distributions by group.
    Plot(PlotArgs),
    /// Generate a synthetic cohort with known planted asymmetry.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Input landmark file: JSON, or CSV when --scheme is given.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON sidecar (dimension, scheme, registration) for CSV input.
    #[arg(long)]
    pub scheme: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<LandmarkFile> {
        match &self.scheme {
            Some(sidecar) => read_csv_cohort(&self.input, sidecar),
            None => {
                if self.input.extension().is_some_and(|e| e == "csv") {
                    return Err(Error::FileFormat {
                        detail: "csv input needs a --scheme sidecar".into(),
                    });
                }
                LandmarkFile::read(&self.input)
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    fn write(&self, bytes: &[u8]) -> Result<()> {
        write_output(self.output.as_deref(), bytes)
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeOpt {
    Axis,
    Basis,
}

impl From<ModeOpt> for RegistrationMode {
    fn from(m: ModeOpt) -> Self {
        match m {
            ModeOpt::Axis => RegistrationMode::Axis,
            ModeOpt::Basis => RegistrationMode::Basis,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindOpt {
    /// Signed coordinatewise differences (basis registration only).
    Signed,
    /// Absolute coordinatewise differences.
    Absolute,
    /// One distance per pair plus one magnitude per solo.
    Landmark,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreName {
    L1,
    L2,
    StarL1,
    StarL2,
    Bock,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestName {
    PooledT,
    WelchT,
    MannWhitney,
}

impl From<TestName> for TestChoice {
    fn from(t: TestName) -> Self {
        match t {
            TestName::PooledT => TestChoice::PooledT,
            TestName::WelchT => TestChoice::WelchT,
            TestName::MannWhitney => TestChoice::MannWhitney,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SidedOpt {
    /// One-sided: group 2 more asymmetric than group 1.
    One,
    /// Two-sided.
    Two,
}

impl From<SidedOpt> for Sidedness {
    fn from(s: SidedOpt) -> Self {
        match s {
            SidedOpt::One => Sidedness::OneSidedGreater,
            SidedOpt::Two => Sidedness::TwoSided,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResampleOpt {
    Pooled,
    Permutation,
}

impl From<ResampleOpt> for Resampling {
    fn from(r: ResampleOpt) -> Self {
        match r {
            ResampleOpt::Pooled => Resampling::PooledBootstrap,
            ResampleOpt::Permutation => Resampling::Permutation,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Args, Debug)]
pub struct RegisterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Registration to produce: axis pins only the midplane, basis also
    /// pins the in-plane axes.
    #[arg(long, value_enum, default_value_t = ModeOpt::Basis)]
    pub mode: ModeOpt,
    /// Landmark file whose first subject pins the in-plane axes.
    #[arg(long)]
    pub orientation_hint: Option<PathBuf>,
    /// 1-based landmarks whose centroid defines "up" when no hint is
    /// given (sign convention of the principal in-plane axis).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub up_landmarks: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct FeatureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Feature representation to emit.
    #[arg(long, value_enum, default_value_t = KindOpt::Absolute)]
    pub kind: KindOpt,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Scores to compute (repeatable).
    #[arg(long = "score", value_enum, default_values_t = vec![ScoreName::L2])]
    pub scores: Vec<ScoreName>,
    /// Feature weights: "equal", "adaptive", or a weight file as written
    /// by --weights-output. Never applied to the bock score, which owns
    /// its weights.
    #[arg(long, default_value = "equal")]
    pub weights: String,
    /// Write the weights actually used (CSV, or JSON by extension).
    #[arg(long)]
    pub weights_output: Option<PathBuf>,
    /// Solo landmark weight under adaptive weighting.
    #[arg(long, default_value_t = 1.0)]
    pub solo_weight: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Scores to compare (repeatable).
    #[arg(long = "score", value_enum, default_values_t = vec![ScoreName::L2])]
    pub scores: Vec<ScoreName>,
    /// Tests to run on each score (repeatable).
    #[arg(long = "test", value_enum, default_values_t = vec![TestName::PooledT])]
    pub tests: Vec<TestName>,
    #[arg(long, value_enum, default_value_t = SidedOpt::One)]
    pub sided: SidedOpt,
    /// Two group labels: reference group first, then the group
    /// hypothesized more asymmetric. Defaults to order of appearance.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    /// Feature weights: "equal", "adaptive", or a weight file.
    #[arg(long, default_value = "equal")]
    pub weights: String,
    /// Solo landmark weight under adaptive weighting.
    #[arg(long, default_value_t = 1.0)]
    pub solo_weight: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Two group labels: reference group first.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    /// Simultaneous level of the selection.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Resampling replicates for the critical value.
    #[arg(long, default_value_t = 2000)]
    pub boot_reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ResampleOpt::Pooled)]
    pub resample: ResampleOpt,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Scores to plot (repeatable), one panel each.
    #[arg(long = "score", value_enum, default_values_t = vec![ScoreName::L2])]
    pub scores: Vec<ScoreName>,
    /// Two group labels: reference group first.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    /// Feature weights: "equal", "adaptive", or a weight file.
    #[arg(long, default_value = "equal")]
    pub weights: String,
    /// Solo landmark weight under adaptive weighting.
    #[arg(long, default_value_t = 1.0)]
    pub solo_weight: f64,
    /// Emit an ASCII sketch instead of SVG.
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Number of landmark pairs.
    #[arg(long, default_value_t = 4)]
    pub pairs: usize,
    /// Number of unpaired (midline) landmarks.
    #[arg(long, default_value_t = 1)]
    pub solos: usize,
    /// Coordinate dimension.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub n1: usize,
    #[arg(long, default_value_t = 10)]
    pub n2: usize,
    /// Per-coordinate Gaussian landmark noise.
    #[arg(long, default_value_t = 0.05)]
    pub noise_sigma: f64,
    /// Planted group-2 signed-feature offset as INDEX=VALUE with a
    /// 1-based feature index (repeatable; later repeats override).
    #[arg(long = "offset")]
    pub offsets: Vec<String>,
    /// Hide the registration behind a random rigid motion per subject.
    #[arg(long, value_enum, default_value_t = OnOff::Off)]
    pub nuisance: OnOff,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frame label stored in the output file.
    #[arg(long)]
    pub frame: Option<String>,
    /// Two group labels, group 1 first.
    #[arg(long, value_delimiter = ',', default_value = "control,case")]
    pub group_labels: Vec<String>,
}

/// Parses the command line, runs it, and maps errors onto exit status 1
/// with either a plain or JSON rendering on stderr.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let error_json = cli.error_json;
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if error_json {
                let payload = serde_json::json!({
                    "error": e.to_string(),
                    "kind": e.kind(),
                });
                eprintln!("{payload}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Register(args) => cmd_register(args),
        Command::Features(args) => cmd_features(args),
        Command::Score(args) => cmd_score(args),
        Command::Test(args) => cmd_test(args),
        Command::Select(args) => cmd_select(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

/// Feature representation used internally by the subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Repr {
    Signed,
    Absolute,
    Landmark,
}

fn require_registered(cohort: &Cohort) -> Result<RegistrationMode> {
    match cohort.registration {
        RegistrationFlag::Raw => Err(Error::NotRegistered {
            needed: "axis or basis",
            found: "raw".into(),
        }),
        RegistrationFlag::Axis => Ok(RegistrationMode::Axis),
        RegistrationFlag::Basis => Ok(RegistrationMode::Basis),
    }
}

/// Coordinatewise features are well defined under basis registration; in
/// two dimensions the absolute ones survive axis registration too, since
/// the only in-plane gauge freedom is a sign.
fn check_coordinatewise(cohort: &Cohort, signed: bool) -> Result<()> {
    let mode = require_registered(cohort)?;
    if mode == RegistrationMode::Basis {
        return Ok(());
    }
    let m = cohort.configs[0].m();
    if !signed && m == 2 {
        return Ok(());
    }
    Err(Error::NotRegistered {
        needed: if signed {
            "basis"
        } else {
            "basis (or axis in two dimensions)"
        },
        found: "axis".into(),
    })
}

fn subject_features(cohort: &Cohort, repr: Repr) -> Result<Vec<FeatureVector>> {
    match repr {
        Repr::Signed => {
            check_coordinatewise(cohort, true)?;
            cohort
                .configs
                .iter()
                .map(|c| signed_features(c, &cohort.scheme))
                .collect()
        }
        Repr::Absolute => {
            check_coordinatewise(cohort, false)?;
            cohort
                .configs
                .iter()
                .map(|c| signed_features(c, &cohort.scheme).map(|d| absolute_features(&d)))
                .collect()
        }
        Repr::Landmark => {
            require_registered(cohort)?;
            cohort
                .configs
                .iter()
                .map(|c| landmark_features(c, &cohort.scheme))
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
enum WeightsChoice {
    Equal,
    Adaptive,
    File(PathBuf),
}

fn parse_weights_arg(s: &str) -> WeightsChoice {
    match s {
        "equal" => WeightsChoice::Equal,
        "adaptive" => WeightsChoice::Adaptive,
        other => WeightsChoice::File(PathBuf::from(other)),
    }
}

fn load_weight_file(path: &Path) -> Result<Vec<f64>> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(path)?;
        if let Ok(values) = serde_json::from_str::<Vec<f64>>(&text) {
            return Ok(values);
        }
        let rows: Vec<WeightRow> = serde_json::from_str(&text)?;
        Ok(rows.into_iter().map(|r| r.weight).collect())
    } else {
        let mut reader = csv::Reader::from_path(path)?;
        let mut values = Vec::new();
        for row in reader.deserialize::<WeightRow>() {
            values.push(row?.weight);
        }
        Ok(values)
    }
}

/// Scores plus everything needed to evaluate and report them. Weight
/// vectors are resolved once per family so that a weight dump and the
/// scores that used it cannot drift apart.
struct ScorePlan {
    specs: Vec<(ScoreSpec, Repr)>,
    weight_rows: Vec<WeightRow>,
}

fn build_score_plan(
    cohort: &Cohort,
    mode: RegistrationMode,
    names: &[ScoreName],
    weights_arg: &str,
    solo_weight: f64,
) -> Result<ScorePlan> {
    if names.is_empty() {
        return Err(Error::EmptyInput {
            what: "score list",
        });
    }
    let scheme = &cohort.scheme;
    let m = cohort.configs[0].m();
    let j_coord = scheme.basis_feature_count(m);
    let j_landmark = scheme.axis_feature_count();
    let choice = parse_weights_arg(weights_arg);

    let needs_coord = names
        .iter()
        .any(|n| matches!(n, ScoreName::L1 | ScoreName::L2 | ScoreName::Bock));
    let needs_landmark = names
        .iter()
        .any(|n| matches!(n, ScoreName::StarL1 | ScoreName::StarL2));

    // Resolve one weight vector per family up front.
    let family_weights = |layout: RegistrationMode, len: usize| -> Result<Option<WeightVector>> {
        match &choice {
            WeightsChoice::Equal => Ok(None),
            WeightsChoice::Adaptive => {
                let mut registered = from_preregistered(&cohort.configs, scheme, mode)?;
                // Prefer the mean shape estimated at registration time.
                if let Some(stored) = &cohort.mean_shape {
                    registered.mean_shape = stored.clone();
                }
                Ok(Some(adaptive_weights_with(
                    &registered,
                    scheme,
                    layout,
                    solo_weight,
                )?))
            }
            WeightsChoice::File(path) => {
                let values = load_weight_file(path)?;
                if values.len() != len {
                    return Err(Error::DimensionMismatch {
                        what: "weight file length vs feature count",
                        expected: len,
                        actual: values.len(),
                    });
                }
                Ok(Some(WeightVector::user(values)?))
            }
        }
    };
    let coord_weights = if needs_coord {
        family_weights(RegistrationMode::Basis, j_coord)?
    } else {
        None
    };
    let landmark_weights = if needs_landmark {
        family_weights(RegistrationMode::Axis, j_landmark)?
    } else {
        None
    };

    let mut specs = Vec::with_capacity(names.len());
    for name in names {
        let (base, repr) = match name {
            ScoreName::L1 => (ScoreSpec::l1(j_coord)?, Repr::Absolute),
            ScoreName::L2 => (ScoreSpec::l2(j_coord)?, Repr::Absolute),
            ScoreName::Bock => (
                ScoreSpec::bock(&scheme.basis_index_map(m))?,
                Repr::Absolute,
            ),
            ScoreName::StarL1 => (ScoreSpec::star_l1(j_landmark)?, Repr::Landmark),
            ScoreName::StarL2 => (ScoreSpec::star_l2(j_landmark)?, Repr::Landmark),
        };
        let spec = match (name, &coord_weights, &landmark_weights) {
            // Bock owns its weights and is never reweighted.
            (ScoreName::Bock, _, _) => base,
            (ScoreName::L1 | ScoreName::L2, Some(w), _) => base.reweighted(w.clone())?,
            (ScoreName::StarL1 | ScoreName::StarL2, _, Some(w)) => {
                base.reweighted(w.clone())?
            }
            _ => base,
        };
        specs.push((spec, repr));
    }

    let mut weight_rows = Vec::new();
    if let Some(w) = &coord_weights {
        for (ix, &value) in scheme.basis_index_map(m).iter().zip(w.weights()) {
            weight_rows.push(WeightRow {
                feature: ix.to_string(),
                weight: value,
                source: w.source().to_string(),
            });
        }
    }
    if let Some(w) = &landmark_weights {
        for (ix, &value) in scheme.axis_index_map().iter().zip(w.weights()) {
            weight_rows.push(WeightRow {
                feature: ix.to_string(),
                weight: value,
                source: w.source().to_string(),
            });
        }
    }

    Ok(ScorePlan { specs, weight_rows })
}

fn group_order(groups: &Option<Vec<String>>) -> Result<Option<(&str, &str)>> {
    match groups {
        None => Ok(None),
        Some(v) if v.len() == 2 => Ok(Some((v[0].as_str(), v[1].as_str()))),
        Some(v) => Err(Error::GroupCount { found: v.len() }),
    }
}

fn write_table<S: serde::Serialize>(
    rows: &[S],
    format: Format,
    out: &OutputArgs,
) -> Result<()> {
    let mut bytes = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut bytes)?,
        Format::Json => write_json(&rows, &mut bytes)?,
    }
    out.write(&bytes)
}

fn cmd_register(args: RegisterArgs) -> Result<()> {
    let file = args.input.load()?;
    let cohort = file.parse()?;
    let requested: RegistrationMode = args.mode.into();

    // Already at least as registered as requested: pass through.
    let passthrough = matches!(
        (cohort.registration, requested),
        (RegistrationFlag::Basis, _) | (RegistrationFlag::Axis, RegistrationMode::Axis)
    );
    if passthrough {
        eprintln!(
            "warning: input is already {}-registered; writing it through unchanged",
            cohort.registration
        );
        let mut bytes = Vec::new();
        write_json(&file, &mut bytes)?;
        return args.output.write(&bytes);
    }

    let k = cohort.configs[0].k();
    let mut up = Vec::with_capacity(args.up_landmarks.len());
    for &v in &args.up_landmarks {
        if v == 0 {
            return Err(Error::FileFormat {
                detail: "--up-landmarks indices are 1-based".into(),
            });
        }
        if v > k {
            return Err(Error::IndexOutOfRange {
                index: v - 1,
                count: k,
            });
        }
        up.push(v - 1);
    }

    let hint_config;
    let hint = match &args.orientation_hint {
        Some(path) => {
            let hint_cohort = LandmarkFile::read(path)?.parse()?;
            hint_config = hint_cohort.configs[0].clone();
            Some(&hint_config)
        }
        None => None,
    };

    let registered = estimate_midplane_with(
        &cohort.configs,
        &cohort.scheme,
        requested,
        hint,
        &OrientationOptions { up_landmarks: up },
    )?;

    let out_file = LandmarkFile {
        dimension: cohort.configs[0].m(),
        scheme: file.scheme.clone(),
        registration: match requested {
            RegistrationMode::Axis => RegistrationFlag::Axis,
            RegistrationMode::Basis => RegistrationFlag::Basis,
        },
        frame: file.frame.clone(),
        subjects: cohort
            .ids
            .iter()
            .zip(&cohort.groups)
            .zip(&registered.configs)
            .map(|((id, group), config)| SubjectRecord {
                id: id.clone(),
                group: group.clone(),
                coords: config.rows_vec(),
            })
            .collect(),
        plane: Some(PlaneSpec {
            normal: registered.plane.normal().iter().copied().collect(),
            offset: registered.plane.offset(),
        }),
        mean_shape: Some(registered.mean_shape.rows_vec()),
    };
    let mut bytes = Vec::new();
    write_json(&out_file, &mut bytes)?;
    args.output.write(&bytes)
}

fn cmd_features(args: FeatureArgs) -> Result<()> {
    let cohort = args.input.load()?.parse()?;
    let repr = match args.kind {
        KindOpt::Signed => Repr::Signed,
        KindOpt::Absolute => Repr::Absolute,
        KindOpt::Landmark => Repr::Landmark,
    };
    let feats = subject_features(&cohort, repr)?;
    let mut rows = Vec::new();
    for ((id, group), fv) in cohort.ids.iter().zip(&cohort.groups).zip(&feats) {
        for (ix, &value) in fv.index_map().iter().zip(fv.values()) {
            rows.push(FeatureRow {
                subject: id.clone(),
                group: group.clone(),
                feature: ix.to_string(),
                kind: fv.kind().to_string(),
                value,
            });
        }
    }
    write_table(&rows, args.format, &args.output)
}

/// The linear landmark-level score is conventionally also reported at
/// half scale, averaging the two mirrored contributions of each pair.
fn scaled_companion(spec: &ScoreSpec) -> bool {
    spec.family == ScoreFamily::Landmark && spec.psi == Psi::Linear
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let cohort = args.input.load()?.parse()?;
    let mode = require_registered(&cohort)?;
    let plan = build_score_plan(&cohort, mode, &args.scores, &args.weights, args.solo_weight)?;

    if let Some(path) = &args.weights_output {
        let mut bytes = Vec::new();
        if path.extension().is_some_and(|e| e == "json") {
            write_json(&plan.weight_rows, &mut bytes)?;
        } else {
            write_csv(&plan.weight_rows, &mut bytes)?;
        }
        std::fs::write(path, bytes)?;
    }

    let mut rows = Vec::new();
    for (spec, repr) in &plan.specs {
        let feats = subject_features(&cohort, *repr)?;
        for ((id, group), fv) in cohort.ids.iter().zip(&cohort.groups).zip(&feats) {
            let value = spec.evaluate(fv)?;
            rows.push(ScoreRow {
                subject: id.clone(),
                group: group.clone(),
                score: spec.label.clone(),
                value,
            });
            if scaled_companion(spec) {
                rows.push(ScoreRow {
                    subject: id.clone(),
                    group: group.clone(),
                    score: format!("{} (scaled)", spec.label),
                    value: value / 2.0,
                });
            }
        }
    }
    write_table(&rows, args.format, &args.output)
}

/// Splits per-subject features into the two groups in label order.
fn split_features(
    cohort: &Cohort,
    feats: &[FeatureVector],
    order: Option<(&str, &str)>,
) -> Result<(String, String, TwoGroupDataset)> {
    let (g1, g2, idx1, idx2) = cohort.two_groups(order)?;
    let take = |idx: &[usize]| idx.iter().map(|&i| feats[i].clone()).collect();
    let dataset = TwoGroupDataset::new(take(&idx1), take(&idx2))?;
    Ok((g1, g2, dataset))
}

fn cmd_test(args: TestArgs) -> Result<()> {
    let cohort = args.input.load()?.parse()?;
    let mode = require_registered(&cohort)?;
    let plan = build_score_plan(&cohort, mode, &args.scores, &args.weights, args.solo_weight)?;

    // One feature representation feeds all requested scores: the
    // coordinatewise one when any score needs it (landmark scores can be
    // derived from it), otherwise landmark level.
    let repr = if plan.specs.iter().any(|(_, r)| *r == Repr::Absolute) {
        Repr::Absolute
    } else {
        Repr::Landmark
    };
    let feats = subject_features(&cohort, repr)?;
    let (g1, g2, dataset) = split_features(&cohort, &feats, group_order(&args.groups)?)?;

    let specs: Vec<ScoreSpec> = plan.specs.iter().map(|(s, _)| s.clone()).collect();
    let tests: Vec<TestChoice> = args.tests.iter().map(|&t| t.into()).collect();
    let rows = run_comparison(&dataset, (&g1, &g2), &specs, &tests, args.sided.into())?;
    write_table(&rows, args.format, &args.output)
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let cohort = args.input.load()?.parse()?;
    let mode = require_registered(&cohort)?;
    // Basis registration exposes the per-coordinate features; axis
    // registration supports the landmark-level ones.
    let repr = match mode {
        RegistrationMode::Basis => Repr::Absolute,
        RegistrationMode::Axis => Repr::Landmark,
    };
    let feats = subject_features(&cohort, repr)?;
    let (g1, g2, dataset) = split_features(&cohort, &feats, group_order(&args.groups)?)?;

    let result = bootstrap_critical_with(
        &dataset,
        args.boot_reps,
        args.alpha,
        args.seed,
        args.resample.into(),
    )?;

    let features: Vec<SelectionRow> = dataset
        .index_map()
        .iter()
        .enumerate()
        .map(|(j, ix)| SelectionRow {
            feature: ix.to_string(),
            statistic: result.v[j],
            critical_value: result.critical_value,
            lower_bound: result.lower_bounds[j],
            selected: result.selected.contains(&j),
            zero_variance: result.zero_variance.contains(&j),
        })
        .collect();
    let report = SelectionReport {
        group1: g1,
        group2: g2,
        alpha: result.alpha,
        replicates: result.replicates,
        seed: result.seed,
        resampling: result.resampling.to_string(),
        max_statistic: result.max_stat,
        critical_value: result.critical_value,
        features,
    };
    let mut bytes = Vec::new();
    match args.format {
        Format::Csv => write_csv(&report.features, &mut bytes)?,
        Format::Json => write_json(&report, &mut bytes)?,
    }
    args.output.write(&bytes)
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let cohort = args.input.load()?.parse()?;
    let mode = require_registered(&cohort)?;
    let plan = build_score_plan(&cohort, mode, &args.scores, &args.weights, args.solo_weight)?;
    let (g1, g2, idx1, idx2) = cohort.two_groups(group_order(&args.groups)?)?;

    let mut panels = Vec::with_capacity(plan.specs.len());
    for (spec, repr) in &plan.specs {
        let feats = subject_features(&cohort, *repr)?;
        let eval = |idx: &[usize]| -> Result<Vec<f64>> {
            idx.iter().map(|&i| spec.evaluate(&feats[i])).collect()
        };
        panels.push(DotPlotPanel {
            title: spec.label.clone(),
            group1_name: g1.clone(),
            group2_name: g2.clone(),
            group1: eval(&idx1)?,
            group2: eval(&idx2)?,
        });
    }
    let text = if args.ascii {
        let mut out = String::new();
        for panel in &panels {
            out.push_str(&dot_plot_ascii(panel, 60)?);
            out.push('\n');
        }
        out
    } else {
        dot_plot_svg(&panels)?
    };
    args.output.write(text.as_bytes())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    if args.group_labels.len() != 2 {
        return Err(Error::GroupCount {
            found: args.group_labels.len(),
        });
    }
    if args.group_labels[0] == args.group_labels[1] {
        return Err(Error::FileFormat {
            detail: "the two group labels must differ".into(),
        });
    }
    let scheme = block_scheme(args.pairs, args.solos);
    let template = symmetric_template_for(&scheme, args.dim, args.seed)?;
    let j = scheme.basis_feature_count(args.dim);
    let mut offsets = vec![0.0; j];
    for text in &args.offsets {
        let (index, value) = parse_offset(text, j)?;
        offsets[index] = value;
    }
    let spec = SynthSpec {
        scheme: scheme.clone(),
        template,
        noise_sigma: args.noise_sigma,
        offsets,
        n1: args.n1,
        n2: args.n2,
        nuisance_motion: args.nuisance == OnOff::On,
        seed: args.seed,
    };
    let dataset = generate_dataset(&spec)?;

    let file = LandmarkFile {
        dimension: args.dim,
        scheme: SchemeSpec::from_scheme(&scheme),
        registration: if args.nuisance == OnOff::On {
            RegistrationFlag::Raw
        } else {
            RegistrationFlag::Basis
        },
        frame: args.frame.clone(),
        subjects: dataset
            .subjects
            .iter()
            .map(|s| SubjectRecord {
                id: s.id.clone(),
                group: args.group_labels[usize::from(s.group) - 1].clone(),
                coords: s.config.rows_vec(),
            })
            .collect(),
        plane: None,
        mean_shape: None,
    };
    let mut bytes = Vec::new();
    write_json(&file, &mut bytes)?;
    args.output.write(&bytes)
}

fn parse_offset(text: &str, feature_count: usize) -> Result<(usize, f64)> {
    let (index_text, value_text) = text.split_once('=').ok_or_else(|| Error::FileFormat {
        detail: format!("--offset wants INDEX=VALUE, got '{text}'"),
    })?;
    let index: usize = index_text.trim().parse().map_err(|_| Error::FileFormat {
        detail: format!("--offset index is not an integer: '{index_text}'"),
    })?;
    if index == 0 {
        return Err(Error::FileFormat {
            detail: "--offset indices are 1-based".into(),
        });
    }
    if index > feature_count {
        return Err(Error::IndexOutOfRange {
            index: index - 1,
            count: feature_count,
        });
    }
    let value: f64 = value_text.trim().parse().map_err(|_| Error::FileFormat {
        detail: format!("--offset value is not a number: '{value_text}'"),
    })?;
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what: "offset value",
        });
    }
    Ok((index - 1, value))
}
