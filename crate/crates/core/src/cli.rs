//! Command-line front end.
//!
//! Every command writes its primary output to `--out` (or stdout). When an
//! output file is given, a `<out>.manifest.json` next to it records the
//! command line, parameters, seed, tool version and the SHA-256 of the
//! output bytes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::amplitude::{self, linspace, PhysicalRotation};
use crate::derive;
use crate::error::{Error, Result};
use crate::layout::{CodeLayout, Variant};
use crate::noise_sim::{self, ExperimentConfig, ExperimentResult, NoiseModel, ShotRecord};
use crate::oracle;
use crate::postselect::{self, LookupTable, PostSelection};
use crate::trajectory::Trajectory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Fidelity below which `verify` reports a mismatch.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "tinj", version, about = "Exact and simulated transversal injection on planar surface codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a code layout as JSON.
    Layout(LayoutArgs),
    /// Derive the logical state heralded by one trajectory.
    Derive(DeriveArgs),
    /// Derive every trajectory's logical state, one JSON object per line.
    Enumerate(EnumerateArgs),
    /// Logical Bloch angles and probabilities over a grid of rotations, as CSV.
    Spans(SpansArgs),
    /// Compare derived states with the dense state-vector reference, as CSV.
    Verify(VerifyArgs),
    /// Run a noisy injection experiment.
    Simulate(SimulateArgs),
    /// Build a trajectory whitelist from an experiment and apply it.
    Postselect(PostselectArgs),
    /// Train, evaluate and post-select in one seeded run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct CodeArgs {
    /// Layout JSON file; overrides --distance and --variant.
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long, short = 'd', default_value_t = 2)]
    pub distance: usize,
    #[arg(long, default_value = "unrotated")]
    pub variant: Variant,
}

impl CodeArgs {
    fn load(&self) -> Result<CodeLayout> {
        match &self.layout {
            Some(p) => CodeLayout::from_json(&fs::read_to_string(p)?),
            None => CodeLayout::new(self.distance, self.variant),
        }
    }

    fn inputs(&self) -> Vec<String> {
        self.layout.iter().map(|p| p.display().to_string()).collect()
    }
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct LayoutArgs {
    #[arg(long, short = 'd')]
    pub distance: usize,
    #[arg(long, default_value = "unrotated")]
    pub variant: Variant,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// For example "x=00 z=01", or the X then Z bits concatenated.
    #[arg(long, short = 't')]
    pub trajectory: String,
    /// Emit the intermediate term tables as well.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Only trajectories with every X outcome +1.
    #[arg(long)]
    pub trivial_x: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct SpansArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Comma-separated values or `lo:hi:n`.
    #[arg(long, default_value = "0:3.141592653589793:8")]
    pub thetas: String,
    /// Comma-separated values or `lo:hi:n`.
    #[arg(long, default_value = "0:6.283185307179586:8")]
    pub phis: String,
    #[arg(long)]
    pub trivial_x: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Number of random rotations; needs --seed.
    #[arg(long)]
    pub rotations: Option<usize>,
    /// Number of random trajectories per rotation instead of all of them; needs --seed.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct NoiseArgs {
    #[arg(long, short = 'd', default_value_t = 2)]
    pub distance: usize,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub phi: f64,
    /// Sets p1, p2 and pmeas together unless they are given individually.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub pmeas: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noisy sweeps before the final perfect one; defaults to the distance.
    #[arg(long)]
    pub rounds: Option<usize>,
}

impl NoiseArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::InvalidParameter("--seed is required".into()))?;
        let base = self.p.unwrap_or(0.0);
        let noise = NoiseModel::new(
            self.p1.unwrap_or(base),
            self.p2.unwrap_or(base),
            self.pmeas.unwrap_or(base),
        )?;
        let rot = PhysicalRotation::new(self.theta, self.phi)?;
        let mut cfg = ExperimentConfig::new(self.distance, rot, noise, self.shots, seed);
        if let Some(r) = self.rounds {
            cfg.rounds = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Per-shot CSV.
    #[arg(long)]
    pub shots_csv: Option<PathBuf>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct PostselectArgs {
    /// Experiment JSON the table is built from.
    #[arg(long, short = 'i')]
    pub input: PathBuf,
    /// Experiment JSON the table is applied to; defaults to the input.
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub budget: f64,
    /// Where to write the table JSON.
    #[arg(long)]
    pub table_out: Option<PathBuf>,
    /// Where to write the filtered aggregate JSON.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value_t = 0.2)]
    pub budget: f64,
    /// Seed of the evaluation run; defaults to the training seed plus one.
    #[arg(long)]
    pub eval_seed: Option<u64>,
    /// Directory for every artefact; the summary goes to stdout otherwise.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub output: String,
    pub output_digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Formats with 17 significant digits, enough to round-trip any double.
pub fn f17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Parses `"a,b,c"` or `"lo:hi:n"`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad grid {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return Ok(linspace(lo, hi, n));
    }
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Output of one command: a primary artefact plus extra files.
struct Emit {
    content: String,
    extra: Vec<(PathBuf, String)>,
}

/// Writes `content` to `out` (with a manifest) or stdout.
fn write_output(
    out: Option<&Path>,
    content: &str,
    command: &str,
    argv: &[String],
    inputs: Vec<String>,
    parameters: serde_json::Value,
    seed: Option<u64>,
) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, content)?;
            let manifest = RunManifest {
                command: command.into(),
                argv: argv.to_vec(),
                inputs,
                parameters,
                seed,
                tool_version: env!("CARGO_PKG_VERSION").into(),
                output: path.display().to_string(),
                output_digest: sha256_hex(content.as_bytes()),
            };
            fs::write(manifest_path(path), to_json(&manifest)?)?;
            Ok(())
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn cmd_layout(args: &LayoutArgs) -> Result<String> {
    Ok(CodeLayout::new(args.distance, args.variant)?.to_json() + "\n")
}

pub fn cmd_derive(args: &DeriveArgs) -> Result<String> {
    let layout = args.code.load()?;
    let t = Trajectory::parse_for(&layout, &args.trajectory)?;
    if args.trace {
        to_json(&derive::derive_with_trace(&layout, &t)?)
    } else {
        to_json(&derive::derive_state(&layout, &t)?)
    }
}

fn forms_for(layout: &CodeLayout, trivial_x: bool) -> Result<Vec<amplitude::LogicalStateForm>> {
    let map = if trivial_x {
        derive::enumerate_trivial_x_states(layout)?
    } else {
        derive::enumerate_all_states(layout)?
    };
    Ok(map.into_values().collect())
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<String> {
    let layout = args.code.load()?;
    let mut out = String::new();
    for form in forms_for(&layout, args.trivial_x)? {
        out.push_str(&serde_json::to_string(&form)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_spans(args: &SpansArgs) -> Result<String> {
    let layout = args.code.load()?;
    let thetas = parse_grid(&args.thetas)?;
    let phis = parse_grid(&args.phis)?;
    let forms = forms_for(&layout, args.trivial_x)?;
    let mut out = String::from("theta,phi,trajectory,theta_l,phi_l,probability\n");
    for &theta in &thetas {
        for &phi in &phis {
            let rot = PhysicalRotation::new(theta, phi)?;
            for form in &forms {
                let p = amplitude::trajectory_probability(form, &rot);
                let (tl, pl) = match amplitude::to_bloch(form, &rot) {
                    Ok(b) => (f17(b.theta_l), f17(b.phi_l)),
                    Err(Error::ZeroState) => ("nan".into(), "nan".into()),
                    Err(e) => return Err(e),
                };
                writeln!(out, "{},{},{},{tl},{pl},{}", f17(theta), f17(phi), form.trajectory, f17(p)).unwrap();
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyRow {
    pub rotation: PhysicalRotation,
    pub trajectory: Trajectory,
    /// NaN when the trajectory cannot occur at this rotation.
    pub fidelity: f64,
    pub probability: f64,
    pub derived_probability: f64,
    pub residual: f64,
}

impl VerifyRow {
    /// True when derivation and reference disagree.
    pub fn mismatch(&self) -> bool {
        if self.fidelity.is_nan() {
            return self.derived_probability >= oracle::IMPOSSIBLE_PROBABILITY;
        }
        self.fidelity < 1.0 - VERIFY_TOLERANCE
            || (self.probability - self.derived_probability).abs() > VERIFY_TOLERANCE
            || self.residual > 1e-10
    }
}

/// Derived versus reference state for one trajectory and rotation.
pub fn verify_one(layout: &CodeLayout, t: &Trajectory, rot: &PhysicalRotation) -> Result<VerifyRow> {
    let form = derive::derive_state(layout, t)?;
    let derived_probability = amplitude::trajectory_probability(&form, rot);
    let row = |fidelity, probability, residual| VerifyRow {
        rotation: *rot,
        trajectory: *t,
        fidelity,
        probability,
        derived_probability,
        residual,
    };
    match oracle::oracle_state(layout, t, rot) {
        Ok(o) => {
            let derived = amplitude::normalize(&form, rot);
            let fidelity = match derived {
                Ok(d) => oracle::pair_fidelity(d, (o.a, o.b)),
                Err(_) => 0.0,
            };
            Ok(row(fidelity, o.probability, o.residual))
        }
        Err(Error::ImpossibleTrajectory(p)) => Ok(row(f64::NAN, p, 0.0)),
        Err(e) => Err(e),
    }
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> PhysicalRotation {
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    PhysicalRotation::new(theta, phi).expect("sampled inside the valid range")
}

pub fn random_trajectory(layout: &CodeLayout, rng: &mut ChaCha8Rng) -> Trajectory {
    let mask = |n: usize| if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let x = rng.random::<u64>() & mask(layout.num_x());
    let z = rng.random::<u64>() & mask(layout.num_z());
    Trajectory::new(x, layout.num_x(), z, layout.num_z())
}

pub fn cmd_verify_rows(args: &VerifyArgs) -> Result<Vec<VerifyRow>> {
    let layout = args.code.load()?;
    let needs_seed = args.rotations.is_some() || args.sample.is_some();
    if needs_seed && args.seed.is_none() {
        return Err(Error::InvalidParameter("--seed is required for random sampling".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(0));
    let rotations: Vec<PhysicalRotation> = match args.rotations {
        Some(k) => (0..k).map(|_| random_rotation(&mut rng)).collect(),
        None => vec![PhysicalRotation::new(args.theta.unwrap_or(1.0), args.phi.unwrap_or(0.3))?],
    };
    let mut rows = Vec::new();
    for rot in &rotations {
        let trajectories: Vec<Trajectory> = match args.sample {
            Some(k) => (0..k).map(|_| random_trajectory(&layout, &mut rng)).collect(),
            None => Trajectory::all(&layout).collect(),
        };
        for t in &trajectories {
            rows.push(verify_one(&layout, t, rot)?);
        }
    }
    Ok(rows)
}

pub fn verify_csv(rows: &[VerifyRow]) -> String {
    let mut out = String::from("theta,phi,trajectory,fidelity,probability,max_residual\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            f17(r.rotation.theta),
            f17(r.rotation.phi),
            r.trajectory,
            f17(r.fidelity),
            f17(r.probability),
            f17(r.residual)
        )
        .unwrap();
    }
    out
}

pub fn shots_csv(records: &[ShotRecord]) -> String {
    let mut out = String::from("shot,trajectory,stable,fidelity,logical_error\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.shot,
            r.trajectory,
            u8::from(r.stable),
            f17(r.fidelity),
            u8::from(r.logical_error)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtered {
    pub budget: f64,
    pub whitelist: Vec<Trajectory>,
    pub unfiltered_logical_error_rate: f64,
    pub unfiltered_mean_fidelity: f64,
    pub discard_rate: f64,
    pub postselected: PostSelection,
}

pub fn filtered(table: &LookupTable, eval: &ExperimentResult) -> Filtered {
    Filtered {
        budget: table.budget,
        whitelist: table.whitelist.clone(),
        unfiltered_logical_error_rate: eval.logical_error_rate,
        unfiltered_mean_fidelity: eval.mean_fidelity,
        discard_rate: eval.discard_rate,
        postselected: postselect::apply_to_stats(&eval.stats, table),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub train: ExperimentConfig,
    pub eval: ExperimentConfig,
    pub table: LookupTable,
    pub result: Filtered,
}

pub fn run_pipeline(args: &PipelineArgs) -> Result<(ExperimentResult, ExperimentResult, PipelineSummary)> {
    let train_cfg = args.noise.config()?;
    let mut eval_cfg = train_cfg;
    eval_cfg.seed = args.eval_seed.unwrap_or(train_cfg.seed.wrapping_add(1));
    let train = noise_sim::run_experiment(&train_cfg)?;
    let eval = noise_sim::run_experiment(&eval_cfg)?;
    let table = postselect::build_lookup(&train.stats, args.budget)?;
    let result = filtered(&table, &eval);
    let summary = PipelineSummary {
        train: train_cfg,
        eval: eval_cfg,
        table,
        result,
    };
    Ok((train, eval, summary))
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn execute(cli: &Cli, argv: &[String]) -> Result<i32> {
    let (name, emit, out, inputs, parameters, seed): (&str, Emit, Option<PathBuf>, Vec<String>, _, Option<u64>) =
        match &cli.command {
            Command::Layout(a) => (
                "layout",
                Emit {
                    content: cmd_layout(a)?,
                    extra: vec![],
                },
                a.out.clone(),
                vec![],
                params(a),
                None,
            ),
            Command::Derive(a) => (
                "derive",
                Emit {
                    content: cmd_derive(a)?,
                    extra: vec![],
                },
                a.out.clone(),
                a.code.inputs(),
                params(a),
                None,
            ),
            Command::Enumerate(a) => (
                "enumerate",
                Emit {
                    content: cmd_enumerate(a)?,
                    extra: vec![],
                },
                a.out.clone(),
                a.code.inputs(),
                params(a),
                None,
            ),
            Command::Spans(a) => (
                "spans",
                Emit {
                    content: cmd_spans(a)?,
                    extra: vec![],
                },
                a.out.clone(),
                a.code.inputs(),
                params(a),
                None,
            ),
            Command::Verify(a) => {
                let rows = cmd_verify_rows(a)?;
                let content = verify_csv(&rows);
                let bad = rows.iter().filter(|r| r.mismatch()).count();
                write_output(a.out.as_deref(), &content, "verify", argv, a.code.inputs(), params(a), a.seed)?;
                if bad > 0 {
                    eprintln!("verify: {bad} of {} rows disagree", rows.len());
                    return Ok(EXIT_MISMATCH);
                }
                return Ok(EXIT_OK);
            }
            Command::Simulate(a) => {
                let cfg = a.noise.config()?;
                let (result, records) = noise_sim::run_experiment_with_records(&cfg)?;
                let extra = match &a.shots_csv {
                    Some(p) => vec![(p.clone(), shots_csv(&records))],
                    None => vec![],
                };
                (
                    "simulate",
                    Emit {
                        content: to_json(&result)?,
                        extra,
                    },
                    a.out.clone(),
                    vec![],
                    params(a),
                    Some(cfg.seed),
                )
            }
            Command::Postselect(a) => {
                let train: ExperimentResult = serde_json::from_str(&fs::read_to_string(&a.input)?)?;
                let eval: ExperimentResult = match &a.eval {
                    Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
                    None => train.clone(),
                };
                let table = postselect::build_lookup(&train.stats, a.budget)?;
                let extra = match &a.table_out {
                    Some(p) => vec![(p.clone(), to_json(&table)?)],
                    None => vec![],
                };
                let content = if a.table_out.is_some() {
                    to_json(&filtered(&table, &eval))?
                } else {
                    to_json(&serde_json::json!({
                        "table": table,
                        "filtered": filtered(&table, &eval),
                    }))?
                };
                let mut inputs = vec![a.input.display().to_string()];
                inputs.extend(a.eval.iter().map(|p| p.display().to_string()));
                ("postselect", Emit { content, extra }, a.out.clone(), inputs, params(a), None)
            }
            Command::Pipeline(a) => {
                let (train, eval, summary) = run_pipeline(a)?;
                let content = to_json(&summary)?;
                let seed = Some(summary.train.seed);
                match &a.out_dir {
                    None => ("pipeline", Emit { content, extra: vec![] }, None, vec![], params(a), seed),
                    Some(dir) => {
                        fs::create_dir_all(dir)?;
                        let extra = vec![
                            (dir.join("train.json"), to_json(&train)?),
                            (dir.join("eval.json"), to_json(&eval)?),
                            (dir.join("table.json"), to_json(&summary.table)?),
                        ];
                        (
                            "pipeline",
                            Emit { content, extra },
                            Some(dir.join("summary.json")),
                            vec![],
                            params(a),
                            seed,
                        )
                    }
                }
            }
        };
    for (path, content) in &emit.extra {
        write_output(Some(path), content, name, argv, inputs.clone(), parameters.clone(), seed)?;
    }
    write_output(out.as_deref(), &emit.content, name, argv, inputs, parameters, seed)?;
    Ok(EXIT_OK)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. } => EXIT_GUARD,
        Error::InvalidDistance(_)
        | Error::TrajectoryLength { .. }
        | Error::TrajectoryParse(_)
        | Error::UnsupportedLayout
        | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tinj: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.25, 2").unwrap(), vec![0.25, 2.0]);
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -2.1740432175058464, 1e-300] {
            assert_eq!(f17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn exit_codes() {
        let guard = Error::TooLarge {
            what: "x",
            size: 2,
            limit: 1,
        };
        assert_eq!(exit_code(&guard), EXIT_GUARD);
        assert_eq!(exit_code(&Error::InvalidDistance(0)), EXIT_USAGE);
        assert_eq!(exit_code(&Error::ZeroState), EXIT_FAILURE);
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("a/b.json")), PathBuf::from("a/b.json.manifest.json"));
    }
}
