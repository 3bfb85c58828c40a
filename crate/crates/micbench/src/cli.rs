//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property does not hold, 2 usage or
//! input-format error, 3 numerical error. Every run echoes its effective
//! configuration as one line on standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use micbench_core::born::{born_probabilities, conditional_matrix, deviation, ltp, q_via_phi};
use micbench_core::geometry::volume_report;
use micbench_core::majorization::{weak_log_majorizes, weak_majorizes, Relation};
use micbench_core::norms::{distance_from_identity, NormSpec};
use micbench_core::process::{phi_sic, phi_with_cond_max, PhiMatrix, ReferenceProcess};
use micbench_core::sampling::EnsembleConfig;
use micbench_core::sic::{
    find_fiducial, known_fiducial, sic_from_fiducial, verify_sic, Fiducial, SearchOptions,
};
use micbench_core::tol;

use crate::error::{CliError, Result};
use crate::{ensemble, fmt, io};

/// Slack below which a quasistochastic prediction counts as matching the Born Rule.
const BORN_GAP: f64 = 1e-9;
/// Slack on distance-to-identity margins.
const DISTANCE_SLACK: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "micbench",
    version,
    about = "MIC/SIC construction, quasistochastic Born Rule and majorization checks"
)]
pub struct Cli {
    /// Seed for randomized steps; echoed by every subcommand.
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a Weyl-Heisenberg SIC for dimension d.
    Sic(SicArgs),
    /// Print the Phi matrix of a reference process as CSV.
    Phi(PhiArgs),
    /// Compare the Born Rule, its quasistochastic form, and the classical rule.
    Born(BornArgs),
    /// Test (weak, log) majorization of two vectors.
    Majorize(MajorizeArgs),
    /// Distance of Phi from the identity against the SIC value.
    Distance(DistanceArgs),
    /// Closed-form volumes of the SIC probability region and the simplex.
    Volume(VolumeArgs),
    /// Run a seeded ensemble of checks and write report.json and samples.csv.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SicFormat {
    /// The MIC effects H_i = Pi_i / d.
    Mic,
    /// The rank-one projectors Pi_i.
    Projectors,
    /// The fiducial vector in registry format.
    Fiducial,
}

#[derive(Debug, Args)]
pub struct SicArgs {
    /// Hilbert-space dimension.
    #[arg(long, value_name = "N")]
    pub d: usize,
    /// Find the fiducial numerically instead of using the registry.
    #[arg(long, conflicts_with = "registry")]
    pub search: bool,
    /// Fiducial registry file (array of {"d","re","im"}); defaults to the built-in one.
    #[arg(long, value_name = "FILE")]
    pub registry: Option<PathBuf>,
    /// Output form.
    #[arg(long, value_enum, default_value_t = SicFormat::Mic)]
    pub format: SicFormat,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["process", "mic"])))]
pub struct ProcessSource {
    /// Process file {"mic": [...], "post_states": [...]}.
    #[arg(long, value_name = "FILE")]
    pub process: Option<PathBuf>,
    /// MIC file (array of operators); requires --proportional.
    #[arg(long, value_name = "FILE", requires = "proportional")]
    pub mic: Option<PathBuf>,
    /// Use post-measurement states H_i / tr H_i.
    #[arg(long)]
    pub proportional: bool,
    /// Largest accepted condition number of [tr H_i sigma_j].
    #[arg(long, value_name = "X", default_value_t = tol::COND_MAX)]
    pub cond_max: f64,
}

impl ProcessSource {
    fn load(&self) -> Result<(ReferenceProcess, PhiMatrix)> {
        let proc = match (&self.process, &self.mic) {
            (Some(path), _) => io::read_process(path, self.proportional)?,
            (None, Some(path)) => {
                let mic = io::read_mic(path)?;
                micbench_core::process::proportional_process(&mic)?
            }
            (None, None) => unreachable!("clap enforces one source"),
        };
        let phi = phi_with_cond_max(&proc, self.cond_max)?;
        Ok((proc, phi))
    }

    fn echo(&self) -> String {
        let source = match (&self.process, &self.mic) {
            (Some(p), _) => format!("process={}", p.display()),
            (None, Some(p)) => format!("mic={}", p.display()),
            (None, None) => String::new(),
        };
        format!(
            "{source} proportional={} cond_max={}",
            self.proportional,
            fmt::num(self.cond_max)
        )
    }
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub source: ProcessSource,
}

#[derive(Debug, Args)]
pub struct BornArgs {
    /// Density operator file.
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    /// Measurement POVM file (array of operators).
    #[arg(long, value_name = "FILE")]
    pub povm: PathBuf,
    /// Also evaluate Q = P(D|H) Phi P(H) and the classical P(D|H) P(H).
    #[arg(long, requires = "process")]
    pub via_phi: bool,
    /// Reference process file for --via-phi.
    #[arg(long, value_name = "FILE")]
    pub process: Option<PathBuf>,
    /// Use post-measurement states H_i / tr H_i.
    #[arg(long)]
    pub proportional: bool,
    /// Largest accepted condition number of [tr H_i sigma_j].
    #[arg(long, value_name = "X", default_value_t = tol::COND_MAX)]
    pub cond_max: f64,
}

#[derive(Debug, Args)]
pub struct MajorizeArgs {
    /// CSV file with the candidate majorizing vector.
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    /// CSV file with the candidate majorized vector.
    #[arg(long, value_name = "FILE")]
    pub y: PathBuf,
    /// Compare partial products instead of partial sums (entries must be positive).
    #[arg(long)]
    pub log: bool,
    /// Do not require equal totals.
    #[arg(long)]
    pub weak: bool,
    /// Absolute slack on partial sums.
    #[arg(long, value_name = "T", default_value_t = tol::MAJORIZATION)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub source: ProcessSource,
    /// Norm as schatten:P, schatten:inf or kyfan:K; repeatable. Defaults to
    /// Schatten 1 and 2 and every Ky Fan norm.
    #[arg(long, value_name = "SPEC")]
    pub norm: Vec<NormSpec>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("dims").required(true).args(["d", "table"])))]
pub struct VolumeArgs {
    /// Single dimension.
    #[arg(long, value_name = "N")]
    pub d: Option<usize>,
    /// Inclusive dimension range such as 2..8.
    #[arg(long, value_name = "A..B", value_parser = parse_range)]
    pub table: Option<(usize, usize)>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Ensemble configuration JSON.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory for report.json and samples.csv.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Worker threads; output does not depend on it. Defaults to all cores.
    #[arg(long, value_name = "N", env = "MICBENCH_THREADS")]
    pub threads: Option<usize>,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, found {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("range {a}..{b} must satisfy 1 <= A <= B"));
    }
    Ok((a, b))
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, s: &str) -> Result<()> {
        self.out
            .write_all(s.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
    }

    fn echo(&mut self, command: &str, seed: Option<u64>, settings: &str) {
        let seed = seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(self.err, "micbench {command}: {settings} seed={seed}");
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(&cli, &mut io) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Result<()> {
    match &cli.command {
        Command::Sic(a) => sic(a, cli.seed, io),
        Command::Phi(a) => phi(a, cli.seed, io),
        Command::Born(a) => born(a, cli.seed, io),
        Command::Majorize(a) => majorize(a, cli.seed, io),
        Command::Distance(a) => distance(a, cli.seed, io),
        Command::Volume(a) => volume(a, cli.seed, io),
        Command::Ensemble(a) => run_ensemble(a, cli.seed, io),
    }
}

fn sic(a: &SicArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let source = if a.search {
        "search".to_string()
    } else {
        a.registry
            .as_ref()
            .map_or("builtin".into(), |p| p.display().to_string())
    };
    let format = format!("{:?}", a.format).to_lowercase();
    io.echo(
        "sic",
        seed,
        &format!("d={} fiducial={source} format={format}", a.d),
    );
    if a.d == 0 {
        return Err(CliError::Usage("dimension must be positive".into()));
    }
    let psi: Fiducial = if a.search {
        find_fiducial(a.d, seed.unwrap_or(0), &SearchOptions::default())?
    } else if let Some(path) = &a.registry {
        io::read_fiducials(path)?
            .into_iter()
            .find(|f| f.dim() == a.d)
            .ok_or_else(|| CliError::Usage(format!("{}: no entry for d={}", path.display(), a.d)))?
    } else {
        known_fiducial(a.d).map_err(|_| {
            CliError::Usage(format!(
                "no built-in fiducial for d={} (use --search or --registry)",
                a.d
            ))
        })?
    };
    let (projectors, mic) = sic_from_fiducial(&psi)?;
    let verdict = verify_sic(&mic, tol::SIC);
    let _ = writeln!(
        io.err,
        "micbench sic: residual={}",
        fmt::num(verdict.max_residual)
    );
    let text = match a.format {
        SicFormat::Mic => io::operators_json(mic.effects()),
        SicFormat::Projectors => io::operators_json(projectors.projectors()),
        SicFormat::Fiducial => io::to_json(&vec![io::FiducialJson::from_fiducial(&psi)]),
    };
    io.print(&(text + "\n"))
}

fn phi(a: &PhiArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    io.echo("phi", seed, &a.source.echo());
    let (_, phi) = a.source.load()?;
    let _ = writeln!(
        io.err,
        "micbench phi: provenance={:?} condition_number={}",
        phi.provenance(),
        fmt::num(phi.condition_number())
    );
    let mut text = String::new();
    for row in phi.matrix().row_iter() {
        text.push_str(&fmt::row(row.iter().copied()));
        text.push('\n');
    }
    io.print(&text)
}

fn born(a: &BornArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let process = a
        .process
        .as_ref()
        .map_or("none".into(), |p| p.display().to_string());
    io.echo(
        "born",
        seed,
        &format!(
            "state={} povm={} via_phi={} process={process} proportional={} cond_max={}",
            a.state.display(),
            a.povm.display(),
            a.via_phi,
            a.proportional,
            fmt::num(a.cond_max)
        ),
    );
    let rho = io::read_state(&a.state)?;
    let povm = io::read_povm(&a.povm)?;
    let direct = born_probabilities(&rho, &povm)?;
    let mut via: Option<(Vec<f64>, Vec<f64>)> = None;
    if a.via_phi {
        let path = a.process.as_ref().expect("clap requires --process");
        let proc = io::read_process(path, a.proportional)?;
        let phi = phi_with_cond_max(&proc, a.cond_max)?;
        let p_ref = born_probabilities(&rho, proc.mic().povm())?;
        let cond = conditional_matrix(&povm, &proc)?;
        via = Some((
            q_via_phi(&p_ref, &cond, &phi)?.into_vec(),
            ltp(&p_ref, &cond)?.into_vec(),
        ));
    }
    let mut text = String::from("outcome,q_operator,q_phi,ltp\n");
    for (j, q) in direct.iter().enumerate() {
        let (qp, l) = via
            .as_ref()
            .map_or((String::new(), String::new()), |(qp, l)| {
                (fmt::num(qp[j]), fmt::num(l[j]))
            });
        text.push_str(&format!("{j},{},{qp},{l}\n", fmt::num(*q)));
    }
    let mut failed = None;
    if let Some((qp, l)) = &via {
        let gap_phi = deviation(&direct, qp)?;
        let gap_ltp = deviation(&direct, l)?;
        text.push_str(&format!(
            "# max_gap q_phi={} ltp={}\n",
            fmt::num(gap_phi.max_gap),
            fmt::num(gap_ltp.max_gap)
        ));
        if gap_phi.max_gap >= BORN_GAP {
            failed = Some(gap_phi.max_gap);
        }
    }
    io.print(&text)?;
    match failed {
        Some(gap) => Err(CliError::CheckFailed(format!(
            "quasistochastic prediction deviates from the Born Rule by {}",
            fmt::num(gap)
        ))),
        None => Ok(()),
    }
}

fn majorize(a: &MajorizeArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let requested = match (a.log, a.weak) {
        (false, false) => Relation::Majorizes,
        (false, true) => Relation::WeaklyMajorizes,
        (true, false) => Relation::LogMajorizes,
        (true, true) => Relation::WeaklyLogMajorizes,
    };
    let name = relation_name(requested);
    io.echo(
        "majorize",
        seed,
        &format!(
            "x={} y={} relation={name} tol={}",
            a.x.display(),
            a.y.display(),
            fmt::num(a.tol)
        ),
    );
    let x = io::read_vector_csv(&a.x)?;
    let y = io::read_vector_csv(&a.y)?;
    let verdict = if a.log {
        weak_log_majorizes(&x, &y, a.tol)?
    } else {
        weak_majorizes(&x, &y, a.tol)?
    };
    let holds = if a.weak {
        verdict.holds()
    } else {
        verdict.relation == requested
    };
    io.print(&format!(
        "requested,relation,holds,worst_margin,worst_index\n{name},{},{holds},{},{}\n",
        relation_name(verdict.relation),
        fmt::num(verdict.worst_margin),
        verdict.worst_index + 1
    ))?;
    if holds {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "x does not satisfy {name} over y"
        )))
    }
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Majorizes => "majorizes",
        Relation::WeaklyMajorizes => "weakly_majorizes",
        Relation::LogMajorizes => "log_majorizes",
        Relation::WeaklyLogMajorizes => "weakly_log_majorizes",
        Relation::None => "none",
    }
}

fn distance(a: &DistanceArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let (proc, phi) = a.source.load()?;
    let n = proc.mic().len();
    let specs = if a.norm.is_empty() {
        NormSpec::standard_suite(n)
    } else {
        a.norm.clone()
    };
    let names: Vec<String> = specs.iter().map(ToString::to_string).collect();
    io.echo(
        "distance",
        seed,
        &format!("{} norms={}", a.source.echo(), names.join(";")),
    );
    let reference = phi_sic(proc.dim());
    let mut text = String::from("norm,distance,sic_distance,margin\n");
    let mut worst = f64::INFINITY;
    for spec in specs {
        spec.validate(n)?;
        let dist = distance_from_identity(&phi, spec)?;
        let sic = distance_from_identity(&reference, spec)?;
        worst = worst.min(dist - sic);
        text.push_str(&format!(
            "{spec},{},{},{}\n",
            fmt::num(dist),
            fmt::num(sic),
            fmt::num(dist - sic)
        ));
    }
    io.print(&text)?;
    if worst < -DISTANCE_SLACK {
        Err(CliError::CheckFailed(format!(
            "distance falls below the SIC value by {}",
            fmt::num(-worst)
        )))
    } else {
        Ok(())
    }
}

fn volume(a: &VolumeArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let (lo, hi) = match (a.d, a.table) {
        (_, Some(range)) => range,
        (Some(d), None) => (d, d),
        (None, None) => unreachable!("clap enforces one of --d and --table"),
    };
    io.echo("volume", seed, &format!("dims={lo}..{hi}"));
    if lo == 0 {
        return Err(CliError::Usage("dimension must be positive".into()));
    }
    let mut text = String::from("d,vol_P_sic,vol_simplex,ratio,vol_HS\n");
    for d in lo..=hi {
        let r = volume_report(d);
        text.push_str(&format!(
            "{d},{}\n",
            fmt::row([r.vol_p_sic, r.vol_simplex, r.ratio, r.vol_hs_qd])
        ));
    }
    io.print(&text)
}

fn run_ensemble(a: &EnsembleArgs, seed: Option<u64>, io: &mut Io<'_>) -> Result<()> {
    let mut config: EnsembleConfig = io::read_json(&a.config)?;
    if let Some(s) = seed {
        config.master_seed = s;
    }
    let threads = a.threads.map_or("all".into(), |n| n.to_string());
    let summary = serde_json::to_string(&config).expect("serializable config");
    io.echo(
        "ensemble",
        seed,
        &format!("config={summary} out={} threads={threads}", a.out.display()),
    );
    let start = Instant::now();
    let (report, outcomes) = ensemble::run(&config, a.threads)?;
    ensemble::write_outputs(&a.out, &report, &outcomes)?;
    let _ = writeln!(
        io.err,
        "micbench ensemble: {} samples in {:.3}s",
        config.n_samples,
        start.elapsed().as_secs_f64()
    );
    io.print(&ensemble::summary_table(&report))?;
    if report.total_errors > 0 {
        let _ = writeln!(
            io.err,
            "micbench ensemble: {} check evaluations failed numerically",
            report.total_errors
        );
    }
    if report.total_violations > 0 {
        Err(CliError::CheckFailed(format!(
            "{} violations",
            report.total_violations
        )))
    } else {
        Ok(())
    }
}
