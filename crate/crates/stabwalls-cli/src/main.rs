use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stabwalls::chern::{format_rational, parse_rational, ChernCharacter, HalfPlanePoint, Rational, SPoint};
use stabwalls::enumerate::{
    enumerate_nu_candidates, enumerate_pseudo_walls, nu_anchor, NuFilterMode, PseudoWallFilters, SearchBox,
};
use stabwalls::geometry::{gamma_alpha_sq, sample_gamma, sample_theta, Window};
use stabwalls::walls::WallDossier;

mod figure;
mod report;
mod svg;

/// Exit status classes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or a domain error from the library (exit 2).
    Input(String),
    /// A certified computation could not be completed (exit 3).
    Certification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Certification(_) => 3,
        }
    }

    pub fn input(e: impl fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Certification(m) => write!(f, "certification failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(name = "stabwalls", version, about = "Exact nu-walls and lambda-walls on Picard rank one threefolds")]
struct Cli {
    /// Worker threads for tracing and enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of a Chern character `v0,v1,v2,v3`.
    Invariants {
        v: String,
        /// Parameter used for the Gamma three-branch threshold.
        #[arg(long, default_value = "1/3")]
        s: String,
    },
    /// Dossier of the numerical lambda-wall of `u` for `v`.
    Wall(WallArgs),
    /// Lattice searches for pseudo lambda-walls or nu-walls.
    #[command(subcommand)]
    Enumerate(EnumerateCommand),
    /// SVG figure from a JSON spec or a built-in preset.
    Figure(FigureArgs),
    /// CSV samples `beta,alpha,branch,exact` of Gamma or Theta.
    #[command(subcommand)]
    Sample(SampleCommand),
}

#[derive(Args, Debug, Clone)]
struct WindowArgs {
    #[arg(long, default_value = "-5", allow_hyphen_values = true)]
    beta_min: String,
    #[arg(long, default_value = "5", allow_hyphen_values = true)]
    beta_max: String,
    #[arg(long, default_value = "5")]
    alpha_max: String,
    /// Grid step in beta and alpha.
    #[arg(long, default_value = "1/64")]
    step: String,
}

impl WindowArgs {
    fn parse(&self) -> Result<(Window, Rational), CliError> {
        let w = Window::new(rational(&self.beta_min)?, rational(&self.beta_max)?, rational(&self.alpha_max)?)
            .map_err(CliError::input)?;
        let step = rational(&self.step)?;
        if step <= Rational::from_integer(0.into()) {
            return Err(CliError::Input("step must be positive".into()));
        }
        Ok((w, step))
    }
}

#[derive(Args, Debug)]
struct WallArgs {
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long)]
    s: String,
    #[command(flatten)]
    window: WindowArgs,
    /// Skip tracing the wall.
    #[arg(long)]
    no_trace: bool,
    /// Write the traced components as CSV `component,beta,alpha`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG of Theta, Gamma, the nu-wall and the traced wall.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct BoxArgs {
    #[arg(long, allow_hyphen_values = true)]
    rank_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    rank_max: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c1_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c1_max: Option<i64>,
    /// Bound on `|2 ch2|`.
    #[arg(long)]
    c2_bound: Option<i64>,
    /// Bound on `|6 ch3|`.
    #[arg(long)]
    c3_bound: Option<i64>,
}

impl BoxArgs {
    fn apply(&self, base: SearchBox) -> Result<SearchBox, CliError> {
        SearchBox::new(
            self.rank_min.unwrap_or(base.rank_min),
            self.rank_max.unwrap_or(base.rank_max),
            self.c1_min.unwrap_or(base.c1_min),
            self.c1_max.unwrap_or(base.c1_max),
            self.c2_bound.unwrap_or(base.c2_bound),
            self.c3_bound.unwrap_or(base.c3_bound),
        )
        .map_err(CliError::input)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum NuFilterArg {
    Off,
    On,
    Auto,
}

#[derive(Subcommand, Debug)]
enum EnumerateCommand {
    /// Pseudo lambda-walls through a point of Gamma.
    Pseudo {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Height `alpha^2` of the point; omitted means the point on Gamma.
        #[arg(long, conflicts_with = "on_gamma")]
        alpha_sq: Option<String>,
        /// Take `alpha^2` from Gamma at `beta` (the default).
        #[arg(long)]
        on_gamma: bool,
        #[command(flatten)]
        search: BoxArgs,
        /// No-nu-wall filter; `auto` applies it when `v` has no nu-wall candidates.
        #[arg(long, value_enum, default_value = "auto")]
        nu_filter: NuFilterArg,
        /// Drop the chi integrality test (it assumes projective 3-space).
        #[arg(long)]
        no_chi: bool,
        #[arg(long)]
        no_bogomolov: bool,
        /// Apply `|y + r| <= 2|x|`, valid for `v = (2,0,-1,0)` only.
        #[arg(long)]
        lambda_nu: bool,
        /// Include every rejected lattice vector with its diagnostics.
        #[arg(long)]
        with_rejected: bool,
    },
    /// Numerical nu-walls crossing the left foot of Theta.
    Nu {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        search: BoxArgs,
    },
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// JSON figure spec.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<figure::Preset>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SampleCommand {
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        s: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Significant digits for alpha.
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
}

pub fn rational(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(CliError::input)
}

pub fn chern(text: &str) -> Result<ChernCharacter, CliError> {
    text.parse::<ChernCharacter>().map_err(CliError::input)
}

/// Writes to stdout; a closed pipe is not an error for a report.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json(value: &Value) {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    emit(&text);
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn cmd_invariants(v: &str, s: &str) -> Result<(), CliError> {
    let v = chern(v)?;
    if v.is_zero() {
        return Err(CliError::Input("zero character".into()));
    }
    let s = rational(s)?;
    print_json(&report::invariants(&v, &s));
    Ok(())
}

fn cmd_wall(args: &WallArgs) -> Result<(), CliError> {
    let u = chern(&args.u)?;
    let v = chern(&args.v)?;
    let s = rational(&args.s)?;
    let (window, step) = args.window.parse()?;
    let trace = (!args.no_trace).then_some((&window, &step));
    let dossier = WallDossier::build(&u, &v, &s, trace).map_err(CliError::input)?;
    print_json(&report::dossier(&dossier));
    if let Some(trace) = &dossier.trace {
        if let Some(path) = &args.csv {
            write_output(&Some(path.clone()), &report::trace_csv(trace))?;
        }
        if let Some(path) = &args.svg {
            let doc = figure::wall_figure(&u, &v, &s, &window, &step, trace).map_err(CliError::input)?;
            write_output(&Some(path.clone()), &doc)?;
        }
        if !trace.is_certified() {
            return Err(CliError::Certification(format!(
                "{} column link(s) could not be explained at step {}",
                trace.unresolved_links,
                format_rational(&step)
            )));
        }
    }
    Ok(())
}

fn cmd_enumerate(cmd: &EnumerateCommand) -> Result<(), CliError> {
    match cmd {
        EnumerateCommand::Pseudo {
            v,
            s,
            beta,
            alpha_sq,
            on_gamma: _,
            search,
            nu_filter,
            no_chi,
            no_bogomolov,
            lambda_nu,
            with_rejected,
        } => {
            let v = chern(v)?;
            let s = rational(s)?;
            let beta = rational(beta)?;
            let a = match alpha_sq {
                Some(a) => rational(a)?,
                None => gamma_alpha_sq(&v, &s, &beta)
                    .map_err(CliError::input)?
                    .ok_or_else(|| CliError::Input("Gamma has no point over this beta".into()))?,
            };
            let point = HalfPlanePoint::new(beta, a).map_err(CliError::input)?;
            let sp = SPoint::new(point, s).map_err(CliError::input)?;
            let bx = search.apply(SearchBox::default_for(&v))?;
            let filters = PseudoWallFilters {
                chi: !no_chi,
                bogomolov: !no_bogomolov,
                no_nu_walls: match nu_filter {
                    NuFilterArg::Off => NuFilterMode::Off,
                    NuFilterArg::On => NuFilterMode::On,
                    NuFilterArg::Auto => NuFilterMode::Auto,
                },
                lambda_nu: *lambda_nu,
                ..PseudoWallFilters::default()
            };
            let res = enumerate_pseudo_walls(&v, &sp, &bx, &filters).map_err(CliError::input)?;
            print_json(&report::pseudo_walls(&v, &sp, &bx, &filters, &res, *with_rejected));
            Ok(())
        }
        EnumerateCommand::Nu { v, search } => {
            let v = chern(v)?;
            let bx = search.apply(SearchBox::default_nu(&v))?;
            let anchor = nu_anchor(&v).map_err(CliError::input)?;
            let found = enumerate_nu_candidates(&v, &bx).map_err(CliError::input)?;
            print_json(&report::nu_candidates(&v, &bx, &anchor, &found));
            Ok(())
        }
    }
}

fn cmd_figure(args: &FigureArgs) -> Result<(), CliError> {
    let spec = match (&args.spec, args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            figure::FigureSpec::from_json(&text)?
        }
        (None, Some(p)) => figure::FigureSpec::preset(p),
        (None, None) => return Err(CliError::Input("figure needs --spec or --preset".into())),
    };
    let (doc, unresolved) = figure::render(&spec)?;
    write_output(&args.out, &doc)?;
    if unresolved > 0 {
        return Err(CliError::Certification(format!("{unresolved} column link(s) left unexplained while tracing")));
    }
    Ok(())
}

fn cmd_sample(cmd: &SampleCommand) -> Result<(), CliError> {
    let (samples, digits) = match cmd {
        SampleCommand::Gamma { v, s, window, digits } => {
            let (w, step) = window.parse()?;
            (sample_gamma(&chern(v)?, &rational(s)?, &w, &step).map_err(CliError::input)?, *digits)
        }
        SampleCommand::Theta { v, window, digits } => {
            let (w, step) = window.parse()?;
            (sample_theta(&chern(v)?, &w, &step).map_err(CliError::input)?, *digits)
        }
    };
    emit(&report::samples_csv(&samples, digits));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Invariants { v, s } => cmd_invariants(v, s),
        Command::Wall(args) => cmd_wall(args),
        Command::Enumerate(cmd) => cmd_enumerate(cmd),
        Command::Figure(args) => cmd_figure(args),
        Command::Sample(cmd) => cmd_sample(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Top-level JSON envelope shared by every command.
pub fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema": 1, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}
