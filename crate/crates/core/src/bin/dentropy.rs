use std::f64::consts::LN_2;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dentropy::io::{read_counts, read_pmf, write_clt_artifacts, write_trace_artifacts};
use dentropy::montecarlo::{
    default_trace_grid, reference_pmf, run_clt_experiment, run_trace_experiment, EstimatorTag, ExperimentConfig,
    SCHEMA_VERSION,
};
use dentropy::validation::Suite;
use dentropy::{miller_madow_correct, plugin_estimate, true_entropy, EntropyKind, Error, EstimateResult};

const EXIT_VALIDATION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_ZERO_MASS: u8 = 3;
const EXIT_PARAMETER: u8 = 4;
const EXIT_DEGENERATE: u8 = 5;

#[derive(Parser)]
#[command(name = "dentropy", version, about = "Plug-in estimation of discrete entropies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate an entropy from sample data (raw observations or `label,count` CSV).
    Estimate {
        data: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Add the Miller–Madow correction (Shannon only).
        #[arg(long)]
        miller_madow: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the entropy of a known pmf (JSON with "labels" and "probs").
    True {
        #[arg(long)]
        pmf: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Replicate sampling and write CLT diagnostics.
    Simulate(SimulateArgs),
    /// Run a validation suite; exits 1 if any check fails.
    Validate {
        #[arg(value_parser = parse_suite_arg)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// shannon | renyi | tsallis | landsberg-vedral | abe | kappa | varma
    #[arg(long, default_value = "shannon")]
    entropy: String,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
}

impl FamilyArgs {
    fn kind(&self) -> dentropy::Result<EntropyKind> {
        EntropyKind::from_flags(&self.entropy, self.alpha, self.beta, self.kappa)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Unit::Nats)]
    unit: Unit,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Pmf JSON; defaults to (0.4, 0.25, 0.35).
    #[arg(long)]
    pmf: Option<PathBuf>,
    /// Restrict to one family; all seven standard families otherwise.
    #[arg(long)]
    entropy: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Sample sizes, comma separated and increasing.
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    n: Vec<u64>,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Plugin)]
    estimator: EstimatorArg,
    /// Output directory.
    #[arg(long, default_value = "dentropy-out")]
    out: PathBuf,
    /// Also write single-path traces over n = 100, 200, …, 30000.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Unit {
    Nats,
    Bits,
}

impl Unit {
    fn scale(self) -> f64 {
        match self {
            Unit::Nats => 1.0,
            Unit::Bits => 1.0 / LN_2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Plugin,
    MillerMadow,
    Zhang,
}

#[derive(Clone, Copy)]
enum SuiteArg {
    One(Suite),
    All,
}

fn parse_suite_arg(s: &str) -> Result<SuiteArg, String> {
    if s == "all" {
        return Ok(SuiteArg::All);
    }
    s.parse().map(SuiteArg::One).map_err(|_| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("expected one of {} or all", names.join(", "))
    })
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ZeroMassUndefined { .. } => EXIT_ZERO_MASS,
        Error::DegenerateVariance { .. } => EXIT_DEGENERATE,
        Error::InvalidParameter(_)
        | Error::WrongFamily(_)
        | Error::TooLarge { .. }
        | Error::TooManyExclusions { .. }
        | Error::LabelMismatch => EXIT_PARAMETER,
        _ => EXIT_PARSE,
    }
}

fn remediation(err: &Error) -> Option<&'static str> {
    match err {
        Error::ZeroMassUndefined { .. } => Some(
            "hint: this kernel has no value at zero mass; use --entropy shannon or renyi, or merge rare categories",
        ),
        Error::DegenerateVariance { .. } => {
            Some("hint: the CLT scaling is uninformative here (e.g. a uniform pmf); choose a non-uniform pmf")
        }
        _ => None,
    }
}

fn emit(out: Option<&Path>, text: &str) -> dentropy::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `x` rounded to 7 significant digits, positional unless very large or small.
fn seven_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exponent) {
        return format!("{x:.6e}");
    }
    let rounded: f64 = format!("{x:.6e}").parse().expect("formatted float parses");
    let exponent = rounded.abs().log10().floor() as i32;
    format!("{rounded:.*}", (6 - exponent).max(0) as usize)
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    schema_version: u32,
    unit: &'static str,
    family: String,
    point: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    level: f64,
    n: u64,
    correction: dentropy::Correction,
    /// Asymptotic variance in squared display units.
    variance: f64,
    parameters: EntropyKind,
    diagnostics: &'a dentropy::entropies::Diagnostics,
}

impl<'a> EstimateOutput<'a> {
    fn new(r: &'a EstimateResult, unit: Unit) -> Self {
        let s = unit.scale();
        EstimateOutput {
            schema_version: SCHEMA_VERSION,
            unit: unit.name(),
            family: r.kind.family_name().to_string(),
            point: r.point * s,
            std_error: r.std_error * s,
            ci_low: r.ci_low * s,
            ci_high: r.ci_high * s,
            level: r.level,
            n: r.n,
            correction: r.correction,
            variance: r.variance * s * s,
            parameters: r.kind,
            diagnostics: &r.diagnostics,
        }
    }

    fn csv(&self) -> dentropy::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["family", "point", "std_error", "ci_low", "ci_high", "level", "n", "unit", "unobserved"])?;
        w.write_record([
            self.family.clone(),
            self.point.to_string(),
            self.std_error.to_string(),
            self.ci_low.to_string(),
            self.ci_high.to_string(),
            self.level.to_string(),
            self.n.to_string(),
            self.unit.to_string(),
            self.diagnostics.unobserved.to_string(),
        ])?;
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn text(&self, kind: EntropyKind) -> String {
        let mut s = format!(
            "{kind}: {} {}\nstd error: {}\n{}% CI: [{}, {}]\nn: {}\n",
            seven_significant(self.point),
            self.unit,
            seven_significant(self.std_error),
            self.level * 100.0,
            seven_significant(self.ci_low),
            seven_significant(self.ci_high),
            self.n
        );
        for note in &self.diagnostics.notes {
            s.push_str(&format!("note: {note}\n"));
        }
        s
    }
}

fn cmd_estimate(
    data: &Path,
    family: &FamilyArgs,
    level: f64,
    miller_madow: bool,
    output: &OutputArgs,
) -> dentropy::Result<()> {
    let kind = family.kind()?;
    let counts = read_counts(data)?;
    let mut result = plugin_estimate(&counts, kind, level)?;
    if miller_madow {
        result = miller_madow_correct(&result, &counts)?;
    }
    let view = EstimateOutput::new(&result, output.unit);
    let text = match output.format {
        Format::Text => view.text(kind),
        Format::Json => serde_json::to_string_pretty(&view)? + "\n",
        Format::Csv => view.csv()?,
    };
    emit(output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct TrueOutput {
    schema_version: u32,
    unit: &'static str,
    family: String,
    value: f64,
    parameters: EntropyKind,
}

fn cmd_true(pmf: &Path, family: &FamilyArgs, output: &OutputArgs) -> dentropy::Result<()> {
    let kind = family.kind()?;
    let pmf = read_pmf(pmf)?;
    let value = true_entropy(&pmf, kind)? * output.unit.scale();
    let view = TrueOutput {
        schema_version: SCHEMA_VERSION,
        unit: output.unit.name(),
        family: kind.family_name().to_string(),
        value,
        parameters: kind,
    };
    let text = match output.format {
        Format::Text => seven_significant(value) + "\n",
        Format::Json => serde_json::to_string_pretty(&view)? + "\n",
        Format::Csv => format!("family,value,unit\n{},{},{}\n", view.family, value, view.unit),
    };
    emit(output.out.as_deref(), &text)
}

fn cmd_simulate(args: &SimulateArgs) -> dentropy::Result<()> {
    let pmf = match &args.pmf {
        Some(path) => read_pmf(path)?,
        None => reference_pmf(),
    };
    let kinds = match &args.entropy {
        Some(name) => vec![EntropyKind::from_flags(name, args.alpha, args.beta, args.kappa)?],
        None if args.alpha.is_some() || args.beta.is_some() || args.kappa.is_some() => {
            return Err(Error::InvalidParameter("parameter flags need --entropy".into()));
        }
        None => EntropyKind::standard_suite(),
    };
    let config = ExperimentConfig {
        pmf,
        kinds,
        n_grid: args.n.clone(),
        replications: args.reps,
        master_seed: args.seed,
        estimator: match args.estimator {
            EstimatorArg::Plugin => EstimatorTag::Plugin,
            EstimatorArg::MillerMadow => EstimatorTag::PluginMillerMadow,
            EstimatorArg::Zhang => EstimatorTag::Zhang,
        },
        ..ExperimentConfig::default()
    };
    let report = run_clt_experiment(&config)?;
    let mut written = write_clt_artifacts(&args.out, &report)?;
    if args.trace {
        let trace = run_trace_experiment(&ExperimentConfig { n_grid: default_trace_grid(), ..config })?;
        written.extend(write_trace_artifacts(&args.out, &trace)?);
    }
    let mut stdout = std::io::stdout().lock();
    for e in &report.entries {
        writeln!(
            stdout,
            "{} n={}: KS {:.4}, variance ratio {:.4}, n*bias {:.4} [{}]",
            e.kind,
            e.n,
            e.normality.ks_distance,
            e.empirical_variance_ratio,
            e.bias_times_n,
            if e.passed { "ok" } else { "outside thresholds" }
        )?;
    }
    writeln!(stdout, "wrote {} files to {}", written.len(), args.out.display())?;
    Ok(())
}

#[derive(Serialize)]
struct SuiteOutput {
    suite: &'static str,
    checks: Vec<dentropy::validation::Check>,
}

fn cmd_validate(suite: SuiteArg, format: Format) -> dentropy::Result<bool> {
    let suites = match suite {
        SuiteArg::One(s) => vec![s],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut outputs = Vec::new();
    for s in suites {
        outputs.push(SuiteOutput { suite: s.name(), checks: s.run()? });
    }
    let passed = outputs.iter().flat_map(|o| &o.checks).all(|c| c.passed);
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&outputs)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut stdout);
            w.write_record(["suite", "check", "passed", "detail"])?;
            for o in &outputs {
                for c in &o.checks {
                    w.write_record([o.suite, &c.name, if c.passed { "true" } else { "false" }, &c.detail])?;
                }
            }
            w.flush()?;
        }
        Format::Text => {
            for o in &outputs {
                for c in &o.checks {
                    writeln!(stdout, "{}: {c}", o.suite)?;
                }
            }
            let total: usize = outputs.iter().map(|o| o.checks.len()).sum();
            let failed = outputs.iter().flat_map(|o| &o.checks).filter(|c| !c.passed).count();
            writeln!(stdout, "{} of {total} checks passed", total - failed)?;
        }
    }
    Ok(passed)
}

fn run(cli: Cli) -> dentropy::Result<bool> {
    match &cli.command {
        Command::Estimate { data, family, level, miller_madow, output } => {
            cmd_estimate(data, family, *level, *miller_madow, output).map(|_| true)
        }
        Command::True { pmf, family, output } => cmd_true(pmf, family, output).map(|_| true),
        Command::Simulate(args) => cmd_simulate(args).map(|_| true),
        Command::Validate { suite, format } => cmd_validate(*suite, *format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if let Some(hint) = remediation(&err) {
                eprintln!("{hint}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
