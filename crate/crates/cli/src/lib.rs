//! Command-line front end for `qif`.
//!
//! [`Cli`] is the argument grammar, [`execute`] runs a parsed command and
//! returns what the binary prints together with its exit code:
//! 0 on success, 1 when a `verify` predicate (or a `fuzz` property) is
//! false, 2 for invalid requests or inputs, 3 for malformed input files.

pub mod error;
pub mod formats;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qif::dalenius::{dalenius_capacity_bound, dalenius_lift};
use qif::gain::{gid, reciprocal_gain};
use qif::measures::{
    bayes_capacity, check_ordering_chain, lift, lift_capacity, lift_capacity_report,
    max_case_leakage, max_case_leakage_report, max_posterior_vulnerability_report, mult_leakage,
    posterior_vulnerability, prior_vulnerability, verify_ldp, verify_lip,
};
use qif::propcheck::{mutants, run_registry_with, CheckResult, InstanceSpec, Subject};
use qif::{hyper, Channel, Correlation, ExtRational, GainFunction, Label, Prior, Rational};
use serde_json::{json, Map, Value};

pub use error::{CliError, FormatError, ParseError};
use report::{inputs_json, value_json, value_text, Report, Scale};

#[derive(Parser, Debug)]
#[command(
    name = "qif",
    version,
    about = "Exact leakage analysis of finite channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute one measure for a channel.
    Analyze(AnalyzeArgs),
    /// Lift capacity (the e^ε of local DP) or Bayes capacity of a channel.
    Capacity(CapacityArgs),
    /// Tabulate leakage and capacities for several channels side by side.
    Compare(CompareArgs),
    /// Check a privacy predicate; exits 1 when it is false.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Bounds on leakage about a secret correlated with the channel input.
    Dalenius(DaleniusArgs),
    /// Check every registered property on random instances.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    PriorVulnerability,
    PosteriorVulnerability,
    MaxPosteriorVulnerability,
    MultLeakage,
    MaxCaseLeakage,
    Lift,
    BayesCapacity,
    LiftCapacity,
    Hyper,
    Chain,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::PriorVulnerability => "prior-vulnerability",
            Measure::PosteriorVulnerability => "posterior-vulnerability",
            Measure::MaxPosteriorVulnerability => "max-posterior-vulnerability",
            Measure::MultLeakage => "mult-leakage",
            Measure::MaxCaseLeakage => "max-case-leakage",
            Measure::Lift => "lift",
            Measure::BayesCapacity => "bayes-capacity",
            Measure::LiftCapacity => "lift-capacity",
            Measure::Hyper => "hyper",
            Measure::Chain => "chain",
        }
    }

    pub fn needs_prior(self) -> bool {
        !matches!(self, Measure::BayesCapacity | Measure::LiftCapacity)
    }

    pub fn needs_gain(self) -> bool {
        matches!(
            self,
            Measure::PriorVulnerability
                | Measure::PosteriorVulnerability
                | Measure::MaxPosteriorVulnerability
                | Measure::MultLeakage
                | Measure::MaxCaseLeakage
                | Measure::Chain
        )
    }
}

/// Where a prior comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriorSource {
    Uniform,
    File(PathBuf),
}

impl PriorSource {
    fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "uniform" => PriorSource::Uniform,
            path => PriorSource::File(path.into()),
        })
    }

    fn describe(&self) -> String {
        match self {
            PriorSource::Uniform => "uniform".into(),
            PriorSource::File(p) => p.display().to_string(),
        }
    }
}

/// Where a gain function comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GainSource {
    Identity,
    Reciprocal,
    File(PathBuf),
}

impl GainSource {
    fn parse(s: &str) -> Result<Self, String> {
        Ok(match s {
            "gid" => GainSource::Identity,
            "reciprocal" => GainSource::Reciprocal,
            path => GainSource::File(path.into()),
        })
    }

    fn describe(&self) -> String {
        match self {
            GainSource::Identity => "gid".into(),
            GainSource::Reciprocal => "reciprocal".into(),
            GainSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Prior file, or `uniform`.
    #[arg(long, value_parser = PriorSource::parse)]
    pub prior: Option<PriorSource>,
    /// Gain file, or one of `gid`, `reciprocal`.
    #[arg(long, value_parser = GainSource::parse)]
    pub gain: Option<GainSource>,
    #[arg(long, value_enum)]
    pub measure: Measure,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CapacityKind {
    Lift,
    Bayes,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum, default_value = "lift")]
    pub kind: CapacityKind,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Repeat once per channel.
    #[arg(long, required = true)]
    pub channel: Vec<PathBuf>,
    #[arg(long, value_parser = PriorSource::parse, default_value = "uniform")]
    pub prior: PriorSource,
    #[arg(long, value_parser = GainSource::parse, default_value = "gid")]
    pub gain: GainSource,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Is the channel ε-LDP for the factor e^ε?
    Ldp {
        #[arg(long)]
        channel: PathBuf,
        /// The factor e^ε, as a rational or `inf`.
        #[arg(long)]
        factor: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Is the channel ε-LIP under the prior for the factor e^ε?
    Lip {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_parser = PriorSource::parse)]
        prior: PriorSource,
        #[arg(long)]
        factor: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args, Debug)]
pub struct DaleniusArgs {
    /// Joint distribution over the correlated secret and the channel input.
    #[arg(long)]
    pub joint: PathBuf,
    #[arg(long)]
    pub channel: PathBuf,
    /// Gain over the correlated secret: `gid`, `reciprocal` or a file.
    #[arg(long, value_parser = GainSource::parse, default_value = "gid")]
    pub gain: GainSource,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mutant {
    /// Lift without the positive-joint side condition.
    BrokenLift,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Overridden by the QIF_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 5)]
    pub max_secrets: usize,
    #[arg(long, default_value_t = 5)]
    pub max_observations: usize,
    #[arg(long, default_value_t = 5)]
    pub max_actions: usize,
    #[arg(long, default_value_t = 24)]
    pub denominator_bound: u64,
    /// Run the registry against a deliberately wrong implementation.
    #[arg(long, value_enum)]
    pub mutant: Option<Mutant>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// What the binary writes and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, success: bool) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: if success { 0 } else { 1 },
        }
    }

    fn error(e: &CliError) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        }
    }
}

/// Runs a command, reading `QIF_SEED` from the environment.
pub fn execute(cli: &Cli) -> Outcome {
    execute_with_seed(cli, std::env::var("QIF_SEED").ok())
}

/// Runs a command with an explicit `QIF_SEED` value.
pub fn execute_with_seed(cli: &Cli, seed_env: Option<String>) -> Outcome {
    let result = match &cli.command {
        Command::Analyze(a) => AnalysisRequest::from(a).run().map(|s| (s, true)),
        Command::Capacity(a) => capacity(a).map(|s| (s, true)),
        Command::Compare(a) => compare(a).map(|s| (s, true)),
        Command::Verify(v) => verify(v),
        Command::Dalenius(a) => dalenius(a),
        Command::Fuzz(a) => fuzz(a, seed_env.as_deref()),
    };
    match result {
        Ok((stdout, success)) => Outcome::ok(stdout, success),
        Err(e) => Outcome::error(&e),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load<T>(path: &Path, parse: fn(&str) -> Result<T, FormatError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source: Box::new(source),
    })
}

pub fn load_channel(path: &Path) -> Result<Channel, CliError> {
    load(path, formats::parse_channel_csv)
}

fn load_prior(source: &PriorSource, secrets: &[Label]) -> Result<Prior, CliError> {
    match source {
        PriorSource::Uniform => Ok(Prior::uniform(secrets.to_vec())?),
        PriorSource::File(p) => load(p, formats::parse_prior_csv),
    }
}

fn load_gain(
    source: &GainSource,
    secrets: &[Label],
    prior: Option<&Prior>,
) -> Result<GainFunction, CliError> {
    match source {
        GainSource::Identity => Ok(gid(secrets)?),
        GainSource::Reciprocal => {
            let pi = prior
                .ok_or_else(|| CliError::Request("the reciprocal gain needs a prior".into()))?;
            Ok(reciprocal_gain(pi)?)
        }
        GainSource::File(p) => load(p, formats::parse_gain_csv),
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.text(),
        Format::Json => json_text(&report.json()),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn parse_factor(text: &str) -> Result<ExtRational, CliError> {
    ExtRational::parse(text).map_err(|_| CliError::Request(format!("malformed factor {text:?}")))
}

/// A validated `analyze` invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisRequest {
    pub channel: PathBuf,
    pub prior: Option<PriorSource>,
    pub gain: Option<GainSource>,
    pub measure: Measure,
    pub format: Format,
}

impl From<&AnalyzeArgs> for AnalysisRequest {
    fn from(a: &AnalyzeArgs) -> Self {
        AnalysisRequest {
            channel: a.channel.clone(),
            prior: a.prior.clone(),
            gain: a.gain.clone(),
            measure: a.measure,
            format: a.format,
        }
    }
}

impl AnalysisRequest {
    /// Checks that the measure's inputs are present.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = self.measure.name();
        if self.measure.needs_prior() && self.prior.is_none() {
            return Err(CliError::Request(format!("{m} needs --prior")));
        }
        if self.measure.needs_gain() && self.gain.is_none() {
            return Err(CliError::Request(format!("{m} needs --gain")));
        }
        if self.gain == Some(GainSource::Reciprocal) && self.prior.is_none() {
            return Err(CliError::Request(
                "the reciprocal gain needs --prior".into(),
            ));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<String, CliError> {
        self.validate()?;
        let c = load_channel(&self.channel)?;
        let mut inputs = vec![("channel", self.channel.display().to_string())];
        let prior = match &self.prior {
            Some(p) => {
                inputs.push(("prior", p.describe()));
                Some(load_prior(p, c.secrets())?)
            }
            None => None,
        };
        let gain = match &self.gain {
            Some(g) => {
                inputs.push(("gain", g.describe()));
                Some(load_gain(g, c.secrets(), prior.as_ref())?)
            }
            None => None,
        };
        let name = self.measure.name();
        // validate() guarantees these are present where used
        let pi = || prior.as_ref().expect("validated");
        let g = || gain.as_ref().expect("validated");

        let mut report = match self.measure {
            Measure::PriorVulnerability => Report::rational(name, prior_vulnerability(g(), pi())?),
            Measure::PosteriorVulnerability => {
                Report::rational(name, posterior_vulnerability(g(), pi(), &c)?)
            }
            Measure::MaxPosteriorVulnerability => {
                let r = max_posterior_vulnerability_report(g(), pi(), &c)?;
                Report {
                    witness: r.witness,
                    ..Report::new(name, r.value, Scale::Ratio)
                }
            }
            Measure::MultLeakage => Report::rational(name, mult_leakage(g(), pi(), &c)?),
            Measure::MaxCaseLeakage => {
                let r = max_case_leakage_report(g(), pi(), &c)?;
                Report {
                    witness: r.witness,
                    ..Report::new(name, r.value, Scale::Ratio)
                }
            }
            Measure::Lift => {
                let r = lift(pi(), &c)?;
                Report {
                    witness: r.witness,
                    ..Report::new(name, r.value, Scale::Ratio)
                }
            }
            Measure::BayesCapacity => Report::new(name, bayes_capacity(&c), Scale::Factor),
            Measure::LiftCapacity => {
                let r = lift_capacity_report(&c);
                Report {
                    witness: r.witness,
                    ..Report::new(name, r.value, Scale::Factor)
                }
            }
            Measure::Hyper => hyper_report(pi(), &c)?,
            Measure::Chain => chain_report(g(), pi(), &c)?,
        };
        report.inputs = inputs;
        Ok(render(&report, self.format))
    }
}

fn hyper_report(pi: &Prior, c: &Channel) -> Result<Report, CliError> {
    let h = hyper(pi, c)?;
    let mut rows = vec![std::iter::once("obs".to_string())
        .chain(std::iter::once("p(y)".to_string()))
        .chain(pi.labels().iter().map(ToString::to_string))
        .collect::<Vec<_>>()];
    let mut columns = Vec::new();
    for (y, p, post) in h.iter() {
        rows.push(
            [y.to_string(), p.to_string()]
                .into_iter()
                .chain(post.masses().iter().map(ToString::to_string))
                .collect(),
        );
        let posterior: Map<String, Value> = post
            .iter()
            .map(|(x, m)| (x.to_string(), Value::String(m.to_string())))
            .collect();
        columns.push(
            json!({ "obs": y.to_string(), "marginal": p.to_string(), "posterior": posterior }),
        );
    }
    let total: Rational = h.marginals().iter().sum();
    let mut r = Report::rational("hyper", total);
    r.headline = Some(format!(
        "hyper: {} observations with positive probability",
        h.len()
    ));
    r.notes.push(report::table(&rows).trim_end().to_string());
    r.extra.insert("columns".into(), Value::Array(columns));
    Ok(r)
}

fn chain_report(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<Report, CliError> {
    let chain = check_ordering_chain(g, pi, c)?;
    let holds = chain.all_hold();
    let violations = chain.violations().count();
    let mut r = Report::rational("chain", Rational::from_integer(violations as i64));
    r.headline = Some(if holds {
        format!(
            "ordering chain: all {} relations hold",
            chain.relations.len()
        )
    } else {
        format!(
            "ordering chain: {violations} of {} relations VIOLATED",
            chain.relations.len()
        )
    });
    let lines = [
        (
            "avg leakage",
            ExtRational::Finite(chain.mult_leakage.clone()),
            Scale::Ratio,
        ),
        (
            "max-case leakage",
            ExtRational::Finite(chain.max_case_leakage.clone()),
            Scale::Ratio,
        ),
        (
            "lift",
            ExtRational::Finite(chain.lift.clone()),
            Scale::Ratio,
        ),
        (
            "Bayes capacity",
            ExtRational::Finite(chain.bayes_capacity.clone()),
            Scale::Ratio,
        ),
        ("lift capacity", chain.lift_capacity.clone(), Scale::Factor),
    ];
    for (name, v, scale) in &lines {
        r.notes.push(format!("{name}: {}", value_text(v, *scale)));
    }
    for rel in &chain.relations {
        r.notes.push(rel.to_string());
    }
    let values: Map<String, Value> = lines
        .iter()
        .map(|(k, v, _)| (k.to_string(), value_json(v)))
        .collect();
    let relations: Vec<Value> = chain
        .relations
        .iter()
        .map(|rel| {
            json!({
                "name": rel.name,
                "lhs": value_json(&rel.lhs),
                "rhs": value_json(&rel.rhs),
                "equality": rel.equality,
                "holds": rel.holds,
            })
        })
        .collect();
    r.extra.insert("values".into(), Value::Object(values));
    r.extra.insert("relations".into(), Value::Array(relations));
    r.extra.insert("holds".into(), Value::Bool(holds));
    Ok(r)
}

fn capacity(a: &CapacityArgs) -> Result<String, CliError> {
    let c = load_channel(&a.channel)?;
    let mut report = match a.kind {
        CapacityKind::Lift => {
            let r = lift_capacity_report(&c);
            Report {
                witness: r.witness,
                ..Report::new("lift-capacity", r.value, Scale::Factor)
            }
        }
        CapacityKind::Bayes => Report::new("bayes-capacity", bayes_capacity(&c), Scale::Factor),
    };
    report.inputs = vec![("channel", a.channel.display().to_string())];
    Ok(render(&report, a.format))
}

fn channel_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

const COMPARE_COLUMNS: [&str; 4] = [
    "avg-leakage",
    "max-case-leakage",
    "bayes-capacity",
    "lift-capacity",
];

fn compare(a: &CompareArgs) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for path in &a.channel {
        let c = load_channel(path)?;
        let pi = load_prior(&a.prior, c.secrets())?;
        let g = load_gain(&a.gain, c.secrets(), Some(&pi))?;
        let values = [
            (
                ExtRational::Finite(mult_leakage(&g, &pi, &c)?),
                Scale::Ratio,
            ),
            (
                ExtRational::Finite(max_case_leakage(&g, &pi, &c)?),
                Scale::Ratio,
            ),
            (ExtRational::Finite(bayes_capacity(&c)), Scale::Ratio),
            (lift_capacity(&c), Scale::Factor),
        ];
        rows.push((path, values));
    }
    match a.format {
        Format::Text => {
            let mut cells = vec![std::iter::once("channel")
                .chain(COMPARE_COLUMNS)
                .map(String::from)
                .collect::<Vec<_>>()];
            for (path, values) in &rows {
                cells.push(
                    std::iter::once(channel_name(path))
                        .chain(values.iter().map(|(v, s)| value_text(v, *s)))
                        .collect(),
                );
            }
            Ok(report::table(&cells))
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(path, values)| {
                    let mut obj = Map::new();
                    obj.insert("channel".into(), Value::String(channel_name(path)));
                    obj.insert("path".into(), Value::String(path.display().to_string()));
                    for (k, (v, _)) in COMPARE_COLUMNS.iter().zip(values) {
                        obj.insert(k.to_string(), value_json(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            let inputs = inputs_json(&[("prior", a.prior.describe()), ("gain", a.gain.describe())]);
            Ok(json_text(
                &json!({ "measure": "compare", "inputs": inputs, "rows": rows }),
            ))
        }
    }
}

fn verify(v: &VerifyCommand) -> Result<(String, bool), CliError> {
    match v {
        VerifyCommand::Ldp {
            channel,
            factor,
            format,
        } => {
            let c = load_channel(channel)?;
            let k = parse_factor(factor)?;
            let holds = verify_ldp(&c, &k)?;
            let cap = lift_capacity_report(&c);
            let verdict = if holds { "holds" } else { "fails" };
            let mut r = Report {
                witness: cap.witness,
                ..Report::new("verify-ldp", cap.value.clone(), Scale::Factor)
            };
            r.inputs = vec![
                ("channel", channel.display().to_string()),
                ("factor", k.to_string()),
            ];
            r.extra.insert("holds".into(), Value::Bool(holds));
            r.extra.insert("factor".into(), value_json(&k));
            let out = match format {
                Format::Text => format!(
                    "ldp {}: {verdict}\nlift capacity {}",
                    value_text(&k, Scale::Factor),
                    r.text()
                ),
                Format::Json => json_text(&r.json()),
            };
            Ok((out, holds))
        }
        VerifyCommand::Lip {
            channel,
            prior,
            factor,
            format,
        } => {
            let c = load_channel(channel)?;
            let pi = load_prior(prior, c.secrets())?;
            let k = match parse_factor(factor)? {
                ExtRational::Finite(k) => k,
                ExtRational::Infinite => {
                    return Err(CliError::Request("the LIP factor must be finite".into()))
                }
            };
            let holds = verify_lip(&pi, &c, &k)?;
            let l = lift(&pi, &c)?;
            let verdict = if holds { "holds" } else { "fails" };
            let k = ExtRational::Finite(k);
            let mut r = Report {
                witness: l.witness,
                ..Report::new("verify-lip", l.value.clone(), Scale::Ratio)
            };
            r.inputs = vec![
                ("channel", channel.display().to_string()),
                ("prior", prior.describe()),
                ("factor", k.to_string()),
            ];
            r.extra.insert("holds".into(), Value::Bool(holds));
            r.extra.insert("factor".into(), value_json(&k));
            let out = match format {
                Format::Text => format!(
                    "lip {}: {verdict}\nlift {}",
                    value_text(&k, Scale::Factor),
                    r.text()
                ),
                Format::Json => json_text(&r.json()),
            };
            Ok((out, holds))
        }
    }
}

fn dalenius(a: &DaleniusArgs) -> Result<(String, bool), CliError> {
    let j = Correlation::new(load(&a.joint, formats::parse_joint_csv)?);
    let c = load_channel(&a.channel)?;
    let l = dalenius_lift(&j, &c)?;
    let (rho, _) = j.factors();
    let cap = if rho.full_support() {
        let g = load_gain(&a.gain, j.z_labels(), Some(rho))?;
        Some(dalenius_capacity_bound(&j, &c, &g)?)
    } else {
        None
    };
    let holds = l.holds && cap.as_ref().is_none_or(|b| b.holds);
    let fin = |r: &Rational| ExtRational::Finite(r.clone());
    let verdict = |h: bool| if h { "holds" } else { "VIOLATED" };
    match a.format {
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "Lift(rho, DC) = {}\n",
                value_text(&fin(&l.lhs), Scale::Ratio)
            ));
            out.push_str(&format!(
                "Lift(rho, D)  = {}\n",
                value_text(&fin(&l.lift_correlation), Scale::Ratio)
            ));
            out.push_str(&format!(
                "Lift(pi, C)   = {}\n",
                value_text(&fin(&l.lift_channel), Scale::Ratio)
            ));
            out.push_str(&format!(
                "Lift(rho, DC) <= {}: {}\n",
                l.bound,
                verdict(l.holds)
            ));
            match &cap {
                Some(b) => {
                    out.push_str(&format!(
                        "MaxLeak(rho, DC) = {}\n",
                        value_text(&fin(&b.leak), Scale::Ratio)
                    ));
                    out.push_str(&format!(
                        "MaxLift(DC) = {}\n",
                        value_text(&b.cap_dc, Scale::Factor)
                    ));
                    out.push_str(&format!(
                        "MaxLift(C)  = {}\n",
                        value_text(&b.cap_c, Scale::Factor)
                    ));
                    out.push_str(&format!(
                        "MaxLeak(rho, DC) <= MaxLift(DC) <= MaxLift(C): {}\n",
                        verdict(b.holds)
                    ));
                }
                None => out.push_str(
                    "capacity bound skipped: the correlated secret has zero-mass values\n",
                ),
            }
            Ok((out, holds))
        }
        Format::Json => {
            let pushforward: Map<String, Value> = l
                .pushforward
                .iter()
                .map(|(x, m)| (x.to_string(), Value::String(m.to_string())))
                .collect();
            let capacity = cap.as_ref().map_or(Value::Null, |b| {
                json!({
                    "max_case_leakage": value_json(&fin(&b.leak)),
                    "lift_capacity_dc": value_json(&b.cap_dc),
                    "lift_capacity_c": value_json(&b.cap_c),
                    "holds": b.holds,
                })
            });
            let v = json!({
                "measure": "dalenius",
                "lift": {
                    "lhs": value_json(&fin(&l.lhs)),
                    "lift_correlation": value_json(&fin(&l.lift_correlation)),
                    "lift_channel": value_json(&fin(&l.lift_channel)),
                    "bound": value_json(&fin(&l.bound)),
                    "pushforward": pushforward,
                    "holds": l.holds,
                },
                "capacity": capacity,
                "holds": holds,
                "inputs": inputs_json(&[
                    ("joint", a.joint.display().to_string()),
                    ("channel", a.channel.display().to_string()),
                    ("gain", a.gain.describe()),
                ]),
            });
            Ok((json_text(&v), holds))
        }
    }
}

fn parse_seed(text: &str) -> Result<u64, CliError> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Request(format!("QIF_SEED {text:?} is not a 64-bit integer")))
}

fn fuzz(a: &FuzzArgs, seed_env: Option<&str>) -> Result<(String, bool), CliError> {
    let seed = match seed_env {
        Some(s) => parse_seed(s)?,
        None => a.seed.unwrap_or(InstanceSpec::default().seed),
    };
    let spec = InstanceSpec {
        max_secrets: a.max_secrets,
        max_observations: a.max_observations,
        max_actions: a.max_actions,
        denominator_bound: a.denominator_bound,
        trials: a.trials,
        seed,
    };
    let subject = match a.mutant {
        None => Subject::reference(),
        Some(Mutant::BrokenLift) => mutants::broken_lift_subject(),
    };
    let results = run_registry_with(&spec, &subject)?;
    let passed = results.iter().all(|r| r.passed);
    let out = match a.format {
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                out.push_str(&r.to_string());
                out.push('\n');
                if let Some(f) = &r.failure {
                    for line in f.shrunk.to_string().lines() {
                        out.push_str("    ");
                        out.push_str(line);
                        out.push('\n');
                    }
                }
            }
            let n = results.iter().filter(|r| r.passed).count();
            out.push_str(&format!(
                "{n}/{} properties passed ({} trials each, seed {seed}, subject {})\n",
                results.len(),
                spec.trials,
                subject.name
            ));
            out
        }
        Format::Json => json_text(&json!({
            "seed": seed,
            "trials": spec.trials,
            "subject": subject.name,
            "passed": passed,
            "properties": results.iter().map(result_json).collect::<Vec<_>>(),
        })),
    };
    Ok((out, passed))
}

fn result_json(r: &CheckResult) -> Value {
    let failure = r.failure.as_ref().map_or(Value::Null, |f| {
        let (n, m) = f.shrunk.channel_dims();
        json!({
            "trial": f.trial_index,
            "relation": f.violation.relation,
            "lhs": f.violation.lhs,
            "rhs": f.violation.rhs,
            "shrink_steps": f.shrink_steps,
            "shrunk_dims": [n, m],
            "shrunk": {
                "prior": formats::write_prior_csv(&f.shrunk.prior),
                "channel": formats::write_channel_csv(&f.shrunk.channel),
                "gain": formats::write_gain_csv(&f.shrunk.gain),
            },
        })
    });
    json!({
        "name": r.property,
        "trials": r.trials,
        "passed": r.passed,
        "failure": failure,
    })
}
