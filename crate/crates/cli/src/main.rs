//! `vdelta`: bound tables and verification reports for weighted integral
//! transforms of analytic functions on the unit disk.

mod commands;
mod output;
mod parallel;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use commands::{
    cmd_bound, cmd_selftest, cmd_verify_hohlov, cmd_verify_identity, cmd_verify_membership,
    cmd_verify_sharpness, BoundConfig, HohlovConfig, IdentityConfig, MembershipConfig,
    SharpnessConfig, MEMBERSHIP_ORDER,
};
use output::Format;

#[derive(Parser)]
#[command(
    name = "vdelta",
    version,
    about = "Sharp bounds and verification for weighted integral transforms on the unit disk"
)]
struct Cli {
    /// Flat key=value file supplying defaults for any long option
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a table of sharp bounds over a parameter grid
    Bound(BoundArgs),
    /// Run verification checks (machine-readable pass/fail)
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Run the deterministic golden-value suite
    Selftest,
}

#[derive(Args, Default)]
struct BoundArgs {
    /// Which bound: 1 (class functional), 2 (convexity-type), 3 (kernel operator)
    #[arg(long)]
    thm: Option<u8>,
    /// Comma-separated list of alpha values
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Comma-separated list of gamma values
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Comma-separated list of delta values
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Comma-separated list of target values xi
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    /// Weight descriptor, e.g. bernardi:c=1, hohlov:a=1,b=1,c=2,
    /// carlson-shaffer:b=1,c=2, custom:path=FILE
    #[arg(long)]
    weight: Option<String>,
    /// quadrature (default) or closed (Bernardi weights only)
    #[arg(long)]
    method: Option<String>,
    /// Kernel parameter a (thm 3)
    #[arg(long)]
    kernel_a: Option<f64>,
    /// Kernel parameter b (thm 3)
    #[arg(long, allow_hyphen_values = true)]
    kernel_b: Option<f64>,
    /// Kernel parameter c (thm 3)
    #[arg(long)]
    kernel_c: Option<f64>,
    /// First factor's half-plane level beta1 (thm 3)
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check that the computed bound is attained by the extremal function
    Sharpness(SharpnessArgs),
    /// Check the coefficient identity of the transform against moments
    Identity(IdentityArgs),
    /// Grid membership test of a function in a class at a given level
    Membership(MembershipArgs),
    /// Kernel-operator positivity and duality-combination check
    Hohlov(HohlovArgs),
}

#[derive(Args, Default)]
struct SharpnessArgs {
    #[arg(long)]
    thm: Option<u8>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    #[arg(long)]
    weight: Option<String>,
}

#[derive(Args, Default)]
struct IdentityArgs {
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Degree of the random test series
    #[arg(long)]
    order: Option<usize>,
    /// Number of random trials
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum allowed relative coefficient deviation
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Default)]
struct MembershipArgs {
    /// Test function: identity or extremal
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Class level beta to test membership at
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Default)]
struct HohlovArgs {
    #[arg(long)]
    kernel_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kernel_b: Option<f64>,
    #[arg(long)]
    kernel_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

/// Flat key=value defaults: one `key=value` per line, `#` comments allowed.
/// Keys match the long option names (with `-` or `_`); command-line flags
/// take precedence.
fn load_config(path: &PathBuf) -> Result<HashMap<String, String>, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

struct ConfigSource {
    map: HashMap<String, String>,
    used: std::cell::RefCell<std::collections::HashSet<String>>,
}

impl ConfigSource {
    fn new(map: HashMap<String, String>) -> Self {
        ConfigSource {
            map,
            used: Default::default(),
        }
    }

    fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<(), String>
    where
        T::Err: std::fmt::Display,
    {
        self.used.borrow_mut().insert(key.to_string());
        if slot.is_none() {
            if let Some(raw) = self.map.get(key) {
                *slot = Some(raw.parse::<T>().map_err(|e| format!("config `{key}`: {e}"))?);
            }
        }
        Ok(())
    }

    fn fill_list(&self, slot: &mut Option<Vec<f64>>, key: &str) -> Result<(), String> {
        self.used.borrow_mut().insert(key.to_string());
        if slot.is_none() {
            if let Some(raw) = self.map.get(key) {
                let list: Result<Vec<f64>, _> =
                    raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
                *slot = Some(list.map_err(|e| format!("config `{key}`: {e}"))?);
            }
        }
        Ok(())
    }

    fn finish(&self) -> Result<(), String> {
        let used = self.used.borrow();
        for key in self.map.keys() {
            if !used.contains(key) {
                return Err(format!("config key `{key}` is not used by this command"));
            }
        }
        Ok(())
    }
}

fn list_or(v: Option<Vec<f64>>, default: f64) -> Result<Vec<f64>, String> {
    match v {
        Some(list) if list.is_empty() => Err("parameter list must be non-empty".into()),
        Some(list) => Ok(list),
        None => Ok(vec![default]),
    }
}

fn fmt_list(name: &str, v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("{name}={}", items.join(","))
}

fn run(cli: Cli) -> Result<(String, bool), String> {
    let src = ConfigSource::new(match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    });
    let mut format = cli.format;
    {
        // `format` is global, so allow it from the file as well
        let mut raw: Option<String> = None;
        src.fill(&mut raw, "format")?;
        if format.is_none() {
            format = match raw.as_deref() {
                Some("json") => Some(Format::Json),
                Some("csv") => Some(Format::Csv),
                Some("text") | None => None,
                Some(other) => return Err(format!("config `format`: unknown value `{other}`")),
            };
        }
    }
    let format = format.unwrap_or(Format::Text);

    let (table, all_pass) = match cli.command {
        Command::Bound(mut a) => {
            src.fill(&mut a.thm, "thm")?;
            src.fill_list(&mut a.alpha, "alpha")?;
            src.fill_list(&mut a.gamma, "gamma")?;
            src.fill_list(&mut a.delta, "delta")?;
            src.fill_list(&mut a.xi, "xi")?;
            src.fill(&mut a.weight, "weight")?;
            src.fill(&mut a.method, "method")?;
            src.fill(&mut a.kernel_a, "kernel_a")?;
            src.fill(&mut a.kernel_b, "kernel_b")?;
            src.fill(&mut a.kernel_c, "kernel_c")?;
            src.fill(&mut a.beta1, "beta1")?;
            src.finish()?;
            let cfg = BoundConfig {
                thm: a.thm.ok_or("--thm is required for bound")?,
                alpha: list_or(a.alpha, 1.0)?,
                gamma: list_or(a.gamma, 0.0)?,
                delta: list_or(a.delta, 1.0)?,
                xi: list_or(a.xi, 0.0)?,
                weight: a.weight.unwrap_or_else(|| "bernardi:c=0".into()),
                method: a.method.unwrap_or_else(|| "quadrature".into()),
                kernel_a: a.kernel_a.unwrap_or(1.0),
                kernel_b: a.kernel_b.unwrap_or(1.0),
                kernel_c: a.kernel_c.unwrap_or(2.0),
                beta1: a.beta1.unwrap_or(0.0),
            };
            let label = format!(
                "cmd=bound thm={} weight={} method={} {} {} {} {}",
                cfg.thm,
                cfg.weight,
                cfg.method,
                fmt_list("alpha", &cfg.alpha),
                fmt_list("gamma", &cfg.gamma),
                fmt_list("delta", &cfg.delta),
                fmt_list("xi", &cfg.xi),
            );
            cmd_bound(&cfg, label)?
        }
        Command::Verify { what } => match what {
            VerifyCmd::Sharpness(mut a) => {
                src.fill(&mut a.thm, "thm")?;
                src.fill_list(&mut a.alpha, "alpha")?;
                src.fill_list(&mut a.gamma, "gamma")?;
                src.fill_list(&mut a.delta, "delta")?;
                src.fill_list(&mut a.xi, "xi")?;
                src.fill(&mut a.weight, "weight")?;
                src.finish()?;
                let cfg = SharpnessConfig {
                    thm: a.thm.ok_or("--thm is required for verify sharpness")?,
                    alpha: list_or(a.alpha, 1.0)?,
                    gamma: list_or(a.gamma, 0.0)?,
                    delta: list_or(a.delta, 1.0)?,
                    xi: list_or(a.xi, 0.0)?,
                    weight: a.weight.unwrap_or_else(|| "bernardi:c=0".into()),
                };
                let label = format!(
                    "cmd=verify-sharpness thm={} weight={} {} {} {} {}",
                    cfg.thm,
                    cfg.weight,
                    fmt_list("alpha", &cfg.alpha),
                    fmt_list("gamma", &cfg.gamma),
                    fmt_list("delta", &cfg.delta),
                    fmt_list("xi", &cfg.xi),
                );
                cmd_verify_sharpness(&cfg, label)?
            }
            VerifyCmd::Identity(mut a) => {
                src.fill(&mut a.weight, "weight")?;
                src.fill(&mut a.delta, "delta")?;
                src.fill(&mut a.order, "order")?;
                src.fill(&mut a.count, "count")?;
                src.fill(&mut a.seed, "seed")?;
                src.fill(&mut a.tol, "tol")?;
                src.finish()?;
                let cfg = IdentityConfig {
                    weight: a.weight.unwrap_or_else(|| "bernardi:c=0".into()),
                    delta: a.delta.unwrap_or(1.0),
                    order: a.order.unwrap_or(32),
                    count: a.count.unwrap_or(100),
                    seed: a.seed.unwrap_or(20240801),
                    tol: a.tol.unwrap_or(1e-10),
                };
                let label = format!(
                    "cmd=verify-identity weight={} delta={} order={} count={} seed={} tol={}",
                    cfg.weight, cfg.delta, cfg.order, cfg.count, cfg.seed, cfg.tol
                );
                cmd_verify_identity(&cfg, label)?
            }
            VerifyCmd::Membership(mut a) => {
                src.fill(&mut a.f, "f")?;
                src.fill(&mut a.alpha, "alpha")?;
                src.fill(&mut a.gamma, "gamma")?;
                src.fill(&mut a.delta, "delta")?;
                src.fill(&mut a.beta, "beta")?;
                src.fill(&mut a.order, "order")?;
                src.finish()?;
                let cfg = MembershipConfig {
                    f: a.f.unwrap_or_else(|| "identity".into()),
                    alpha: a.alpha.unwrap_or(1.0),
                    gamma: a.gamma.unwrap_or(0.0),
                    delta: a.delta.unwrap_or(1.0),
                    beta: a.beta.unwrap_or(0.0),
                    order: a.order.unwrap_or(MEMBERSHIP_ORDER),
                };
                let label = format!(
                    "cmd=verify-membership f={} alpha={} gamma={} delta={} beta={} order={}",
                    cfg.f, cfg.alpha, cfg.gamma, cfg.delta, cfg.beta, cfg.order
                );
                cmd_verify_membership(&cfg, label)?
            }
            VerifyCmd::Hohlov(mut a) => {
                src.fill(&mut a.kernel_a, "kernel_a")?;
                src.fill(&mut a.kernel_b, "kernel_b")?;
                src.fill(&mut a.kernel_c, "kernel_c")?;
                src.fill(&mut a.beta1, "beta1")?;
                src.fill(&mut a.alpha, "alpha")?;
                src.fill(&mut a.gamma, "gamma")?;
                src.fill(&mut a.delta, "delta")?;
                src.finish()?;
                let cfg = HohlovConfig {
                    kernel_a: a.kernel_a.ok_or("--kernel-a is required")?,
                    kernel_b: a.kernel_b.ok_or("--kernel-b is required")?,
                    kernel_c: a.kernel_c.ok_or("--kernel-c is required")?,
                    beta1: a.beta1.unwrap_or(0.0),
                    alpha: a.alpha.unwrap_or(1.0),
                    gamma: a.gamma.unwrap_or(0.0),
                    delta: a.delta.unwrap_or(1.0),
                };
                let label = format!(
                    "cmd=verify-hohlov kernel_a={} kernel_b={} kernel_c={} beta1={} \
                     alpha={} gamma={} delta={}",
                    cfg.kernel_a,
                    cfg.kernel_b,
                    cfg.kernel_c,
                    cfg.beta1,
                    cfg.alpha,
                    cfg.gamma,
                    cfg.delta
                );
                cmd_verify_hohlov(&cfg, label)?
            }
        },
        Command::Selftest => {
            src.finish()?;
            cmd_selftest("cmd=selftest".into())
        }
    };
    Ok((table.render(format), all_pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((rendered, all_pass)) => {
            print!("{rendered}");
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
