//! Run configuration from command-line flags and `key=value` files.
//!
//! Files use the flag names without the leading dashes as keys, one
//! `key=value` per line, with `#` starting a comment line. Flags given on
//! the command line override entries read from `--config`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::Parser;
use fracheat::{EvolutionConfig, InitialCondition, Scheme};

use crate::error::{CliError, CliResult};

pub const DEFAULT_N: usize = 100;
pub const DEFAULT_N_LIST: [usize; 4] = [50, 100, 200, 400];
pub const DEFAULT_T_FINAL: f64 = 0.01;
pub const DEFAULT_MU: f64 = 0.4;
pub const DEFAULT_SIGMA2: f64 = 0.0005;

/// Keys accepted in config files, in render order.
pub const KEYS: [&str; 12] =
    ["command", "alpha", "n", "n-list", "dt", "t-final", "scheme", "ic", "mu", "sigma2", "out", "format"];

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = CliError;

            fn from_str(s: &str) -> CliResult<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => {
                        let choices: Vec<&str> = Self::ALL.iter().map(|v| v.as_str()).collect();
                        Err(CliError::usage(format!(
                            "unknown {} '{other}' (expected one of {})",
                            stringify!($name).to_lowercase(),
                            choices.join(", ")
                        )))
                    }
                }
            }
        }
    };
}

keyword_enum!(Command {
    Weights => "weights",
    Eigen => "eigen",
    Solve => "solve",
    Converge => "converge",
    Compare => "compare",
});

keyword_enum!(IcKind {
    Gaussian => "gaussian",
    Eigen => "eigen",
    Power => "power",
});

keyword_enum!(Format {
    Csv => "csv",
    Json => "json",
});

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub n: usize,
    pub n_list: Vec<usize>,
    /// Time step; `h^α` of the grid in use when absent.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub scheme: Scheme,
    pub ic: IcKind,
    pub mu: f64,
    pub sigma2: f64,
    /// Output file; standard output when absent.
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Result of argument parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Run(RunConfig),
    /// Help or version text to print.
    Info(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "fracheat",
    version,
    about = "Finite-difference solvers for the skewed fractional heat equation on (0,1)"
)]
struct Args {
    /// weights, eigen, solve, converge or compare
    command: Option<String>,
    /// key=value file; flags override its entries
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Order of the derivative, in (1, 2]
    #[arg(long)]
    alpha: Option<String>,
    /// Interior grid points (weights: highest weight index)
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated refinement levels
    #[arg(long = "n-list", value_name = "LIST")]
    n_list: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// new or grunwald
    #[arg(long)]
    scheme: Option<String>,
    /// gaussian, eigen or power
    #[arg(long)]
    ic: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

impl Args {
    fn flag_pairs(self) -> Vec<(&'static str, String)> {
        let flags = [
            ("command", self.command),
            ("alpha", self.alpha),
            ("n", self.n),
            ("n-list", self.n_list),
            ("dt", self.dt),
            ("t-final", self.t_final),
            ("scheme", self.scheme),
            ("ic", self.ic),
            ("mu", self.mu),
            ("sigma2", self.sigma2),
            ("out", self.out),
            ("format", self.format),
        ];
        flags.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

/// Parses `argv` (program name first), reading `--config` if given.
pub fn parse_args<I, T>(argv: I) -> CliResult<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Invocation::Info(e.to_string())),
                _ => Err(CliError::usage(e.to_string().trim_end())),
            }
        }
    };
    let mut pairs = match &args.config {
        Some(path) => parse_pairs(&read_config(path)?)?,
        None => BTreeMap::new(),
    };
    for (key, value) in args.flag_pairs() {
        pairs.insert(key.to_string(), value);
    }
    RunConfig::from_pairs(&pairs).map(Invocation::Run)
}

fn read_config(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Splits config text into key/value pairs, rejecting unknown or repeated keys.
pub fn parse_pairs(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("line {}: expected key=value, got '{line}'", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::usage(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        if pairs.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("line {}: key '{key}' given twice", lineno + 1)));
        }
    }
    Ok(pairs)
}

fn parse_real(key: &str, value: &str) -> CliResult<f64> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::usage(format!("invalid number '{value}' for {key}"))),
    }
}

fn parse_count(key: &str, value: &str) -> CliResult<usize> {
    let n =
        value.trim().parse::<usize>().map_err(|_| CliError::usage(format!("invalid integer '{value}' for {key}")))?;
    if n < 3 {
        return Err(CliError::usage(format!("{key} must be at least 3, got {n}")));
    }
    Ok(n)
}

impl RunConfig {
    /// Builds and validates a configuration from key/value pairs.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> CliResult<Self> {
        if let Some(key) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::usage(format!("unknown key '{key}'")));
        }
        let get = |key: &str| pairs.get(key).map(String::as_str);

        let command: Command = get("command").ok_or_else(|| CliError::usage("missing command"))?.parse()?;
        let alpha = parse_real("alpha", get("alpha").ok_or_else(|| CliError::usage("missing --alpha"))?)?;
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(CliError::usage(format!("alpha = {alpha} is outside (1, 2]")));
        }
        let n = get("n").map(|v| parse_count("n", v)).transpose()?.unwrap_or(DEFAULT_N);
        let n_list = match get("n-list") {
            Some(v) => v.split(',').map(|item| parse_count("n-list", item)).collect::<CliResult<Vec<_>>>()?,
            None => DEFAULT_N_LIST.to_vec(),
        };
        let dt = get("dt").map(|v| parse_real("dt", v)).transpose()?;
        if let Some(dt) = dt {
            if dt <= 0.0 {
                return Err(CliError::usage(format!("dt must be positive, got {dt}")));
            }
        }
        let t_final = get("t-final").map(|v| parse_real("t-final", v)).transpose()?.unwrap_or(DEFAULT_T_FINAL);
        if t_final < 0.0 {
            return Err(CliError::usage(format!("t-final must be >= 0, got {t_final}")));
        }
        let scheme = match get("scheme") {
            Some(v) => v.parse::<Scheme>().map_err(|e| CliError::usage(e.to_string()))?,
            None => Scheme::New,
        };
        let ic = get("ic").map(str::parse).transpose()?.unwrap_or(IcKind::Gaussian);
        let mu = get("mu").map(|v| parse_real("mu", v)).transpose()?.unwrap_or(DEFAULT_MU);
        let sigma2 = get("sigma2").map(|v| parse_real("sigma2", v)).transpose()?.unwrap_or(DEFAULT_SIGMA2);
        if sigma2 <= 0.0 {
            return Err(CliError::usage(format!("sigma2 must be positive, got {sigma2}")));
        }
        let out = match get("out") {
            Some("") => return Err(CliError::usage("empty output path")),
            Some(v) => Some(PathBuf::from(v)),
            None => None,
        };
        let format = get("format").map(str::parse).transpose()?.unwrap_or(Format::Csv);

        let cfg = Self { command, alpha, n, n_list, dt, t_final, scheme, ic, mu, sigma2, out, format };
        if cfg.command == Command::Solve {
            cfg.evolution_config().validate().map_err(|e| CliError::usage(e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Parses config file text on its own.
    pub fn from_text(text: &str) -> CliResult<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    /// All settings as `(key, value)` pairs, optional ones only when set.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut pairs = vec![
            ("command", self.command.to_string()),
            ("alpha", fmt_real(self.alpha)),
            ("n", self.n.to_string()),
            ("n-list", self.n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
        ];
        if let Some(dt) = self.dt {
            pairs.push(("dt", fmt_real(dt)));
        }
        pairs.extend([
            ("t-final", fmt_real(self.t_final)),
            ("scheme", self.scheme.to_string()),
            ("ic", self.ic.to_string()),
            ("mu", fmt_real(self.mu)),
            ("sigma2", fmt_real(self.sigma2)),
        ]);
        if let Some(out) = &self.out {
            pairs.push(("out", out.display().to_string()));
        }
        pairs.push(("format", self.format.to_string()));
        pairs
    }

    /// Config file text that parses back to `self`.
    pub fn render(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Settings that determine the numbers in the output.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        self.pairs().into_iter().filter(|(k, _)| !matches!(*k, "out" | "format")).collect()
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self.ic {
            IcKind::Gaussian => InitialCondition::Gaussian { mu: self.mu, sigma2: self.sigma2 },
            IcKind::Eigen => InitialCondition::Eigenfunction,
            IcKind::Power => InitialCondition::PowerLaw { a: 1.0, b: -1.0 },
        }
    }

    /// Single-grid run described by `n`, `dt`, `t-final`, `scheme` and `ic`.
    pub fn evolution_config(&self) -> EvolutionConfig {
        let cfg = EvolutionConfig::new(self.alpha, self.n, self.t_final, self.scheme, self.initial_condition());
        match self.dt {
            Some(dt) => cfg.with_dt(dt),
            None => cfg,
        }
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliResult<RunConfig> {
        let argv = std::iter::once("fracheat").chain(args.iter().copied());
        match parse_args(argv)? {
            Invocation::Run(cfg) => Ok(cfg),
            Invocation::Info(text) => panic!("unexpected info output {text}"),
        }
    }

    #[test]
    fn defaults() {
        let cfg = run(&["solve", "--alpha", "1.5"]).unwrap();
        assert_eq!(cfg.n, 100);
        assert_eq!(cfg.n_list, vec![50, 100, 200, 400]);
        assert_eq!(cfg.dt, None);
        assert_eq!(cfg.t_final, 0.01);
        assert_eq!(cfg.scheme, Scheme::New);
        assert_eq!(cfg.ic, IcKind::Gaussian);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.evolution_config().dt, (1.0f64 / 101.0).powf(1.5));
    }

    #[test]
    fn gaussian_comparison_configuration() {
        let cfg = run(&[
            "converge",
            "--alpha",
            "1.4",
            "--n-list",
            "50,100,200,400",
            "--ic",
            "gaussian",
            "--sigma2",
            "0.0005",
            "--mu",
            "0.4",
        ])
        .unwrap();
        assert_eq!(cfg.command, Command::Converge);
        assert_eq!(cfg.alpha, 1.4);
        assert_eq!(cfg.n_list, vec![50, 100, 200, 400]);
        assert_eq!(cfg.initial_condition(), InitialCondition::Gaussian { mu: 0.4, sigma2: 0.0005 });
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["weights", "--alpha", "2.5"][..],
            &["weights", "--alpha", "1.0"],
            &["weights", "--alpha", "abc"],
            &["weights", "--alpha", "NaN"],
            &["weights"],
            &["--alpha", "1.5"],
            &["plot", "--alpha", "1.5"],
            &["weights", "--alpha", "1.5", "--bogus", "1"],
            &["weights", "--alpha", "1.5", "--n", "2"],
            &["converge", "--alpha", "1.5", "--n-list", "50,,100"],
            &["solve", "--alpha", "1.5", "--dt", "0"],
            &["solve", "--alpha", "1.5", "--dt", "0.5", "--t-final", "0.1"],
            &["solve", "--alpha", "1.5", "--scheme", "crank"],
            &["solve", "--alpha", "1.5", "--ic", "delta"],
            &["solve", "--alpha", "1.5", "--sigma2", "-1"],
            &["solve", "--alpha", "1.5", "--format", "xml"],
        ] {
            let err = run(args).unwrap_err();
            assert!(matches!(err, CliError::Usage(_)), "{args:?}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn help_is_informational() {
        let out = parse_args(["fracheat", "--help"]).unwrap();
        assert!(matches!(out, Invocation::Info(text) if text.contains("--n-list")));
    }

    #[test]
    fn file_entries_are_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# study\ncommand=converge\nalpha = 1.3\nn-list=20,40\n\nscheme=grunwald\n").unwrap();
        let cfg = run(&["--config", path.to_str().unwrap(), "--alpha", "1.7"]).unwrap();
        assert_eq!(cfg.command, Command::Converge);
        assert_eq!(cfg.alpha, 1.7);
        assert_eq!(cfg.n_list, vec![20, 40]);
        assert_eq!(cfg.scheme, Scheme::Grunwald);

        let cfg = run(&["compare", "--config", path.to_str().unwrap()]).unwrap();
        assert_eq!(cfg.command, Command::Compare);
    }

    #[test]
    fn bad_config_files() {
        assert!(matches!(parse_pairs("alpha=1.5\nwidth=3\n"), Err(CliError::Usage(_))));
        assert!(matches!(parse_pairs("alpha=1.5\nalpha=1.6\n"), Err(CliError::Usage(_))));
        assert!(matches!(parse_pairs("alpha 1.5\n"), Err(CliError::Usage(_))));
        let err = run(&["weights", "--alpha", "1.5", "--config", "/nonexistent/run.cfg"]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn render_lists_set_keys_in_order() {
        let mut cfg = run(&["weights", "--alpha", "2", "--n", "8"]).unwrap();
        assert_eq!(
            cfg.render(),
            "command=weights\nalpha=2.0\nn=8\nn-list=50,100,200,400\nt-final=0.01\nscheme=new\nic=gaussian\n\
             mu=0.4\nsigma2=0.0005\nformat=csv\n"
        );
        cfg.out = Some("w.csv".into());
        cfg.dt = Some(1e-3);
        assert!(cfg.render().contains("dt=0.001\n"));
        assert!(cfg.render().contains("out=w.csv\n"));
        assert!(!cfg.echo().iter().any(|(k, _)| *k == "out" || *k == "format"));
    }
}
