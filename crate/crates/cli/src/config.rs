//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags, each layer overriding the previous one.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use sigplex::{Coherence, Config, Penalty, Synth};

use crate::error::{CliError, CliResult};

/// Every recognised setting, in the order used when writing a config file.
pub const KEYS: [&str; 19] = [
    "n",
    "c",
    "sigma",
    "sigma-start",
    "h",
    "dt",
    "horizon",
    "seed",
    "order",
    "lambda-ratio",
    "r2-threshold",
    "k-max",
    "n-tries",
    "subset-len",
    "tau",
    "runs",
    "coherence",
    "threads",
    "out",
];

/// Number of grid times drawn per try.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubsetLen {
    /// Fraction of the grid, rounded, at least 4 points.
    Fraction(f64),
    Count(usize),
}

impl SubsetLen {
    pub fn resolve(self, grid_len: usize) -> usize {
        match self {
            Self::Fraction(f) => ((grid_len as f64 * f).round() as usize).clamp(4.min(grid_len), grid_len),
            Self::Count(l) => l,
        }
    }
}

impl fmt::Display for SubsetLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fraction(x) => write!(f, "{x:?}"),
            Self::Count(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Generator parameters; `synth.seed` is the master seed of every command.
    pub synth: Synth,
    pub inference: Config,
    pub lambda_ratio: f64,
    pub n_tries: usize,
    pub subset_len: SubsetLen,
    pub tau: f64,
    pub runs: usize,
    /// Worker threads; `None` lets the pool pick.
    pub threads: Option<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lambda_ratio = 0.1;
        Self {
            synth: Synth::default(),
            inference: Config { penalty: Penalty::RatioOfMax(lambda_ratio), ..Config::default() },
            lambda_ratio,
            n_tries: 50,
            subset_len: SubsetLen::Fraction(0.6),
            tau: 0.5,
            runs: 20,
            threads: None,
            out: PathBuf::from("."),
        }
    }
}

fn parse<T: std::str::FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("`{value}`: {e}"))
}

impl RunConfig {
    /// Apply one setting. Keys accept `-` or `_` as separator.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "n" => self.synth.n = parse(value)?,
            "c" => self.synth.c = parse(value)?,
            "sigma" => self.synth.sigma = parse(value)?,
            "sigma-start" => self.synth.sigma_start = parse(value)?,
            "h" => self.synth.h = parse(value)?,
            "dt" => self.synth.dt = parse(value)?,
            "horizon" => self.synth.horizon = parse(value)?,
            "seed" => self.synth.seed = parse(value)?,
            "order" => self.inference.order = parse(value)?,
            "lambda-ratio" => {
                self.lambda_ratio = parse(value)?;
                self.inference.penalty = Penalty::RatioOfMax(self.lambda_ratio);
            }
            "r2-threshold" => self.inference.r2_threshold = parse(value)?,
            "k-max" => self.inference.k_max = parse(value)?,
            "n-tries" => self.n_tries = parse(value)?,
            "subset-len" => {
                self.subset_len = if value.contains(['.', 'e', 'E']) {
                    SubsetLen::Fraction(parse(value)?)
                } else {
                    SubsetLen::Count(parse(value)?)
                }
            }
            "tau" => self.tau = parse(value)?,
            "runs" => self.runs = parse(value)?,
            "coherence" => self.inference.coherence = parse::<Coherence>(value)?,
            "threads" => {
                self.threads = match value {
                    "" | "auto" => None,
                    v => Some(parse(v)?),
                }
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(format!("unknown setting `{other}`")),
        }
        Ok(())
    }

    /// Apply a `key = value` document. Blank lines and `#` comments are
    /// skipped.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> CliResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::ConfigFile { path: origin.to_path_buf(), line: i + 1, message };
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    /// Defaults, overridden by `file` if given, overridden by `flags`.
    pub fn resolve<'a>(file: Option<&Path>, flags: impl IntoIterator<Item = (&'a str, &'a str)>) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.apply_text(&text, path)?;
        }
        for (key, value) in flags {
            cfg.set(key, value).map_err(|message| CliError::Setting { key: key.to_string(), message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> CliResult<()> {
        self.inference.validate()?;
        let bad = |key: &str, message: String| Err(CliError::Setting { key: key.into(), message });
        if self.n_tries == 0 {
            return bad("n-tries", "must be at least 1".into());
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau", format!("{} is outside (0, 1]", self.tau));
        }
        if self.runs == 0 {
            return bad("runs", "must be at least 1".into());
        }
        if !(self.lambda_ratio >= 0.0 && self.lambda_ratio.is_finite()) {
            return bad("lambda-ratio", format!("{} must be a non-negative number", self.lambda_ratio));
        }
        if let SubsetLen::Fraction(f) = self.subset_len {
            if !(f > 0.0 && f <= 1.0) {
                return bad("subset-len", format!("fraction {f} is outside (0, 1]"));
            }
        }
        if self.threads == Some(0) {
            return bad("threads", "must be at least 1".into());
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "n" => self.synth.n.to_string(),
            "c" => format!("{:?}", self.synth.c),
            "sigma" => format!("{:?}", self.synth.sigma),
            "sigma-start" => format!("{:?}", self.synth.sigma_start),
            "h" => format!("{:?}", self.synth.h),
            "dt" => format!("{:?}", self.synth.dt),
            "horizon" => format!("{:?}", self.synth.horizon),
            "seed" => self.synth.seed.to_string(),
            "order" => self.inference.order.to_string(),
            "lambda-ratio" => format!("{:?}", self.lambda_ratio),
            "r2-threshold" => format!("{:?}", self.inference.r2_threshold),
            "k-max" => self.inference.k_max.to_string(),
            "n-tries" => self.n_tries.to_string(),
            "subset-len" => self.subset_len.to_string(),
            "tau" => format!("{:?}", self.tau),
            "runs" => self.runs.to_string(),
            "coherence" => self.inference.coherence.to_string(),
            "threads" => self.threads.map_or_else(|| "auto".into(), |t| t.to_string()),
            "out" => self.out.display().to_string(),
            _ => unreachable!("key list and accessors disagree"),
        }
    }

    /// Config file text that reproduces this configuration. The worker count
    /// and output directory are left out since they do not affect results.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS.iter().filter(|k| !matches!(**k, "threads" | "out")) {
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("c", "0.75").unwrap();
        cfg.set("subset_len", "42").unwrap();
        cfg.set("coherence", "zero-pad").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text(), Path::new("mem")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn file_then_flags() {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), "# comment\nn = 7\nc=1.5\n\n tau = 0.3 # trailing\n").unwrap();
        let cfg = RunConfig::resolve(Some(file.path()), [("c", "3")]).unwrap();
        assert_eq!(cfg.synth.n, 7);
        assert_eq!(cfg.synth.c, 3.0);
        assert_eq!(cfg.tau, 0.3);
    }

    #[test]
    fn bad_lines_report_position() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_text("n = 5\nbogus\n", Path::new("f.txt")).unwrap_err();
        assert!(matches!(err, CliError::ConfigFile { line: 2, .. }));
        assert_eq!(err.exit_code(), 3);
        let err = cfg.apply_text("n = 5\n\nwhat = 1\n", Path::new("f.txt")).unwrap_err();
        assert!(matches!(err, CliError::ConfigFile { line: 3, .. }));
        let err = cfg.apply_text("n = five\n", Path::new("f.txt")).unwrap_err();
        assert!(err.to_string().starts_with("f.txt:1:"));
    }

    #[test]
    fn flag_errors_are_invalid_arguments() {
        let err = RunConfig::resolve(None, [("tau", "0")]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::resolve(None, [("n-tries", "-3")]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::resolve(None, [("k-max", "1")]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn subset_len_forms() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.subset_len.resolve(101), 61);
        cfg.set("subset-len", "0.5").unwrap();
        assert_eq!(cfg.subset_len.resolve(101), 51);
        cfg.set("subset-len", "30").unwrap();
        assert_eq!(cfg.subset_len, SubsetLen::Count(30));
        assert_eq!(SubsetLen::Fraction(0.01).resolve(101), 4);
    }
}
