use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plap_core::shooting::Sign;
use plap_core::ProblemParams;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "Radial p-Laplacian experiments")]
pub struct Cli {
    /// key=value file supplying defaults for any flag; flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents and regime flags as JSON.
    Classify(ProblemArgs),
    /// Integrate one radial trajectory; CSV r,u,du,w.
    Shoot(ShootArgs),
    /// Classify trajectories along one parameter axis; CSV.
    Sweep(SweepArgs),
    /// Constants and grid residual of the explicit supersolution as JSON.
    Counterexample(CounterexampleArgs),
    /// Three-sphere lower bound table, or a monotonicity check on samples.
    Hadamard(HadamardArgs),
    /// Radial Pohozaev residuals along a trajectory as JSON.
    Pohozaev(PohozaevArgs),
    /// Dirichlet problem on an annulus; CSV r,u.
    Bvp(BvpArgs),
    /// Run the built-in verification checks.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    /// -Delta_p u = a r^gamma u^q
    Minus,
    /// Delta_p u = a r^gamma u^q
    Plus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Minus => Sign::EquationMinus,
            SignArg::Plus => Sign::EquationPlus,
        }
    }
}

impl FromStr for SignArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Q,
    U0,
    Gamma,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Amplitude of the source term.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct IvpArgs {
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ShootArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ivp: IvpArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ivp: IvpArgs,
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CounterexampleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub r_lo: Option<f64>,
    #[arg(long)]
    pub r_hi: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct HadamardArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub m2: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// CSV whose first two columns are r and the sphere minimum m(r); runs
    /// the monotonicity check instead of printing the bound.
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PohozaevArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ivp: IvpArgs,
    /// Evaluation radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r_eval: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BvpArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r_inner: Option<f64>,
    #[arg(long)]
    pub r_outer: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u_inner: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u_outer: Option<f64>,
    /// Constant source term f >= 0.
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub mesh: Option<usize>,
    /// Boundary values of a p-harmonic comparison profile; reports
    /// min(u - phi) on standard error.
    #[arg(long, num_args = 2, value_names = ["INNER", "OUTER"], allow_negative_numbers = true)]
    pub compare: Option<Vec<f64>>,
}

/// Flag values layered over an optional config file.
pub struct Settings {
    file: HashMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut file = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
                file.insert(normalize(k), v.trim().to_string());
            }
        }
        Ok(Self { file })
    }

    /// The flag if given, else the config entry, else `None`.
    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(&normalize(key)) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config value for {key}: cannot parse {v:?}"))),
        }
    }

    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.get(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required --{}", normalize(key))))
    }

    pub fn problem(&self, args: &ProblemArgs) -> Result<ProblemParams, CliError> {
        let n = self.require(args.n, "n")?;
        let p = self.require(args.p, "p")?;
        let gamma = self.or(args.gamma, "gamma", 0.0)?;
        let q = self.require(args.q, "q")?;
        let a = self.or(args.a, "a", 1.0)?;
        Ok(ProblemParams::new(n, p, gamma, q, a)?)
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_values() {
        let dir = std::env::temp_dir().join(format!("plap-settings-{}", std::process::id()));
        std::fs::write(&dir, "r_max = 50\nsign=plus\n").unwrap();
        let s = Settings::load(Some(&dir)).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(s.or(None, "r-max", 1.0).unwrap(), 50.0);
        assert_eq!(s.or(Some(7.0), "r-max", 1.0).unwrap(), 7.0);
        assert_eq!(s.get::<SignArg>(None, "sign").unwrap(), Some(SignArg::Plus));
        assert_eq!(s.get::<f64>(None, "rtol").unwrap(), None);
        assert!(matches!(s.require::<f64>(None, "n"), Err(CliError::Usage(_))));
    }
}
