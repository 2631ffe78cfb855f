//! Run configuration: command-line flags layered over an optional flat
//! key=value file, layered over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use pvsusy::painleve::Ordering;
use pvsusy::seed_solutions::{geometric_grid, linear_grid, Nu, SeedSpec};

use crate::error::CliError;

#[derive(Clone, Debug, Default, clap::Args)]
pub struct SpecArgs {
    /// Angular momentum l (> -1/2).
    #[arg(long = "l", allow_hyphen_values = true)]
    pub ell: Option<f64>,
    /// Factorization energy eps1 as "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Real mixing parameter nu, or "inf".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "lk")]
    pub nu: Option<String>,
    /// Complex mixture lambda,kappa: u = branch1 + (lambda + i kappa) branch2.
    #[arg(long, allow_hyphen_values = true)]
    pub lk: Option<String>,
    /// Transformation order k.
    #[arg(long)]
    pub k: Option<usize>,
    /// Quartet ordering label, e.g. 1423.
    #[arg(long)]
    pub order: Option<String>,
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct GridArgs {
    #[arg(long = "z-min")]
    pub z_min: Option<f64>,
    #[arg(long = "z-max")]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// geometric or linear.
    #[arg(long)]
    pub spacing: Option<String>,
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Flat key=value file; blank lines and '#' comments are skipped.
#[derive(Clone, Debug, Default)]
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Invalid(format!("config line {}: expected key=value", i + 1)))?;
            map.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Invalid(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }
}

fn pick<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Invalid(format!("cannot parse complex value {s:?} (use re or re,im)"));
    let mut parts = s.split(',').map(str::trim);
    let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// Fully resolved spec settings.
#[derive(Clone, Debug)]
pub struct ResolvedSpec {
    pub spec: SeedSpec,
    pub order: Ordering,
}

impl SpecArgs {
    pub fn resolve(&self, file: &FileConfig, default_k: usize) -> Result<ResolvedSpec, CliError> {
        self.resolve_with(file, default_k, true)
    }

    /// Skips the nodeless and eps1 < E0 requirements; hierarchy regimes
    /// mostly sit above the ground level.
    pub fn resolve_unchecked(&self, file: &FileConfig, default_k: usize) -> Result<ResolvedSpec, CliError> {
        self.resolve_with(file, default_k, false)
    }

    fn resolve_with(&self, file: &FileConfig, default_k: usize, physical: bool) -> Result<ResolvedSpec, CliError> {
        let ell = pick(self.ell, file, "l")?.unwrap_or(1.0);
        let eps = parse_complex(&pick(self.eps.clone(), file, "eps")?.unwrap_or_else(|| "0".into()))?;
        let k = pick(self.k, file, "k")?.unwrap_or(default_k);
        let order: Ordering = pick(self.order.clone(), file, "order")?
            .unwrap_or_else(|| "1234".into())
            .parse()
            .map_err(|e: pvsusy::Error| CliError::Invalid(e.to_string()))?;
        let lk = self.lk.clone().or_else(|| if self.nu.is_some() { None } else { file.raw("lk") });
        let spec = if let Some(lk) = lk {
            let mix = parse_complex(&lk)?;
            SeedSpec::with_mixture(ell, eps, (C64::new(1.0, 0.0), mix), k)?
        } else {
            let nu: Nu = pick(self.nu.clone(), file, "nu")?.unwrap_or_else(|| "0".into()).parse()?;
            if eps.im == 0.0 && physical {
                SeedSpec::real(ell, eps.re, nu, k)?
            } else {
                SeedSpec::unchecked_nu(ell, eps, nu, k)?
            }
        };
        Ok(ResolvedSpec { spec, order })
    }
}

impl GridArgs {
    pub fn resolve(&self, file: &FileConfig, defaults: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
        let lo = pick(self.z_min, file, "z-min")?.unwrap_or(defaults.0);
        let hi = pick(self.z_max, file, "z-max")?.unwrap_or(defaults.1);
        let n = pick(self.points, file, "points")?.unwrap_or(defaults.2);
        let spacing = pick(self.spacing.clone(), file, "spacing")?.unwrap_or_else(|| "geometric".into());
        if !(lo > 0.0) || !lo.is_finite() {
            return Err(CliError::Invalid(format!("grid minimum must be positive, got {lo}")));
        }
        if !(hi > lo) || !hi.is_finite() {
            return Err(CliError::Invalid(format!("grid maximum {hi} must exceed minimum {lo}")));
        }
        if n < 2 {
            return Err(CliError::Invalid(format!("need at least 2 grid points, got {n}")));
        }
        match spacing.as_str() {
            "geometric" => Ok(geometric_grid(lo, hi, n)),
            "linear" => Ok(linear_grid(lo, hi, n)),
            other => Err(CliError::Invalid(format!("unknown spacing {other:?}"))),
        }
    }
}

impl OutputArgs {
    pub fn format(&self, file: &FileConfig) -> Result<Format, CliError> {
        match pick(self.format.clone(), file, "format")?.as_deref() {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => Err(CliError::Invalid(format!("unknown format {other:?}"))),
        }
    }

    pub fn path(&self, file: &FileConfig) -> Result<Option<PathBuf>, CliError> {
        pick(self.output.clone(), file, "output")
    }
}

pub fn tolerance(flag: Option<f64>, file: &FileConfig, key: &str, default: f64) -> Result<f64, CliError> {
    let t = pick(flag, file, key)?.unwrap_or(default);
    if !(t > 0.0) || !t.is_finite() {
        return Err(CliError::Invalid(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values_parse() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("1, -3").unwrap(), C64::new(1.0, -3.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let file = FileConfig::parse("# run\nl = 2\nk=2\nz-min=0.5\n").unwrap();
        let args = SpecArgs { ell: Some(3.0), nu: Some("1".into()), ..Default::default() };
        let r = args.resolve(&file, 1).unwrap();
        assert_eq!(r.spec.ell, 3.0);
        assert_eq!(r.spec.k, 2);
        let grid = GridArgs::default().resolve(&file, (0.1, 20.0, 10)).unwrap();
        assert_eq!(grid[0], 0.5);
    }

    #[test]
    fn bad_grids_are_rejected() {
        let file = FileConfig::default();
        let g = GridArgs { z_min: Some(0.0), ..Default::default() };
        assert!(g.resolve(&file, (0.1, 20.0, 10)).is_err());
        let g = GridArgs { points: Some(1), ..Default::default() };
        assert!(g.resolve(&file, (0.1, 20.0, 10)).is_err());
        assert!(FileConfig::parse("novalue").is_err());
    }
}
