//! Run configuration: defaults, `key = value` files and validation.

use std::path::{Path, PathBuf};

use dpgamma_core::jseries::{DEFAULT_DIGITS, DEFAULT_GRID, DEFAULT_TERMS};
use dpgamma_core::mirror::DEFAULT_SEED;
use dpgamma_core::spectra::DEFAULT_TOL;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub precision_digits: u32,
    pub t_grid: Vec<f64>,
    pub seed: u64,
    /// Bundled table when `None`.
    pub gw_table_path: Option<PathBuf>,
    /// Standard output when `None`.
    pub output_path: Option<PathBuf>,
    /// Term budget for J-series evaluation.
    pub max_terms: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: DEFAULT_TOL,
            precision_digits: DEFAULT_DIGITS,
            t_grid: DEFAULT_GRID.to_vec(),
            seed: DEFAULT_SEED,
            gw_table_path: None,
            output_path: None,
            max_terms: DEFAULT_TERMS,
        }
    }
}

/// Settings as they come from a file or the command line, before defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub precision_digits: Option<u32>,
    pub t_grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub gw_table_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub max_terms: Option<usize>,
}

impl Overrides {
    /// Values in `top` win.
    pub fn merge(self, top: Overrides) -> Overrides {
        Overrides {
            tolerance: top.tolerance.or(self.tolerance),
            precision_digits: top.precision_digits.or(self.precision_digits),
            t_grid: top.t_grid.or(self.t_grid),
            seed: top.seed.or(self.seed),
            gw_table_path: top.gw_table_path.or(self.gw_table_path),
            output_path: top.output_path.or(self.output_path),
            max_terms: top.max_terms.or(self.max_terms),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad grid value {x:?}")))
        .collect()
}

pub fn parse_weights(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad weight {x:?}")))
        .collect()
}

fn bad(line: usize, msg: String) -> CliError {
    CliError::Usage(format!("config line {line}: {msg}"))
}

/// Parse `key = value` lines. Keys are the long flag names; `_` and `-` are
/// interchangeable. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| bad(no, format!("expected key = value, got {line:?}")))?;
        let key = k.trim().replace('_', "-");
        let v = v.trim();
        let num = |what: &str| bad(no, format!("bad {what} {v:?}"));
        match key.as_str() {
            "tol" | "tolerance" => o.tolerance = Some(v.parse().map_err(|_| num("tolerance"))?),
            "digits" => o.precision_digits = Some(v.parse().map_err(|_| num("digit count"))?),
            "t-grid" => o.t_grid = Some(parse_grid(v).map_err(|e| bad(no, e))?),
            "seed" => o.seed = Some(v.parse().map_err(|_| num("seed"))?),
            "gw-table" => o.gw_table_path = Some(PathBuf::from(v)),
            "out" => o.output_path = Some(PathBuf::from(v)),
            "max-terms" => o.max_terms = Some(v.parse().map_err(|_| num("term budget"))?),
            other => return Err(bad(no, format!("unknown key {other:?}"))),
        }
    }
    Ok(o)
}

pub fn load_config(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn from_overrides(o: Overrides) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        let c = RunConfig {
            tolerance: o.tolerance.unwrap_or(d.tolerance),
            precision_digits: o.precision_digits.unwrap_or(d.precision_digits),
            t_grid: o.t_grid.unwrap_or(d.t_grid),
            seed: o.seed.unwrap_or(d.seed),
            gw_table_path: o.gw_table_path,
            output_path: o.output_path,
            max_terms: o.max_terms.unwrap_or(d.max_terms),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(20..=1000).contains(&self.precision_digits) {
            return Err(CliError::Usage(format!("digits must lie in 20..=1000, got {}", self.precision_digits)));
        }
        let g = &self.t_grid;
        if g.is_empty() || g.iter().any(|t| !(*t > 0.0 && t.is_finite())) || g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("t-grid must be positive and strictly increasing".into()));
        }
        if self.max_terms == 0 {
            return Err(CliError::Usage("max-terms must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.tolerance, 1e-9);
        assert_eq!(c.precision_digits, 60);
        assert_eq!(c.t_grid, [10.0, 15.0, 20.0, 25.0, 30.0]);
        assert_eq!(c.seed, 42);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn file_keys() {
        let o = parse_config("# run\ntol = 1e-6\nt_grid = 1, 2,3\nseed=7 # trailing\n\ngw-table = a.tbl\n").unwrap();
        assert_eq!(o.tolerance, Some(1e-6));
        assert_eq!(o.t_grid, Some(vec![1.0, 2.0, 3.0]));
        assert_eq!(o.seed, Some(7));
        assert_eq!(o.gw_table_path, Some(PathBuf::from("a.tbl")));
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("seed").is_err());
        assert!(parse_config("digits = many").is_err());
    }

    #[test]
    fn flags_beat_file() {
        let file = Overrides { seed: Some(1), tolerance: Some(1e-3), ..Default::default() };
        let flags = Overrides { seed: Some(2), ..Default::default() };
        let c = RunConfig::from_overrides(file.merge(flags)).unwrap();
        assert_eq!((c.seed, c.tolerance), (2, 1e-3));
    }

    #[test]
    fn rejects_bad_values() {
        for o in [
            Overrides { tolerance: Some(0.0), ..Default::default() },
            Overrides { t_grid: Some(vec![2.0, 1.0]), ..Default::default() },
            Overrides { t_grid: Some(vec![]), ..Default::default() },
            Overrides { precision_digits: Some(5), ..Default::default() },
        ] {
            assert!(matches!(RunConfig::from_overrides(o), Err(CliError::Usage(_))));
        }
    }
}
