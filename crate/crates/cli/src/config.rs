use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use nhspec_core::{Family, Suite, Variant};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "NHSPEC_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

/// `lo:hi:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TimeGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("invalid number `{s}` in {what}"))
}

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("time grid `{s}` must look like lo:hi:count"));
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid count `{count}` in time grid"))?;
        if count == 0 {
            return Err("time grid count must be at least 1".into());
        }
        Ok(TimeGrid { lo: parse_f64(lo, "time grid")?, hi: parse_f64(hi, "time grid")?, count })
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let Some((lo, hi)) = s.split_once(':') else {
            return Err(format!("window `{s}` must look like lo:hi"));
        };
        Ok(Window { lo: parse_f64(lo, "window")?, hi: parse_f64(hi, "window")? })
    }
}

impl TryFrom<String> for TimeGrid {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl TryFrom<String> for Window {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl From<TimeGrid> for String {
    fn from(g: TimeGrid) -> String {
        g.to_string()
    }
}

impl From<Window> for String {
    fn from(w: Window) -> String {
        w.to_string()
    }
}

/// Every setting a command can take. Loaded from an optional JSON file
/// (same keys) and then overridden field by field from the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Deformation family, k1..k6
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,

    /// plus (hyperbolic) or minus (trigonometric)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,

    /// Canonical noncommutativity parameter
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,

    /// Single evaluation time
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,

    /// Time grid lo:hi:count (endpoints included)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TimeGrid>,

    /// Highest spectrum level
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,

    /// Use the constant-theta canonical spectrum
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<bool>,

    /// Root search window lo:hi (default -pi*tau:pi*tau)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,

    /// Truncation dimension for the Fock suite
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,

    /// Root tolerance on the time axis
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Scan grid size (>= 4096)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,

    /// Verification suite: fock, parity, duality, limits, matching
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,

    /// Comma-separated tau values for the limit report
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_ladder: Option<Vec<f64>>,

    #[arg(long = "format", value_enum)]
    #[serde(rename = "format", skip_serializing_if = "Option::is_none")]
    pub output_format: Option<OutputFormat>,

    /// Write to this file instead of standard output
    #[arg(long = "output")]
    #[serde(rename = "output", skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )+
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(
            self, top, family, variant, kappa, tau, theta, t, t_grid, n_max, canonical, window, dim, tol,
            grid_points, suite, tau_ladder, output_format, output_path
        );
        self
    }

    pub fn require<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, CliError> {
        value.clone().ok_or_else(|| CliError::Usage(format!("missing required setting --{flag}")))
    }

    pub fn format(&self) -> OutputFormat {
        self.output_format.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_window_parse() {
        let g: TimeGrid = "-1:1:5".parse().unwrap();
        assert_eq!(g, TimeGrid { lo: -1.0, hi: 1.0, count: 5 });
        assert!("1:2".parse::<TimeGrid>().is_err());
        assert!("1:2:0".parse::<TimeGrid>().is_err());
        let w: Window = "-3.5e0:2".parse().unwrap();
        assert_eq!(w, Window { lo: -3.5, hi: 2.0 });
        assert!("abc".parse::<Window>().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"family":"k1","colour":"red"}"#);
        assert!(err.is_err());
        let ok: RunConfig = serde_json::from_str(r#"{"family":"k2","variant":"minus","t_grid":"0:1:3","kappa":1e-1}"#).unwrap();
        assert_eq!(ok.family, Some(Family::K2));
        assert_eq!(ok.kappa, Some(0.1));
        assert_eq!(ok.t_grid.unwrap().count, 3);
    }

    #[test]
    fn overlay_prefers_top() {
        let base = RunConfig { kappa: Some(1.0), tau: Some(2.0), ..Default::default() };
        let top = RunConfig { kappa: Some(3.0), ..Default::default() };
        let merged = base.overlay(top);
        assert_eq!(merged.kappa, Some(3.0));
        assert_eq!(merged.tau, Some(2.0));
    }
}
