//! Run configuration: a TOML file with flag overrides on top.
//!
//! ```toml
//! lambda = 0.5
//! grid = 400
//! t_out = 12.0
//! w = ["0.75", "0.6+2i"]
//! out = "out"
//! format = "json"
//!
//! [tolerances]
//! sonine = 1e-7
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sonine_core::c64;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Default tolerance of every named check.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("sonine", 1e-7),
    ("algebra", 1e-8),
    ("lemma", 1e-8),
    ("sinc-square", 1e-10),
    ("psi", 1e-9),
    ("vanishing", 1e-10),
    ("parity", 1e-7),
    ("routes", 1e-6),
    ("symmetry", 1e-6),
    ("kernel", 1e-10),
    ("reality", 1e-8),
    ("isometry", 0.02),
    ("convergence", 1e-8),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub lambda: f64,
    pub grid_n: usize,
    /// Fixed truncation point; chosen per function when absent.
    pub t_out: Option<f64>,
    #[serde(serialize_with = "serialize_points")]
    pub w_list: Vec<c64>,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    pub format: Format,
}

fn serialize_points<S: serde::Serializer>(w: &[c64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(w.iter().map(|z| format_complex(*z)))
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda: 0.5,
            grid_n: 400,
            t_out: None,
            w_list: [0.5, 0.75, 1.0, 1.5]
                .iter()
                .map(|&r| c64::new(r, 0.0))
                .chain([c64::new(0.6, 2.0)])
                .collect(),
            tolerances: DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            output_dir: PathBuf::from("out"),
            format: Format::Json,
        }
    }
}

/// The file layer; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lambda: Option<f64>,
    grid: Option<usize>,
    t_out: Option<f64>,
    w: Option<Vec<String>>,
    out: Option<PathBuf>,
    format: Option<Format>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

/// Values given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub grid: Option<usize>,
    pub t_out: Option<f64>,
    /// Comma-separated points; an empty string means no points.
    pub w: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// `name=value` pairs.
    pub tolerances: Vec<String>,
}

impl RunConfig {
    /// Defaults, then the file, then the flags; validated at the end.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let parsed: FileConfig = toml::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))?;
            cfg.apply_file(parsed)?;
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: FileConfig) -> Result<(), CliError> {
        if let Some(v) = f.lambda {
            self.lambda = v;
        }
        if let Some(v) = f.grid {
            self.grid_n = v;
        }
        if f.t_out.is_some() {
            self.t_out = f.t_out;
        }
        if let Some(w) = f.w {
            self.w_list = w
                .iter()
                .map(|s| parse_complex(s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = f.out {
            self.output_dir = v;
        }
        if let Some(v) = f.format {
            self.format = v;
        }
        for (k, v) in f.tolerances {
            self.set_tolerance(&k, v)?;
        }
        Ok(())
    }

    fn apply_flags(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = o.lambda {
            self.lambda = v;
        }
        if let Some(v) = o.grid {
            self.grid_n = v;
        }
        if o.t_out.is_some() {
            self.t_out = o.t_out;
        }
        if let Some(w) = &o.w {
            self.w_list = parse_list(w)?;
        }
        if let Some(v) = &o.out {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        for pair in &o.tolerances {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("tolerance `{pair}` is not name=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("tolerance `{pair}` has a bad value")))?;
            self.set_tolerance(k.trim(), v)?;
        }
        Ok(())
    }

    fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        match self.tolerances.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(CliError::usage(format!(
                "unknown tolerance `{name}`; known: {}",
                self.tolerances
                    .keys()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(CliError::usage("lambda must be positive"));
        }
        if self.grid_n < 16 {
            return Err(CliError::usage("grid must be at least 16"));
        }
        if let Some(t) = self.t_out {
            if !(t.is_finite() && t > self.lambda) {
                return Err(CliError::usage("t_out must exceed lambda"));
            }
        }
        if let Some((k, _)) = self
            .tolerances
            .iter()
            .find(|(_, &v)| v.is_nan() || v <= 0.0)
        {
            return Err(CliError::usage(format!("tolerance `{k}` must be positive")));
        }
        Ok(())
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }
}

/// Comma-separated complex points; blank entries are skipped.
pub fn parse_list(s: &str) -> Result<Vec<c64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_complex)
        .collect()
}

/// `0.75`, `2i`, `-i`, `0.6+2i`, `1e-1-3.5i`.
pub fn parse_complex(s: &str) -> Result<c64, CliError> {
    let bad = || CliError::usage(format!("`{s}` is not a complex number"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|r| c64::new(r, 0.0))
            .map_err(|_| bad());
    };
    // the sign that starts the imaginary part: not leading, not an exponent's
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(c64::new(re, im))
}

pub fn format_complex(z: c64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.75").unwrap(), c64::new(0.75, 0.0));
        assert_eq!(parse_complex("0.6+2i").unwrap(), c64::new(0.6, 2.0));
        assert_eq!(parse_complex("0.5 - 3i").unwrap(), c64::new(0.5, -3.0));
        assert_eq!(parse_complex("2i").unwrap(), c64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-1-3.5e1i").unwrap(), c64::new(0.1, -35.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+").is_err());
        for z in [
            c64::new(0.6, -2.0),
            c64::new(1.5, 0.0),
            c64::new(-0.25, 1e-3),
        ] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn empty_list_is_allowed() {
        assert!(parse_list("").unwrap().is_empty());
        assert_eq!(parse_list("0.75, 0.6+1i").unwrap().len(), 2);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("sonine-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(
            &path,
            "lambda = 1.0\ngrid = 64\n[tolerances]\nsonine = 1e-6\n",
        )
        .unwrap();
        let flags = Overrides {
            grid: Some(32),
            tolerances: vec!["kernel=1e-9".into()],
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&path), &flags).unwrap();
        assert_eq!(cfg.lambda, 1.0);
        assert_eq!(cfg.grid_n, 32);
        assert_eq!(cfg.tol("sonine"), 1e-6);
        assert_eq!(cfg.tol("kernel"), 1e-9);
        std::fs::write(&path, "lambda = 1.0\nbogus = 3\n").unwrap();
        assert!(matches!(
            RunConfig::resolve(Some(&path), &Overrides::default()),
            Err(CliError::Usage(_))
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn invariants_are_enforced() {
        let bad = [
            Overrides {
                lambda: Some(0.0),
                ..Default::default()
            },
            Overrides {
                grid: Some(8),
                ..Default::default()
            },
            Overrides {
                t_out: Some(0.25),
                ..Default::default()
            },
            Overrides {
                tolerances: vec!["sonine=0".into()],
                ..Default::default()
            },
            Overrides {
                tolerances: vec!["nope=1".into()],
                ..Default::default()
            },
        ];
        for o in bad {
            assert!(RunConfig::resolve(None, &o).is_err(), "{o:?}");
        }
    }
}
