use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ETA_MAX;
use crate::witness::DEFAULT_EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Delay gate at fixed θ with overlap `q` (or delay `τ`) swept.
    Delay,
    /// Partial swap phase θ against dephasing probability `p`.
    ThetaP,
    /// Full dephasing with the axes rotated by `η`.
    Eta,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Delay => "delay",
            Family::ThetaP => "theta_p",
            Family::Eta => "eta",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delay" => Ok(Family::Delay),
            "theta_p" | "theta-p" => Ok(Family::ThetaP),
            "eta" => Ok(Family::Eta),
            _ => Err(Error::config(
                "family",
                format!("`{s}` is not one of delay, theta_p, eta"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("format", format!("`{s}` is not csv or json"))),
        }
    }
}

/// Evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:steps`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Parse(format!("grid `{s}` must be start:stop:steps"));
        match parts[..] {
            [a, b, n] => Ok(Grid::new(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
                n.parse().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

/// Parameters held fixed across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub eta: Option<f64>,
    pub tau_coh: Option<f64>,
}

impl FixedParams {
    pub const fn none() -> Self {
        Self {
            theta: None,
            p: None,
            q: None,
            eta: None,
            tau_coh: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    /// Swept parameters in nesting order, outermost first.
    pub grid: Vec<(String, Grid)>,
    pub fixed: FixedParams,
    pub epsilon: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    /// Absent means exact theory; present means simulated tomography per point.
    pub shots: Option<u64>,
}

/// Default delay-sweep span in units of the coherence time.
pub const DEFAULT_TAU_SPAN: f64 = 5.0;

impl SweepConfig {
    /// Default grids for `family`, with a delay grid in `τ` when `tau_coh` is set.
    pub fn new(family: Family, fixed: FixedParams) -> Self {
        let grid = match family {
            Family::Delay => match fixed.tau_coh {
                Some(tc) => vec![("tau".to_string(), Grid::new(0.0, DEFAULT_TAU_SPAN * tc, 41))],
                None => vec![("q".to_string(), Grid::new(0.0, 1.0, 41))],
            },
            Family::ThetaP => vec![
                ("theta".to_string(), Grid::new(0.0, PI, 25)),
                ("p".to_string(), Grid::new(0.0, 0.3, 16)),
            ],
            Family::Eta => vec![("eta".to_string(), Grid::new(0.0, ETA_MAX, 21))],
        };
        Self {
            family,
            grid,
            fixed,
            epsilon: DEFAULT_EPSILON,
            output: None,
            format: OutputFormat::Csv,
            seed: None,
            shots: None,
        }
    }

    /// Builds a config from `key = value` pairs applied in order, so later
    /// pairs win. Keys: `family`, `theta`, `p`, `q`, `eta`, `tau_coh`,
    /// `steps`, `epsilon`, `shots`, `seed`, `output` (or `out`), `format`,
    /// and `grid.<param> = start:stop:steps`.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in pairs {
            let key = k.as_ref().trim().replace('-', "_");
            map.insert(
                if key == "out" { "output".into() } else { key },
                v.as_ref().trim().to_string(),
            );
        }

        let family: Family = map
            .remove("family")
            .ok_or_else(|| Error::config("family", "missing"))?
            .parse()?;
        let num = |map: &mut BTreeMap<String, String>, key: &str| -> Result<Option<f64>> {
            map.remove(key)
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::config(key, format!("`{s}` is not a number")))
                })
                .transpose()
        };
        let int = |map: &mut BTreeMap<String, String>, key: &str| -> Result<Option<u64>> {
            map.remove(key)
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::config(key, format!("`{s}` is not an integer")))
                })
                .transpose()
        };
        let fixed = FixedParams {
            theta: num(&mut map, "theta")?,
            p: num(&mut map, "p")?,
            q: num(&mut map, "q")?,
            eta: num(&mut map, "eta")?,
            tau_coh: num(&mut map, "tau_coh")?,
        };
        let mut cfg = SweepConfig::new(family, fixed);
        if let Some(e) = num(&mut map, "epsilon")? {
            cfg.epsilon = e;
        }
        cfg.shots = int(&mut map, "shots")?;
        cfg.seed = int(&mut map, "seed")?;
        if let Some(steps) = int(&mut map, "steps")? {
            for (_, g) in &mut cfg.grid {
                g.steps = steps as usize;
            }
        }
        if let Some(o) = map.remove("output") {
            cfg.output = Some(PathBuf::from(o));
        }
        if let Some(f) = map.remove("format") {
            cfg.format = f.parse()?;
        }
        let grid_keys: Vec<String> = map
            .keys()
            .filter(|k| k.starts_with("grid."))
            .cloned()
            .collect();
        for key in grid_keys {
            let value = map.remove(&key).expect("key listed above");
            let param = &key["grid.".len()..];
            let grid: Grid = value
                .parse()
                .map_err(|_| Error::config(&key, format!("`{value}` is not start:stop:steps")))?;
            match cfg.grid.iter_mut().find(|(name, _)| name == param) {
                Some((_, g)) => *g = grid,
                None => {
                    return Err(Error::config(
                        &key,
                        format!("`{param}` is not swept by the {} family", cfg.family),
                    ))
                }
            }
        }
        if let Some(unknown) = map.keys().next() {
            return Err(Error::config(unknown, "unknown key"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if self.shots == Some(0) {
            return Err(Error::config("shots", "must be positive"));
        }
        let check = |field: &str, v: f64, lo: f64, hi: f64| -> Result<()> {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(field, format!("{v} outside [{lo}, {hi}]")))
            }
        };
        let f = &self.fixed;
        if let Some(t) = f.theta {
            check("theta", t, 0.0, PI)?;
        }
        if let Some(p) = f.p {
            check("p", p, 0.0, 1.0)?;
        }
        if let Some(q) = f.q {
            check("q", q, 0.0, 1.0)?;
        }
        if let Some(e) = f.eta {
            check("eta", e, 0.0, ETA_MAX)?;
        }
        if let Some(tc) = f.tau_coh {
            if !(tc.is_finite() && tc > 0.0) {
                return Err(Error::config("tau_coh", "must be positive"));
            }
        }
        for (name, g) in &self.grid {
            let field = format!("grid.{name}");
            if g.steps < 2 {
                return Err(Error::config(
                    &field,
                    format!("steps = {} but at least 2 are needed", g.steps),
                ));
            }
            let (lo, hi) = match name.as_str() {
                "theta" => (0.0, PI),
                "p" | "q" => (0.0, 1.0),
                "eta" => (0.0, ETA_MAX),
                "tau" => {
                    if self.fixed.tau_coh.is_none() {
                        return Err(Error::config("tau_coh", "a tau grid needs tau_coh"));
                    }
                    (0.0, f64::INFINITY)
                }
                _ => return Err(Error::config(&field, "unknown parameter")),
            };
            check(&field, g.start, lo, hi)?;
            check(&field, g.stop, lo, hi)?;
        }
        Ok(())
    }

    /// Base point the swept parameters are written into.
    pub(crate) fn base_point(&self) -> crate::model::FamilyPoint {
        let (theta, p, q, eta) = match self.family {
            Family::Delay => (FRAC_PI_2, 0.0, 1.0, 0.0),
            Family::ThetaP => (FRAC_PI_2, 0.0, 1.0, 0.0),
            Family::Eta => (FRAC_PI_2, 1.0, 1.0, 0.0),
        };
        let f = &self.fixed;
        crate::model::FamilyPoint {
            theta: f.theta.unwrap_or(theta),
            p: f.p.unwrap_or(p),
            q: f.q.unwrap_or(q),
            eta: f.eta.unwrap_or(eta),
        }
    }
}

/// Parses a plain-text config: one `key = value` per line, `#` comments.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            Some(match line.split_once('=') {
                Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
                None => Err(Error::Parse(format!(
                    "config line {}: expected key = value",
                    i + 1
                ))),
            })
        })
        .collect()
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text)
}
