//! Experiment configuration: a flat `key = value` format with `#` comments.
//!
//! Keys are listed in [`KEYS`]. Every experiment supplies its own defaults;
//! `replicates`, `master_seed` and `out` have none and must be given. List
//! values are comma separated. `m = auto` selects the experiment's default
//! cube size.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hardcore_core::dispensable::SpecialParse;
use hardcore_core::{RadiusLaw, WeightSpec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("{}: duplicate key `{key}` (first set on line {first})", at(*.line))]
    Duplicate { key: String, line: usize, first: usize },
    #[error("{}: unknown key `{key}`", at(*.line))]
    Unknown { key: String, line: usize },
    #[error("{}: key `{key}` expects {expected}, got `{value}`", at(*.line))]
    Type { key: String, line: usize, expected: &'static str, value: String },
    #[error("{}: key `{key}`: {message}", at(*.line))]
    Range { key: String, line: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("unknown experiment `{0}`; expected one of {1}")]
    Experiment(String, String),
}

/// Line 0 marks a value given on the command line.
fn at(line: usize) -> String {
    if line == 0 {
        "command line".to_string()
    } else {
        format!("line {line}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Sandwich,
    MaternCheck,
    Uniqueness,
    Dispensable,
    ThetaGrid,
    HugeScan,
    Shield,
    Isoperimetric,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Sandwich,
        ExperimentKind::MaternCheck,
        ExperimentKind::Uniqueness,
        ExperimentKind::Dispensable,
        ExperimentKind::ThetaGrid,
        ExperimentKind::HugeScan,
        ExperimentKind::Shield,
        ExperimentKind::Isoperimetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Sandwich => "sandwich",
            ExperimentKind::MaternCheck => "matern-check",
            ExperimentKind::Uniqueness => "uniqueness",
            ExperimentKind::Dispensable => "dispensable",
            ExperimentKind::ThetaGrid => "theta-grid",
            ExperimentKind::HugeScan => "huge-scan",
            ExperimentKind::Shield => "shield",
            ExperimentKind::Isoperimetric => "isoperimetric",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            ConfigError::Experiment(s.to_string(), names.join(", "))
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowShape {
    Torus,
    Ball,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dimension: usize,
    pub window: WindowShape,
    /// Torus side length.
    pub side: f64,
    /// Free-ball radius `n`.
    pub ball_radius: f64,
    /// Torus side per unit of `a` in the lattice experiments.
    pub side_factor: f64,
    pub intensity: f64,
    pub radius_min: f64,
    pub radius_max: f64,
    pub weight: WeightSpec,
    /// Voronoi seed intensities; `0` stands for a single seed at the origin.
    pub seed_intensities: Vec<f64>,
    pub a_values: Vec<u32>,
    pub p_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub s_max: usize,
    /// Cube side for swaps, or cube half-side for boundary coefficients.
    pub m: Option<f64>,
    pub cap: usize,
    pub max_component: usize,
    pub max_rounds: usize,
    pub samples: usize,
    pub special_parse: SpecialParse,
    pub replicates: usize,
    pub master_seed: u64,
    pub out: PathBuf,
    pub record_wall_time: bool,
}

/// Every recognised key, in serialization order.
pub const KEYS: [&str; 25] = [
    "experiment",
    "dimension",
    "window",
    "side",
    "ball_radius",
    "side_factor",
    "intensity",
    "radius_min",
    "radius_max",
    "weight",
    "seed_intensities",
    "a_values",
    "p_values",
    "q_values",
    "s_max",
    "m",
    "cap",
    "max_component",
    "max_rounds",
    "samples",
    "special_parse",
    "replicates",
    "master_seed",
    "out",
    "record_wall_time",
];

impl ExperimentConfig {
    /// Defaults of `experiment`, with the required keys left unset.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            dimension: 2,
            window: WindowShape::Torus,
            side: 20.0,
            ball_radius: 8.0,
            side_factor: 6.0,
            intensity: 1.0,
            radius_min: 0.3,
            radius_max: 0.5,
            weight: WeightSpec::Volume,
            seed_intensities: vec![1.0, 0.25, 0.0625],
            a_values: vec![2, 4, 8],
            p_values: vec![0.2, 0.4, 0.6, 0.8],
            q_values: vec![0.5],
            s_max: 3,
            m: None,
            cap: 64,
            max_component: 12,
            max_rounds: 100_000,
            samples: 20_000,
            special_parse: SpecialParse::AllGrains,
            replicates: 0,
            master_seed: 0,
            out: PathBuf::new(),
            record_wall_time: true,
        };
        match experiment {
            ExperimentKind::Sandwich | ExperimentKind::Isoperimetric => {}
            ExperimentKind::MaternCheck => {
                c.side = 30.0;
                c.intensity = 0.5;
                c.radius_min = 0.4;
                c.radius_max = 0.4;
            }
            ExperimentKind::Uniqueness | ExperimentKind::Dispensable => {
                c.intensity = 0.3;
                c.s_max = 12;
            }
            ExperimentKind::ThetaGrid => {
                c.window = WindowShape::Ball;
                c.intensity = 1.2;
                c.radius_min = 1.0;
                c.radius_max = 1.1;
            }
            ExperimentKind::HugeScan | ExperimentKind::Shield => {
                c.radius_min = 0.0;
                c.radius_max = 1.0;
            }
        }
        c
    }

    pub fn radius_law(&self) -> RadiusLaw {
        if self.radius_min == self.radius_max {
            RadiusLaw::Fixed(self.radius_max)
        } else {
            RadiusLaw::Uniform { lo: self.radius_min, hi: self.radius_max }
        }
    }

    /// Value of `key` in the text format.
    pub fn get(&self, key: &str) -> Option<String> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        Some(match key {
            "experiment" => self.experiment.to_string(),
            "dimension" => self.dimension.to_string(),
            "window" => match self.window {
                WindowShape::Torus => "torus".into(),
                WindowShape::Ball => "ball".into(),
            },
            "side" => self.side.to_string(),
            "ball_radius" => self.ball_radius.to_string(),
            "side_factor" => self.side_factor.to_string(),
            "intensity" => self.intensity.to_string(),
            "radius_min" => self.radius_min.to_string(),
            "radius_max" => self.radius_max.to_string(),
            "weight" => match self.weight {
                WeightSpec::Unit => "unit".into(),
                WeightSpec::Volume => "volume".into(),
                WeightSpec::ExpRadius(a) => format!("exp:{a}"),
            },
            "seed_intensities" => list(&self.seed_intensities),
            "a_values" => self.a_values.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            "p_values" => list(&self.p_values),
            "q_values" => list(&self.q_values),
            "s_max" => self.s_max.to_string(),
            "m" => self.m.map_or_else(|| "auto".into(), |m| m.to_string()),
            "cap" => self.cap.to_string(),
            "max_component" => self.max_component.to_string(),
            "max_rounds" => self.max_rounds.to_string(),
            "samples" => self.samples.to_string(),
            "special_parse" => self.special_parse.label().into(),
            "replicates" => self.replicates.to_string(),
            "master_seed" => self.master_seed.to_string(),
            "out" => self.out.display().to_string(),
            "record_wall_time" => self.record_wall_time.to_string(),
            _ => return None,
        })
    }

    /// Text form listing every key; parses back to an equal configuration.
    pub fn serialize(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.get(k).unwrap_or_default())).collect()
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let ty = |expected: &'static str| ConfigError::Type {
            key: key.into(),
            line,
            expected,
            value: value.into(),
        };
        let num = || value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ty("a finite number"));
        let int = || value.parse::<usize>().map_err(|_| ty("a non-negative integer"));
        let nums = || -> Result<Vec<f64>, ConfigError> {
            value
                .split(',')
                .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ty("a comma separated list of numbers"))
        };
        match key {
            "experiment" => self.experiment = value.parse()?,
            "dimension" => self.dimension = int()?,
            "window" => {
                self.window = match value {
                    "torus" => WindowShape::Torus,
                    "ball" => WindowShape::Ball,
                    _ => return Err(ty("`torus` or `ball`")),
                }
            }
            "side" => self.side = num()?,
            "ball_radius" => self.ball_radius = num()?,
            "side_factor" => self.side_factor = num()?,
            "intensity" => self.intensity = num()?,
            "radius_min" => self.radius_min = num()?,
            "radius_max" => self.radius_max = num()?,
            "weight" => {
                self.weight = match value {
                    "unit" => WeightSpec::Unit,
                    "volume" => WeightSpec::Volume,
                    _ => match value.strip_prefix("exp:").and_then(|a| a.parse::<f64>().ok()) {
                        Some(a) => WeightSpec::ExpRadius(a),
                        None => return Err(ty("`unit`, `volume` or `exp:<a>`")),
                    },
                }
            }
            "seed_intensities" => self.seed_intensities = nums()?,
            "a_values" => {
                self.a_values = value
                    .split(',')
                    .map(|s| s.trim().parse::<u32>().ok())
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| ty("a comma separated list of integers"))?
            }
            "p_values" => self.p_values = nums()?,
            "q_values" => self.q_values = nums()?,
            "s_max" => self.s_max = int()?,
            "m" => self.m = if value == "auto" { None } else { Some(num()?) },
            "cap" => self.cap = int()?,
            "max_component" => self.max_component = int()?,
            "max_rounds" => self.max_rounds = int()?,
            "samples" => self.samples = int()?,
            "special_parse" => {
                self.special_parse = match value {
                    "all-grains" => SpecialParse::AllGrains,
                    "active-only" => SpecialParse::ActiveOnly,
                    _ => return Err(ty("`all-grains` or `active-only`")),
                }
            }
            "replicates" => self.replicates = int()?,
            "master_seed" => self.master_seed = value.parse().map_err(|_| ty("an unsigned 64-bit integer"))?,
            "out" => self.out = PathBuf::from(value),
            "record_wall_time" => self.record_wall_time = value.parse().map_err(|_| ty("`true` or `false`"))?,
            _ => return Err(ConfigError::Unknown { key: key.into(), line }),
        }
        Ok(())
    }

    fn validate(&self, lines: &BTreeMap<String, usize>) -> Result<(), ConfigError> {
        let range = |key: &str, message: String| ConfigError::Range {
            key: key.into(),
            line: lines.get(key).copied().unwrap_or(0),
            message,
        };
        let check = |ok: bool, key: &str, message: &str| if ok { Ok(()) } else { Err(range(key, message.into())) };
        check((1..=3).contains(&self.dimension), "dimension", "must be 1, 2 or 3")?;
        check(self.side > 0.0, "side", "must be positive")?;
        check(self.ball_radius >= 3.0, "ball_radius", "must be at least 3")?;
        check(self.side_factor > 0.0, "side_factor", "must be positive")?;
        check(self.intensity > 0.0, "intensity", "must be positive")?;
        check(self.radius_min >= 0.0, "radius_min", "must be non-negative")?;
        check(self.radius_max > 0.0 && self.radius_max >= self.radius_min, "radius_max", "must be positive and at least radius_min")?;
        if let Err(e) = self.weight.validate() {
            return Err(range("weight", e.to_string()));
        }
        check(
            !self.seed_intensities.is_empty() && self.seed_intensities.iter().all(|&s| s >= 0.0),
            "seed_intensities",
            "must be a non-empty list of non-negative values",
        )?;
        check(!self.a_values.is_empty() && self.a_values.iter().all(|&a| a >= 1), "a_values", "must be a non-empty list of integers >= 1")?;
        for key in ["p_values", "q_values"] {
            let v = if key == "p_values" { &self.p_values } else { &self.q_values };
            check(!v.is_empty() && v.iter().all(|x| (0.0..=1.0).contains(x)), key, "must be a non-empty list in [0, 1]")?;
        }
        check((1..=hardcore_core::thinning::MAX_SWAP_SIZE).contains(&self.s_max), "s_max", "must lie in 1..=16")?;
        check(self.m.is_none_or(|m| m > 0.0), "m", "must be positive or `auto`")?;
        check(self.cap >= 1, "cap", "must be at least 1")?;
        check(self.max_component >= 1, "max_component", "must be at least 1")?;
        check(self.samples >= 1, "samples", "must be at least 1")?;
        check(self.replicates >= 1, "replicates", "must be at least 1")?;
        let needs_torus = !matches!(self.experiment, ExperimentKind::ThetaGrid);
        if needs_torus && self.window != WindowShape::Torus {
            return Err(range("window", format!("{} runs on a torus", self.experiment)));
        }
        if !needs_torus && self.window != WindowShape::Ball {
            return Err(range("window", format!("{} runs on a free ball", self.experiment)));
        }
        let smallest_side = match self.experiment {
            ExperimentKind::HugeScan | ExperimentKind::Shield => {
                self.side_factor * f64::from(*self.a_values.iter().min().unwrap_or(&1))
            }
            _ => self.side,
        };
        if needs_torus && smallest_side <= 4.0 * self.radius_max {
            return Err(range("radius_max", format!("torus side {smallest_side} must exceed 4 x radius_max")));
        }
        Ok(())
    }
}

/// Key-value pairs of a configuration text with their line numbers.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String, usize)>, ConfigError> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: raw.trim().into() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line, text: raw.trim().into() });
        }
        if let Some((_, _, first)) = out.iter().find(|(key, _, _)| key == k) {
            return Err(ConfigError::Duplicate { key: k.into(), line, first: *first });
        }
        out.push((k.into(), v.into(), line));
    }
    Ok(out)
}

/// Parses `text`, applies `overrides` (command-line pairs, reported as
/// line 0) on top and validates the result. `experiment` is taken from the
/// overrides first, then from the text.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig, ConfigError> {
    let pairs = parse_pairs(text)?;
    for (k, _, line) in &pairs {
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::Unknown { key: k.clone(), line: *line });
        }
    }
    let mut seen = std::collections::HashSet::new();
    for (k, _) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::Unknown { key: k.clone(), line: 0 });
        }
        if !seen.insert(k.as_str()) {
            return Err(ConfigError::Duplicate { key: k.clone(), line: 0, first: 0 });
        }
    }
    let experiment = overrides
        .iter()
        .find(|(k, _)| k == "experiment")
        .map(|(_, v)| v.as_str())
        .or_else(|| pairs.iter().find(|(k, _, _)| k == "experiment").map(|(_, v, _)| v.as_str()))
        .ok_or(ConfigError::Missing("experiment"))?
        .parse()?;
    let mut config = ExperimentConfig::defaults(experiment);
    let mut lines = BTreeMap::new();
    for (k, v, line) in &pairs {
        if k != "experiment" {
            config.set(k, v, *line)?;
            lines.insert(k.clone(), *line);
        }
    }
    for (k, v) in overrides {
        if k != "experiment" {
            config.set(k, v, 0)?;
            lines.insert(k.clone(), 0);
        }
    }
    for required in ["replicates", "master_seed", "out"] {
        if !lines.contains_key(required) {
            return Err(ConfigError::Missing(required));
        }
    }
    config.validate(&lines)?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn required() -> Vec<(String, String)> {
        cli(&[("experiment", "sandwich"), ("replicates", "3"), ("master_seed", "7"), ("out", "/tmp/x")])
    }

    #[test]
    fn empty_file_with_required_flags() {
        let c = parse_config("", &required()).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Sandwich);
        assert_eq!(c.replicates, 3);
        assert_eq!(c.seed_intensities, vec![1.0, 0.25, 0.0625]);
    }

    #[test]
    fn zero_replicates_rejected() {
        let mut o = required();
        o[1].1 = "0".into();
        assert!(matches!(parse_config("", &o), Err(ConfigError::Range { key, .. }) if key == "replicates"));
    }

    #[test]
    fn duplicate_key_names_line() {
        let err = parse_config("intensity = 1\n# note\nintensity = 2\n", &required()).unwrap_err();
        assert_eq!(err, ConfigError::Duplicate { key: "intensity".into(), line: 3, first: 1 });
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let err = parse_config("\nintensty = 1\n", &required()).unwrap_err();
        assert_eq!(err, ConfigError::Unknown { key: "intensty".into(), line: 2 });
        let err = parse_config("cap = many\n", &required()).unwrap_err();
        assert!(matches!(err, ConfigError::Type { ref key, line: 1, .. } if key == "cap"), "{err}");
        let err = parse_config("just words\n", &required()).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn command_line_overrides_file() {
        let mut o = required();
        o.push(("intensity".into(), "0.7".into()));
        let c = parse_config("intensity = 0.2 # low\n", &o).unwrap();
        assert_eq!(c.intensity, 0.7);
    }

    #[test]
    fn missing_required_key() {
        let o = cli(&[("experiment", "sandwich"), ("replicates", "3"), ("out", "x")]);
        assert_eq!(parse_config("", &o), Err(ConfigError::Missing("master_seed")));
    }

    #[test]
    fn window_must_fit_experiment() {
        let mut o = required();
        o.push(("window".into(), "ball".into()));
        assert!(parse_config("", &o).is_err());
        let o = cli(&[("experiment", "theta-grid"), ("replicates", "1"), ("master_seed", "1"), ("out", "o")]);
        assert_eq!(parse_config("", &o).unwrap().window, WindowShape::Ball);
    }

    #[test]
    fn serialization_round_trip() {
        for e in ExperimentKind::ALL {
            let mut o = required();
            o[0].1 = e.name().into();
            o.push(("m".into(), "2.5".into()));
            o.push(("weight".into(), "exp:3".into()));
            let c = parse_config("", &o).unwrap();
            assert_eq!(parse_config(&c.serialize(), &[]).unwrap(), c);
        }
    }
}
