//! Simulation parameters and their flat `key = value` file format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Uniformly random in `[0, width] × [0, height] × [0, depth]`.
    Uniform {
        width: f64,
        height: f64,
        depth: f64,
    },
    Explicit(Vec<Point>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mobility {
    None,
    /// Straight legs of random heading and length at constant speed,
    /// reflecting off the placement bounds.
    RandomWalk {
        speed: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub devices: usize,
    pub placement: Placement,
    pub range: f64,
    pub period: f64,
    pub jitter: f64,
    pub retention: f64,
    pub mobility: Mobility,
    pub duration: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            devices: 10,
            placement: Placement::Uniform {
                width: 100.0,
                height: 100.0,
                depth: 0.0,
            },
            range: 30.0,
            period: 1.0,
            jitter: 0.0,
            retention: 2.5,
            mobility: Mobility::None,
            duration: 10.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl SimConfig {
    /// Fixed device positions; the device count follows.
    pub fn with_positions(mut self, points: Vec<Point>) -> Self {
        self.devices = points.len();
        self.placement = Placement::Explicit(points);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.range > 0.0) {
            return bad("range must be positive");
        }
        if !(self.period > 0.0) {
            return bad("period must be positive");
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return bad("jitter must lie in [0, 1)");
        }
        if !(self.retention >= self.period) {
            return bad("retention must be at least the period");
        }
        if !(self.duration >= 0.0) {
            return bad("duration must be non-negative");
        }
        match &self.placement {
            Placement::Explicit(p) if p.len() != self.devices => {
                bad("number of positions differs from the device count")
            }
            Placement::Uniform {
                width,
                height,
                depth,
            } if !(*width >= 0.0 && *height >= 0.0 && *depth >= 0.0) => {
                bad("placement area must have non-negative sides")
            }
            _ => match self.mobility {
                Mobility::RandomWalk { speed } if !(speed >= 0.0) => {
                    bad("speed must be non-negative")
                }
                _ => Ok(()),
            },
        }
    }

    /// Bounds used for reflection under mobility.
    pub fn bounds(&self) -> Point {
        match &self.placement {
            Placement::Uniform {
                width,
                height,
                depth,
            } => Point::new3(*width, *height, *depth),
            Placement::Explicit(points) => points.iter().fold(Point::default(), |b, p| {
                Point::new3(b.x.max(p.x), b.y.max(p.y), b.z.max(p.z))
            }),
        }
    }
}

/// Parsed `key = value` pairs in file order, later keys overriding earlier.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    pub entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("expected `key = value`, found `{line}`"),
                });
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: "empty key".into(),
                });
            }
            entries.insert(key.to_string(), v.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get_parsed(key)?.unwrap_or(default))
    }

    /// Renders the pairs back to the file format, sorted by key.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

/// Keys read by [`sim_config`]; everything else is left to the caller.
pub const SIM_KEYS: &[&str] = &[
    "devices",
    "width",
    "height",
    "depth",
    "positions",
    "range",
    "period",
    "jitter",
    "retention",
    "mobility",
    "speed",
    "duration",
    "seed",
];

fn parse_positions(text: &str) -> Result<Vec<Point>, ConfigError> {
    let bad = |m: String| ConfigError::Value {
        key: "positions".into(),
        message: m,
    };
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let c: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| bad(format!("`{p}`: {e}")))?;
            match c[..] {
                [x, y] => Ok(Point::new(x, y)),
                [x, y, z] => Ok(Point::new3(x, y, z)),
                _ => Err(bad(format!("`{p}` is not a 2D or 3D point"))),
            }
        })
        .collect()
}

/// Builds a configuration from parsed pairs, starting from defaults.
pub fn sim_config(kv: &KeyValues) -> Result<SimConfig, ConfigError> {
    let d = SimConfig::default();
    let period = kv.get_or("period", d.period)?;
    let mut cfg = SimConfig {
        devices: kv.get_or("devices", d.devices)?,
        placement: Placement::Uniform {
            width: kv.get_or("width", 100.0)?,
            height: kv.get_or("height", 100.0)?,
            depth: kv.get_or("depth", 0.0)?,
        },
        range: kv.get_or("range", d.range)?,
        period,
        jitter: kv.get_or("jitter", d.jitter)?,
        retention: kv.get_or("retention", 2.5 * period)?,
        mobility: match kv.get("mobility").unwrap_or("none") {
            "none" => Mobility::None,
            "random_walk" => Mobility::RandomWalk {
                speed: kv.get_or("speed", 1.0)?,
            },
            other => {
                return Err(ConfigError::Value {
                    key: "mobility".into(),
                    message: format!("expected `none` or `random_walk`, found `{other}`"),
                })
            }
        },
        duration: kv.get_or("duration", d.duration)?,
        seed: kv.get_or("seed", d.seed)?,
    };
    if let Some(p) = kv.get("positions") {
        cfg = cfg.with_positions(parse_positions(p)?);
    }
    cfg.validate()?;
    Ok(cfg)
}
