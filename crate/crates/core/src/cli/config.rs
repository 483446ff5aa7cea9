//! Flat `key = value` scenario files.
//!
//! ```text
//! # Fig.-2 style sweep
//! alpha  = 0.2
//! snr    = 0:2:40 dB
//! delta  = 0, 0.01, 0.02, 0.05, 0.1
//! sigma1 = 10 dB
//! sigma2 = 0 dB
//! trials = 1e7
//! seed   = 42
//! ```
//!
//! Lists are comma separated; `start:step:stop` expands to an inclusive range.
//! A trailing `dB` marks a power quantity given in decibels, otherwise values
//! are linear. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::analytic::{FormulaMode, OperatingPoint};
use crate::channel::{db_to_linear, linear_to_db, FadingProfile};
use crate::montecarlo::{SystemConfig, DEFAULT_BLOCK_SIZE};

pub const REQUIRED_KEYS: [&str; 7] = ["alpha", "snr", "delta", "sigma1", "sigma2", "trials", "seed"];
pub const OPTIONAL_KEYS: [&str; 2] = ["block_size", "mode"];

/// Where a setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("command-line override"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<&'static str>),
    #[error("{origin}: unknown key `{key}` (known keys: {})", known_keys())]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: key `{key}` already set on {first}")]
    DuplicateKey { origin: Origin, key: String, first: Origin },
    #[error("{origin}: expected `key = value`, found `{text}`")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: bad value `{value}` for `{key}`: {reason}")]
    Malformed {
        origin: Origin,
        key: String,
        value: String,
        reason: String,
    },
    #[error("{origin}: alpha = {value} violates the SIC ordering constraint 0 < alpha < 0.5")]
    AlphaOutOfRange { origin: Origin, value: f64 },
    #[error("sigma1 ({sigma1} linear) must be at least sigma2 ({sigma2} linear): the near user has the stronger channel")]
    ChannelOrder { sigma1: f64, sigma2: f64 },
}

fn known_keys() -> String {
    REQUIRED_KEYS
        .iter()
        .chain(OPTIONAL_KEYS.iter())
        .copied()
        .collect::<Vec<_>>()
        .join(", ")
}

/// A scalar power quantity, remembering whether it was given in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub value: f64,
    pub db: bool,
}

impl Level {
    pub fn db(value: f64) -> Self {
        Level { value, db: true }
    }

    pub fn linear(value: f64) -> Self {
        Level { value, db: false }
    }

    pub fn to_linear(&self) -> f64 {
        if self.db {
            db_to_linear(self.value)
        } else {
            self.value
        }
    }

    pub fn to_db(&self) -> f64 {
        if self.db {
            self.value
        } else {
            linear_to_db(self.value)
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, if self.db { " dB" } else { "" })
    }
}

/// A list of power quantities sharing one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelList {
    pub values: Vec<f64>,
    pub db: bool,
}

impl LevelList {
    pub fn levels(&self) -> impl Iterator<Item = Level> + '_ {
        self.values.iter().map(|&value| Level { value, db: self.db })
    }
}

/// A cartesian sweep over `alpha × snr × delta` plus the simulation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub snr: LevelList,
    /// Estimation-error standard deviations `δ`.
    pub deltas: Vec<f64>,
    pub sigma1: Level,
    pub sigma2: Level,
    pub trials: u64,
    pub seed: u64,
    pub block_size: u64,
    pub mode: FormulaMode,
}

/// Which parameter varies fastest in [`SweepSpec::system_configs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Snr,
    Alpha,
}

impl SweepSpec {
    pub fn profile(&self, delta: f64) -> crate::Result<FadingProfile> {
        FadingProfile::new(self.sigma1.to_linear(), self.sigma2.to_linear(), delta * delta)
    }

    /// One simulation config per grid point. With [`SweepAxis::Snr`] the
    /// order is alpha, delta, snr (snr fastest); with [`SweepAxis::Alpha`] it
    /// is snr, delta, alpha.
    pub fn system_configs(&self, axis: SweepAxis) -> crate::Result<Vec<(Level, SystemConfig)>> {
        let block = self.block_size.min(self.trials);
        let make = |alpha: f64, snr: Level, delta: f64| -> crate::Result<(Level, SystemConfig)> {
            let pt = OperatingPoint::new(alpha, snr.to_linear(), self.profile(delta)?)?;
            let cfg = SystemConfig::with_block_size(pt, self.trials, self.seed, block)?.with_mode(self.mode);
            Ok((snr, cfg))
        };
        let mut out = Vec::new();
        match axis {
            SweepAxis::Snr => {
                for &alpha in &self.alphas {
                    for &delta in &self.deltas {
                        for snr in self.snr.levels() {
                            out.push(make(alpha, snr, delta)?);
                        }
                    }
                }
            }
            SweepAxis::Alpha => {
                for snr in self.snr.levels() {
                    for &delta in &self.deltas {
                        for &alpha in &self.alphas {
                            out.push(make(alpha, snr, delta)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Serialises back into the config format; parsing the result yields an
    /// identical spec.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let unit = |db: bool| if db { " dB" } else { "" };
        format!(
            "alpha = {}\nsnr = {}{}\ndelta = {}\nsigma1 = {}\nsigma2 = {}\ntrials = {}\nseed = {}\nblock_size = {}\nmode = {}\n",
            list(&self.alphas),
            list(&self.snr.values),
            unit(self.snr.db),
            list(&self.deltas),
            self.sigma1,
            self.sigma2,
            self.trials,
            self.seed,
            self.block_size,
            self.mode,
        )
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_overrides(text, &[])
    }

    /// Parses `text`, then applies `overrides` on top (later wins).
    pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, (Origin, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let origin = Origin::Line(idx + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    origin,
                    text: line.to_string(),
                });
            };
            let key = key.trim().to_ascii_lowercase();
            check_known(&key, origin)?;
            if let Some((first, _)) = entries.get(&key) {
                return Err(ConfigError::DuplicateKey {
                    origin,
                    key,
                    first: *first,
                });
            }
            entries.insert(key, (origin, value.trim().to_string()));
        }
        for (key, value) in overrides {
            let key = key.trim().to_ascii_lowercase();
            check_known(&key, Origin::Override)?;
            entries.insert(key, (Origin::Override, value.trim().to_string()));
        }

        let missing: Vec<&'static str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|k| !entries.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            return Err(ConfigError::MissingKeys(missing));
        }
        let get = |k: &'static str| {
            let (origin, value) = &entries[k];
            Field { key: k, origin: *origin, value }
        };

        let alpha_field = get("alpha");
        let alphas = alpha_field.linear_list()?;
        if let Some(&bad) = alphas.iter().find(|a| !(**a > 0.0 && **a < 0.5)) {
            return Err(ConfigError::AlphaOutOfRange {
                origin: alpha_field.origin,
                value: bad,
            });
        }

        let snr_field = get("snr");
        let snr = snr_field.level_list()?;
        if !snr.db {
            if let Some(&bad) = snr.values.iter().find(|v| !(**v > 0.0)) {
                return Err(snr_field.malformed(format!("linear SNR {bad} must be positive")));
            }
        }

        let delta_field = get("delta");
        let deltas = delta_field.linear_list()?;
        if deltas.iter().any(|d| *d < 0.0) {
            return Err(delta_field.malformed("delta is a standard deviation and must be >= 0".into()));
        }

        let sigma1 = get("sigma1").positive_level()?;
        let sigma2 = get("sigma2").positive_level()?;
        if sigma1.to_linear() < sigma2.to_linear() {
            return Err(ConfigError::ChannelOrder {
                sigma1: sigma1.to_linear(),
                sigma2: sigma2.to_linear(),
            });
        }

        let trials = get("trials").count()?;
        let seed = get("seed").integer()?;
        let block_size = match entries.get("block_size") {
            Some((origin, value)) => Field { key: "block_size", origin: *origin, value }.count()?,
            None => DEFAULT_BLOCK_SIZE,
        }
        .min(trials);
        let mode = match entries.get("mode") {
            Some((origin, value)) => {
                let f = Field { key: "mode", origin: *origin, value };
                value.parse::<FormulaMode>().map_err(|reason| f.malformed(reason))?
            }
            None => FormulaMode::default(),
        };

        Ok(SweepSpec {
            alphas,
            snr,
            deltas,
            sigma1,
            sigma2,
            trials,
            seed,
            block_size,
            mode,
        })
    }
}

fn check_known(key: &str, origin: Origin) -> Result<(), ConfigError> {
    if REQUIRED_KEYS.contains(&key) || OPTIONAL_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey {
            origin,
            key: key.to_string(),
        })
    }
}

/// Reads and parses a config file.
pub fn parse_config(path: &Path) -> Result<SweepSpec, ConfigError> {
    parse_config_with_overrides(path, &[])
}

pub fn parse_config_with_overrides(path: &Path, overrides: &[(String, String)]) -> Result<SweepSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    SweepSpec::parse_with_overrides(&text, overrides)
}

struct Field<'a> {
    key: &'a str,
    origin: Origin,
    value: &'a str,
}

impl Field<'_> {
    fn malformed(&self, reason: String) -> ConfigError {
        ConfigError::Malformed {
            origin: self.origin,
            key: self.key.to_string(),
            value: self.value.to_string(),
            reason,
        }
    }

    /// Splits off a trailing `dB` unit.
    fn unit(&self) -> (&str, bool) {
        let v = self.value.trim();
        let lower = v.to_ascii_lowercase();
        if lower.ends_with("db") {
            (v[..v.len() - 2].trim_end(), true)
        } else {
            (v, false)
        }
    }

    fn list(&self, body: &str) -> Result<Vec<f64>, ConfigError> {
        let mut out = Vec::new();
        for item in body.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(self.malformed("empty list item".into()));
            }
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                [single] => out.push(self.number(single)?),
                [start, step, stop] => {
                    let (start, step, stop) = (self.number(start)?, self.number(step)?, self.number(stop)?);
                    out.extend(self.range(start, step, stop)?);
                }
                _ => return Err(self.malformed(format!("`{item}` is neither a number nor start:step:stop"))),
            }
        }
        Ok(out)
    }

    fn range(&self, start: f64, step: f64, stop: f64) -> Result<Vec<f64>, ConfigError> {
        if !(step > 0.0) || stop < start {
            return Err(self.malformed("range needs step > 0 and stop >= start".into()));
        }
        let n = ((stop - start) / step + 1e-9).floor() as u64;
        if n > 100_000 {
            return Err(self.malformed(format!("range expands to {} points", n + 1)));
        }
        // snap to 12 decimals so 0.01:0.01:0.49 yields 0.03, not 0.030000000000000002
        Ok((0..=n)
            .map(|i| {
                let v = start + i as f64 * step;
                format!("{v:.12}").parse::<f64>().unwrap_or(v)
            })
            .collect())
    }

    fn number(&self, s: &str) -> Result<f64, ConfigError> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.malformed(format!("`{}` is not a finite number", s.trim()))),
        }
    }

    fn linear_list(&self) -> Result<Vec<f64>, ConfigError> {
        let (body, db) = self.unit();
        if db {
            return Err(self.malformed(format!("`{}` is not a power quantity; dB is not allowed", self.key)));
        }
        self.list(body)
    }

    fn level_list(&self) -> Result<LevelList, ConfigError> {
        let (body, db) = self.unit();
        Ok(LevelList {
            values: self.list(body)?,
            db,
        })
    }

    fn positive_level(&self) -> Result<Level, ConfigError> {
        let (body, db) = self.unit();
        let value = self.number(body)?;
        if !db && !(value > 0.0) {
            return Err(self.malformed("linear channel power must be positive".into()));
        }
        Ok(Level { value, db })
    }

    /// Positive integer; scientific notation such as `1e7` is accepted.
    fn count(&self) -> Result<u64, ConfigError> {
        let v = self.number(self.value)?;
        if v < 1.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
            return Err(self.malformed("expected a positive integer".into()));
        }
        Ok(v as u64)
    }

    fn integer(&self) -> Result<u64, ConfigError> {
        self.value
            .trim()
            .parse::<u64>()
            .map_err(|e| self.malformed(format!("expected an unsigned 64-bit integer ({e})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "alpha = 0.2\nsnr = 0:2:40 dB\ndelta = 0,0.01,0.02,0.05,0.1\nsigma1 = 10 dB\nsigma2 = 0 dB\ntrials = 1e7\nseed = 42\n";

    #[test]
    fn parses_figure_two_sweep() {
        let spec = SweepSpec::parse_str(FIG2).unwrap();
        assert_eq!(spec.alphas, vec![0.2]);
        assert!(spec.snr.db);
        assert_eq!(spec.snr.values.len(), 21);
        assert_eq!(spec.snr.values[20], 40.0);
        assert_eq!(spec.deltas, vec![0.0, 0.01, 0.02, 0.05, 0.1]);
        assert_eq!(spec.sigma1, Level::db(10.0));
        assert_eq!(spec.sigma1.to_linear(), 10.0);
        assert_eq!(spec.sigma2.to_linear(), 1.0);
        assert_eq!(spec.trials, 10_000_000);
        assert_eq!(spec.seed, 42);
        assert_eq!(spec.block_size, DEFAULT_BLOCK_SIZE);
        assert_eq!(spec.mode, FormulaMode::AsDerived);
        assert_eq!(spec.system_configs(SweepAxis::Snr).unwrap().len(), 105);
    }

    #[test]
    fn rejects_alpha_above_half() {
        let text = FIG2.replace("alpha = 0.2", "alpha = 0.6");
        match SweepSpec::parse_str(&text) {
            Err(ConfigError::AlphaOutOfRange { origin, value }) => {
                assert_eq!(origin, Origin::Line(1));
                assert_eq!(value, 0.6);
            }
            other => panic!("{other:?}"),
        }
        let msg = SweepSpec::parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("0 < alpha < 0.5"), "{msg}");
    }

    #[test]
    fn empty_file_lists_all_required_keys() {
        match SweepSpec::parse_str("") {
            Err(ConfigError::MissingKeys(keys)) => assert_eq!(keys, REQUIRED_KEYS.to_vec()),
            other => panic!("{other:?}"),
        }
        let msg = SweepSpec::parse_str("# nothing\n").unwrap_err().to_string();
        for k in REQUIRED_KEYS {
            assert!(msg.contains(k));
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{FIG2}\n\nsnr_max = 3\n");
        match SweepSpec::parse_str(&text) {
            Err(ConfigError::UnknownKey { origin, key }) => {
                assert_eq!(origin, Origin::Line(10));
                assert_eq!(key, "snr_max");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distinct_diagnostics() {
        let swapped = FIG2.replace("sigma1 = 10 dB", "sigma1 = -3 dB");
        assert!(matches!(SweepSpec::parse_str(&swapped), Err(ConfigError::ChannelOrder { .. })));
        let bad = FIG2.replace("seed = 42", "seed = forty-two");
        assert!(matches!(SweepSpec::parse_str(&bad), Err(ConfigError::Malformed { .. })));
        let dup = format!("{FIG2}seed = 1\n");
        assert!(matches!(SweepSpec::parse_str(&dup), Err(ConfigError::DuplicateKey { .. })));
        let syntax = format!("{FIG2}oops\n");
        assert!(matches!(SweepSpec::parse_str(&syntax), Err(ConfigError::Syntax { .. })));
        let frac = FIG2.replace("trials = 1e7", "trials = 10.5");
        assert!(matches!(SweepSpec::parse_str(&frac), Err(ConfigError::Malformed { .. })));
        let db_alpha = FIG2.replace("alpha = 0.2", "alpha = -7 dB");
        assert!(matches!(SweepSpec::parse_str(&db_alpha), Err(ConfigError::Malformed { .. })));
        let neg_delta = FIG2.replace("delta = 0,", "delta = -0.1,");
        assert!(matches!(SweepSpec::parse_str(&neg_delta), Err(ConfigError::Malformed { .. })));
    }

    #[test]
    fn comments_linear_values_and_optional_keys() {
        let text = "# scenario\nalpha = 0.1, 0.2 # two splits\nsnr = 100\ndelta = 0.05\nsigma1 = 1\nsigma2 = 1\ntrials = 5000\nseed = 7\nmode = printed\nblock_size = 100\n";
        let spec = SweepSpec::parse_str(text).unwrap();
        assert_eq!(spec.alphas, vec![0.1, 0.2]);
        assert_eq!(spec.snr, LevelList { values: vec![100.0], db: false });
        assert_eq!(spec.block_size, 100);
        assert_eq!(spec.mode, FormulaMode::AsPrinted);
        assert!((spec.snr.levels().next().unwrap().to_db() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn overrides_replace_file_values() {
        let o = vec![("trials".to_string(), "1000".to_string()), ("seed".to_string(), "9".to_string())];
        let spec = SweepSpec::parse_with_overrides(FIG2, &o).unwrap();
        assert_eq!((spec.trials, spec.seed, spec.block_size), (1000, 9, 1000));
        let bad = vec![("nonsense".to_string(), "1".to_string())];
        assert!(matches!(
            SweepSpec::parse_with_overrides(FIG2, &bad),
            Err(ConfigError::UnknownKey { origin: Origin::Override, .. })
        ));
    }

    #[test]
    fn range_snaps_decimal_steps() {
        let text = FIG2.replace("alpha = 0.2", "alpha = 0.01:0.01:0.49");
        let spec = SweepSpec::parse_str(&text).unwrap();
        assert_eq!(spec.alphas.len(), 49);
        assert_eq!(spec.alphas[2], 0.03);
        assert_eq!(spec.alphas[48], 0.49);
    }

    #[test]
    fn round_trip() {
        for text in [FIG2.to_string(), FIG2.replace("alpha = 0.2", "alpha = 0.01:0.01:0.49")] {
            let spec = SweepSpec::parse_str(&text).unwrap();
            let again = SweepSpec::parse_str(&spec.to_config_string()).unwrap();
            assert_eq!(spec, again);
        }
    }

    #[test]
    fn alpha_axis_ordering() {
        let text = FIG2.replace("alpha = 0.2", "alpha = 0.1, 0.2").replace("0:2:40 dB", "10, 20 dB");
        let spec = SweepSpec::parse_str(&text).unwrap();
        let cfgs = spec.system_configs(SweepAxis::Alpha).unwrap();
        assert_eq!(cfgs.len(), 20);
        assert_eq!(cfgs[0].1.point.alpha(), 0.1);
        assert_eq!(cfgs[1].1.point.alpha(), 0.2);
        assert_eq!(cfgs[0].0, Level::db(10.0));
        assert_eq!(cfgs[19].0, Level::db(20.0));
    }
}
