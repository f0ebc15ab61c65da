//! Flat key=value run configuration with section headers, plus the named
//! presets encoding the reference parameter sets.
//!
//! Units on input follow the spectroscopy convention: `*_mhz` and `*_ghz`
//! keys are frequencies divided by 2 pi (so `omega_c_mhz = 3.6` means
//! `omega_c = 2 pi x 3.6e6 rad/s`); temperatures are in microkelvin, times
//! in the unit named by the key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use tsd_core::qmodel::{GateChannelConfig, Interaction, Sign};
use tsd_core::sequence::{Case2FlipScope, CaseId};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed or unknown key; carries the offending key name.
    Key(String),
    Io(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Key(k) => write!(f, "configuration error at key `{k}`"),
            ConfigError::Io(e) => write!(f, "cannot read configuration: {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Control Rabi frequency, rad/s.
    pub omega_c: f64,
    /// Target Rabi frequency, rad/s; `None` selects `sqrt(6)/2 omega_c`.
    pub omega_t: Option<f64>,
    pub allow_ratio_override: bool,
    pub interaction: Interaction<f64>,
    /// Phase-change gap, seconds.
    pub epsilon: f64,
    pub case: CaseId,
    pub case2_flip: Case2FlipScope,
    pub target2_k_sign: Sign,
    /// Single-run velocities, m/s.
    pub v_c: f64,
    pub v_t: f64,
    /// Single ensemble temperature (kelvin) for cnot/bell.
    pub temperature: Option<f64>,
    /// Sweep axes.
    pub temperatures: Vec<f64>,
    pub interactions: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub taus: Vec<f64>,
    pub grid_points: usize,
    pub v_max: f64,
    pub samples_per_pulse: usize,
    pub out_dir: PathBuf,
    pub traces: bool,
    pub workers: usize,
    /// Stark solver inputs.
    pub omega_q: f64,
    pub c_factor_sq: Option<f64>,
    pub rabi1: Option<f64>,
    pub rabi2: Option<f64>,
    /// Name of the applied preset, recorded in CSV headers.
    pub preset: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega_c: TWO_PI * 3.6e6,
            omega_t: None,
            allow_ratio_override: false,
            interaction: Interaction::Finite(TWO_PI * 500e6),
            epsilon: 0.0,
            case: CaseId::One,
            case2_flip: Case2FlipScope::TargetOnly,
            target2_k_sign: Sign::Plus,
            v_c: 0.0,
            v_t: 0.0,
            temperature: None,
            temperatures: vec![5e-6, 10e-6, 15e-6, 20e-6, 50e-6],
            interactions: [50.0, 100.0, 200.0, 300.0, 400.0]
                .iter()
                .map(|v| TWO_PI * v * 1e6)
                .collect(),
            sigmas: vec![0.01, 0.02, 0.03, 0.04, 0.05],
            taus: vec![400e-6, 150e-6],
            grid_points: 101,
            v_max: 0.5,
            samples_per_pulse: 512,
            out_dir: PathBuf::from("out"),
            traces: false,
            workers: 0,
            omega_q: tsd_core::stark::cesium_omega_q(),
            c_factor_sq: None,
            rabi1: None,
            rabi2: None,
            preset: None,
        }
    }
}

impl RunConfig {
    pub fn gate_config(&self) -> Result<GateChannelConfig<f64>, tsd_core::Error> {
        let cfg = match self.omega_t {
            Some(omega_t) => {
                GateChannelConfig::symmetric(self.omega_c, omega_t, self.interaction)?
            }
            None => GateChannelConfig::design(self.omega_c, self.interaction)?,
        };
        Ok(cfg.with_target2_k_sign(self.target2_k_sign))
    }

    /// The design-ratio check is skipped when the override flag is set.
    pub fn enforce_ratio(&self) -> bool {
        !self.allow_ratio_override
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for raw in text.lines() {
            let line = strip_comment(raw).trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Key(line.to_string()))?;
            self.apply_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Apply one `key=value` setting (sections are flat: keys are unique
    /// across sections).
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::Key(key.to_string());
        match key {
            "omega_c_mhz" => self.omega_c = TWO_PI * 1e6 * parse_f64(key, value)?,
            "omega_t_mhz" => self.omega_t = Some(TWO_PI * 1e6 * parse_f64(key, value)?),
            "allow_ratio_override" => self.allow_ratio_override = parse_bool(key, value)?,
            "interaction_mhz" => {
                self.interaction = if value.eq_ignore_ascii_case("inf")
                    || value.eq_ignore_ascii_case("infinite")
                {
                    Interaction::InfiniteBlockade
                } else {
                    Interaction::Finite(TWO_PI * 1e6 * parse_f64(key, value)?)
                }
            }
            "epsilon_ns" => self.epsilon = 1e-9 * parse_f64(key, value)?,
            "case" => {
                self.case = match value {
                    "1" => CaseId::One,
                    "2" => CaseId::Two,
                    _ => return Err(bad()),
                }
            }
            "case2_flip" => {
                self.case2_flip = match value {
                    "target-only" => Case2FlipScope::TargetOnly,
                    "all" => Case2FlipScope::AllChannels,
                    _ => return Err(bad()),
                }
            }
            "target2_k_sign" => {
                self.target2_k_sign = match value {
                    "+1" | "1" => Sign::Plus,
                    "-1" => Sign::Minus,
                    _ => return Err(bad()),
                }
            }
            "v_c" => self.v_c = parse_f64(key, value)?,
            "v_t" => self.v_t = parse_f64(key, value)?,
            "temperature_uk" => self.temperature = Some(1e-6 * parse_f64(key, value)?),
            "temperatures_uk" => {
                self.temperatures =
                    parse_list(key, value)?.iter().map(|t| t * 1e-6).collect()
            }
            "interactions_mhz" => {
                self.interactions =
                    parse_list(key, value)?.iter().map(|v| TWO_PI * v * 1e6).collect()
            }
            "sigmas_pct" => {
                self.sigmas = parse_list(key, value)?.iter().map(|s| s / 100.0).collect()
            }
            "taus_us" => self.taus = parse_list(key, value)?.iter().map(|t| t * 1e-6).collect(),
            "grid_points" => self.grid_points = parse_f64(key, value)? as usize,
            "v_max" => self.v_max = parse_f64(key, value)?,
            "samples_per_pulse" => self.samples_per_pulse = parse_f64(key, value)? as usize,
            "dir" => self.out_dir = PathBuf::from(value),
            "traces" => self.traces = parse_bool(key, value)?,
            "workers" => self.workers = parse_f64(key, value)? as usize,
            "species" => {
                self.omega_q = match value {
                    "cesium" => tsd_core::stark::cesium_omega_q(),
                    "rubidium" => tsd_core::stark::rubidium87_omega_q(),
                    _ => return Err(bad()),
                }
            }
            "omega_q_ghz" => self.omega_q = TWO_PI * 1e9 * parse_f64(key, value)?,
            "c_factor_sq" => self.c_factor_sq = Some(parse_f64(key, value)?),
            "rabi1_mhz" => self.rabi1 = Some(TWO_PI * 1e6 * parse_f64(key, value)?),
            "rabi2_mhz" => self.rabi2 = Some(TWO_PI * 1e6 * parse_f64(key, value)?),
            _ => return Err(bad()),
        }
        Ok(())
    }

    /// Apply a named preset. The `table*`, `worstcase`, `fig4` and `decay`
    /// presets pin the reference parameter sets; `ideal` is the exact
    /// blockaded zero-velocity protocol.
    pub fn apply_preset(&mut self, name: &str) -> Result<(), ConfigError> {
        let known = preset_settings(name).ok_or_else(|| ConfigError::Key(name.to_string()))?;
        for (key, value) in known {
            self.apply_key(&key, &value)?;
        }
        self.preset = Some(name.to_string());
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::Key(key.to_string()))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError::Key(key.to_string())),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| ConfigError::Key(key.to_string())))
        .collect()
}

/// Key-value settings of a named preset, or `None` when unknown.
fn preset_settings(name: &str) -> Option<Vec<(String, String)>> {
    let kv = |pairs: &[(&str, &str)]| {
        Some(pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    };
    match name {
        "ideal" => kv(&[
            ("omega_c_mhz", "3.6"),
            ("interaction_mhz", "inf"),
            ("epsilon_ns", "0"),
            ("case", "1"),
        ]),
        "fig4" => kv(&[
            ("omega_c_mhz", "3.6"),
            ("interaction_mhz", "500"),
            ("sigmas_pct", "1,2,3,4,5"),
        ]),
        "decay" => kv(&[
            ("omega_c_mhz", "3.6"),
            ("interaction_mhz", "500"),
            ("taus_us", "400,150"),
        ]),
        "table5" => kv(&[
            ("omega_c_mhz", "3.6"),
            ("case", "1"),
            ("interactions_mhz", "50,100,200,300,400"),
            ("temperatures_uk", "5,10,15,20,50"),
        ]),
        "cesium" => kv(&[("species", "cesium")]),
        "rubidium" => kv(&[("species", "rubidium")]),
        _ => {
            // table2-case{1|2}-{T}uK, table3-case{1|2}-{T}uK, worstcase-{T}uK
            let mut base: Vec<(String, String)> = [
                ("omega_c_mhz", "3.6"),
                ("interaction_mhz", "500"),
                ("epsilon_ns", "0"),
            ]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
            let (stem, temp) = name.rsplit_once('-')?;
            let temp_uk = temp.strip_suffix("uK")?.parse::<f64>().ok()?;
            if ![5.0, 10.0, 15.0, 20.0, 50.0].contains(&temp_uk) {
                return None;
            }
            base.push(("temperature_uk".into(), format!("{temp_uk}")));
            match stem {
                "table2-case1" | "table3-case1" => base.push(("case".into(), "1".into())),
                "table2-case2" | "table3-case2" => base.push(("case".into(), "2".into())),
                "worstcase" => {
                    base.push(("case".into(), "1".into()));
                    base.push(("target2_k_sign".into(), "-1".into()));
                }
                _ => return None,
            }
            Some(base)
        }
    }
}

/// All presets exercised by the test-suite; kept sorted for stable help text.
pub fn known_presets() -> Vec<String> {
    let mut names = vec![
        "ideal".to_string(),
        "fig4".to_string(),
        "decay".to_string(),
        "table5".to_string(),
        "cesium".to_string(),
        "rubidium".to_string(),
    ];
    for t in [5, 10, 15, 20, 50] {
        for stem in ["table2-case1", "table2-case2", "table3-case1", "table3-case2", "worstcase"] {
            names.push(format!("{stem}-{t}uK"));
        }
    }
    names.sort();
    names
}

/// Parse trailing `key=value` overrides from the command line.
pub fn apply_overrides(cfg: &mut RunConfig, overrides: &[String]) -> Result<(), ConfigError> {
    for item in overrides {
        let (key, value) =
            item.split_once('=').ok_or_else(|| ConfigError::Key(item.clone()))?;
        cfg.apply_key(key.trim(), value.trim())?;
    }
    Ok(())
}

/// Stable listing of the effective settings, for run headers.
pub fn describe(cfg: &RunConfig) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    m.insert("omega_c_mhz", format!("{}", cfg.omega_c / TWO_PI / 1e6));
    m.insert(
        "interaction_mhz",
        match cfg.interaction {
            Interaction::Finite(v) => format!("{}", v / TWO_PI / 1e6),
            Interaction::InfiniteBlockade => "inf".to_string(),
        },
    );
    m.insert("epsilon_ns", format!("{}", cfg.epsilon * 1e9));
    m.insert("case", format!("{}", if cfg.case == CaseId::One { 1 } else { 2 }));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_lists() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# header\n[protocol]\nomega_c_mhz = 3.5\ninteraction_mhz = inf # blockaded\n\
             [ensemble]\ntemperatures_uk = 5, 10\n[output]\ndir = results\n",
        )
        .unwrap();
        assert!((cfg.omega_c - TWO_PI * 3.5e6).abs() < 1.0);
        assert!(matches!(cfg.interaction, Interaction::InfiniteBlockade));
        for (got, want) in cfg.temperatures.iter().zip([5e-6, 10e-6]) {
            assert!((got / want - 1.0).abs() < 1e-12);
        }
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
    }

    #[test]
    fn unknown_key_is_named() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_text("bogus_key = 3\n").unwrap_err();
        match err {
            ConfigError::Key(k) => assert_eq!(k, "bogus_key"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn presets_resolve() {
        for name in known_presets() {
            let mut cfg = RunConfig::default();
            cfg.apply_preset(&name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_preset("table2-case3-5uK").is_err());
        cfg.apply_preset("table2-case2-50uK").unwrap();
        assert_eq!(cfg.case, CaseId::Two);
        let t = cfg.temperature.unwrap();
        assert!((t / 50e-6 - 1.0).abs() < 1e-12);
    }
}
