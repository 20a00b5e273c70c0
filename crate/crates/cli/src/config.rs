//! Run configuration: a sectioned TOML file, `--set KEY=VALUE` overrides and
//! built-in defaults, resolved in the order defaults < file < flags.

use serde::Deserialize;
use toml::{Table, Value};
use twoway_cvqkd::analysis::{Configuration, SweepVariable};
use twoway_cvqkd::protocol::{AmplifierSpec, Detection, ProtocolParams};

use crate::error::{CliError, Result};

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("source", &["va", "vb", "ta", "beta"]),
    ("channel", &["loss_db_per_km", "distance_km", "excess_noise"]),
    ("detector", &["kind", "eta", "v_el"]),
    ("amplifier", &["kind", "gain", "noise"]),
    ("sweep", &["variable", "start", "stop", "step"]),
    (
        "surface",
        &["gain_start", "gain_stop", "gain_step", "distance_start", "distance_stop", "distance_step"],
    ),
    ("montecarlo", &["seed", "samples", "partitions"]),
];
const CONFIG_KEYS: &[&str] = &["label", "amplifier", "gain", "noise", "eta", "v_el"];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    source: RawSource,
    #[serde(default)]
    channel: RawChannel,
    #[serde(default)]
    detector: RawDetector,
    #[serde(default)]
    amplifier: RawAmplifier,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    surface: RawSurface,
    #[serde(default)]
    montecarlo: RawMonteCarlo,
    configs: Option<Vec<RawConfiguration>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    va: Option<f64>,
    vb: Option<f64>,
    ta: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    loss_db_per_km: Option<f64>,
    distance_km: Option<f64>,
    excess_noise: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    kind: Option<DetectionKind>,
    eta: Option<f64>,
    v_el: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DetectionKind {
    Homodyne,
    Heterodyne,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AmplifierKind {
    None,
    Psa,
    Pia,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAmplifier {
    kind: Option<AmplifierKind>,
    gain: Option<f64>,
    noise: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum VariableName {
    Distance,
    Gain,
    Noise,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Option<VariableName>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    gain_start: Option<f64>,
    gain_stop: Option<f64>,
    gain_step: Option<f64>,
    distance_start: Option<f64>,
    distance_stop: Option<f64>,
    distance_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonteCarlo {
    seed: Option<u64>,
    samples: Option<usize>,
    partitions: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfiguration {
    label: String,
    amplifier: AmplifierKind,
    gain: Option<f64>,
    noise: Option<f64>,
    eta: Option<f64>,
    v_el: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSettings {
    pub gains: (f64, f64, f64),
    pub distances: (f64, f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSettings {
    pub seed: u64,
    pub samples: usize,
    pub partitions: usize,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProtocolParams,
    pub sweep: SweepSettings,
    pub surface: SurfaceSettings,
    pub montecarlo: MonteCarloSettings,
    pub configurations: Vec<Configuration>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = ProtocolParams::default();
        Self {
            params,
            sweep: SweepSettings {
                variable: SweepVariable::Distance,
                start: 1.0,
                stop: 80.0,
                step: 1.0,
            },
            surface: SurfaceSettings {
                gains: (2.0, 20.0, 1.0),
                distances: (5.0, 80.0, 5.0),
            },
            montecarlo: MonteCarloSettings {
                seed: 2024,
                samples: twoway_cvqkd::montecarlo::DEFAULT_SAMPLES,
                partitions: 8,
            },
            configurations: Configuration::default_set(params.detector.detection),
        }
    }
}

/// Splits `section.key=value`; the value is read as a TOML literal and
/// falls back to a bare string.
fn parse_override(raw: &str) -> Result<(String, String, Value)> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::BadOverride(raw.to_string()))?;
    let key = key.trim();
    let (section, field) = key
        .split_once('.')
        .ok_or_else(|| CliError::BadOverride(raw.to_string()))?;
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    Ok((section.to_string(), field.to_string(), parsed))
}

fn check_schema(table: &Table) -> Result<()> {
    for (section, value) in table {
        if section == "configs" {
            let entries = value.as_array().ok_or_else(|| CliError::TypeMismatch {
                key: "configs".into(),
                expected: "array of tables",
            })?;
            for entry in entries {
                let entry = entry.as_table().ok_or_else(|| CliError::TypeMismatch {
                    key: "configs".into(),
                    expected: "table",
                })?;
                if let Some(k) = entry.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
                    return Err(CliError::UnknownKey(format!("configs.{k}")));
                }
            }
            continue;
        }
        let keys = SCHEMA
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, k)| *k)
            .ok_or_else(|| CliError::UnknownKey(section.clone()))?;
        let fields = value.as_table().ok_or_else(|| CliError::TypeMismatch {
            key: section.clone(),
            expected: "section",
        })?;
        if let Some(k) = fields.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(CliError::UnknownKey(format!("{section}.{k}")));
        }
    }
    Ok(())
}

/// Resolves `text` (the contents of a config file, possibly empty) and the
/// `--set` overrides into a validated [`RunConfig`].
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    for raw in overrides {
        let (section, field, value) = parse_override(raw)?;
        let entry = table
            .entry(section.clone())
            .or_insert_with(|| Value::Table(Table::new()));
        let fields = entry.as_table_mut().ok_or_else(|| CliError::TypeMismatch {
            key: section.clone(),
            expected: "section",
        })?;
        fields.insert(field, value);
    }
    check_schema(&table)?;
    // Round-trip through text so type errors carry the offending key.
    let raw: RawFile = toml::from_str(&table.to_string()).map_err(|e| CliError::Parse(e.to_string()))?;
    resolve(raw)
}

fn resolve(raw: RawFile) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let p = &mut cfg.params;
    p.v_a = raw.source.va.unwrap_or(p.v_a);
    p.v_b = raw.source.vb.unwrap_or(p.v_b);
    p.t_a = raw.source.ta.unwrap_or(p.t_a);
    p.beta = raw.source.beta.unwrap_or(p.beta);
    p.channel.loss_db_per_km = raw.channel.loss_db_per_km.unwrap_or(p.channel.loss_db_per_km);
    p.channel.distance_km = raw.channel.distance_km.unwrap_or(p.channel.distance_km);
    p.channel.excess_noise = raw.channel.excess_noise.unwrap_or(p.channel.excess_noise);
    if let Some(kind) = raw.detector.kind {
        p.detector.detection = match kind {
            DetectionKind::Homodyne => Detection::Homodyne,
            DetectionKind::Heterodyne => Detection::Heterodyne,
        };
    }
    p.detector.efficiency = raw.detector.eta.unwrap_or(p.detector.efficiency);
    p.detector.electronic_noise = raw.detector.v_el.unwrap_or(p.detector.electronic_noise);
    p.amplifier = amplifier(
        raw.amplifier.kind.unwrap_or(AmplifierKind::None),
        raw.amplifier.gain,
        raw.amplifier.noise,
    );
    p.validate()?;

    if let Some(v) = raw.sweep.variable {
        cfg.sweep.variable = match v {
            VariableName::Distance => SweepVariable::Distance,
            VariableName::Gain => SweepVariable::Gain,
            VariableName::Noise => SweepVariable::InherentNoise,
        };
    }
    cfg.sweep.start = raw.sweep.start.unwrap_or(cfg.sweep.start);
    cfg.sweep.stop = raw.sweep.stop.unwrap_or(cfg.sweep.stop);
    cfg.sweep.step = raw.sweep.step.unwrap_or(cfg.sweep.step);

    let s = &raw.surface;
    let (g0, g1, gs) = cfg.surface.gains;
    cfg.surface.gains = (s.gain_start.unwrap_or(g0), s.gain_stop.unwrap_or(g1), s.gain_step.unwrap_or(gs));
    let (d0, d1, ds) = cfg.surface.distances;
    cfg.surface.distances = (
        s.distance_start.unwrap_or(d0),
        s.distance_stop.unwrap_or(d1),
        s.distance_step.unwrap_or(ds),
    );
    for (key, (start, stop, step)) in [("surface.gain", cfg.surface.gains), ("surface.distance", cfg.surface.distances)] {
        if !(step > 0.0 && start <= stop) {
            return Err(CliError::OutOfRange {
                key: format!("{key}_step"),
                value: step,
                constraint: "step > 0 and start <= stop".into(),
            });
        }
    }

    let mc = &mut cfg.montecarlo;
    mc.seed = raw.montecarlo.seed.unwrap_or(mc.seed);
    mc.samples = raw.montecarlo.samples.unwrap_or(mc.samples);
    mc.partitions = raw.montecarlo.partitions.unwrap_or(mc.partitions);
    for (key, value) in [("montecarlo.samples", mc.samples), ("montecarlo.partitions", mc.partitions)] {
        if value == 0 {
            return Err(CliError::OutOfRange {
                key: key.into(),
                value: 0.0,
                constraint: ">= 1".into(),
            });
        }
    }

    cfg.configurations = match raw.configs {
        Some(entries) => entries
            .into_iter()
            .map(|c| Configuration {
                label: c.label,
                amplifier: amplifier(c.amplifier, c.gain, c.noise),
                efficiency: c.eta,
                electronic_noise: c.v_el,
            })
            .collect(),
        None => Configuration::default_set(cfg.params.detector.detection),
    };
    for c in &cfg.configurations {
        c.apply(&cfg.params).validate()?;
    }
    Ok(cfg)
}

fn amplifier(kind: AmplifierKind, gain: Option<f64>, noise: Option<f64>) -> AmplifierSpec {
    let gain = gain.unwrap_or(1.0);
    match kind {
        AmplifierKind::None => AmplifierSpec::None,
        AmplifierKind::Psa => AmplifierSpec::Psa { gain },
        AmplifierKind::Pia => AmplifierSpec::Pia {
            gain,
            noise: noise.unwrap_or(1.0),
        },
    }
}
