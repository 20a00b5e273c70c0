//! Parameter sweeps and root finding on top of the key rate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, KeyRateResult};
use crate::protocol::{AmplifierSpec, Detection, ProtocolParams};

/// Absolute tolerance on the maximal distance, km.
pub const DISTANCE_TOL_KM: f64 = 0.01;
/// Absolute tolerance on the tolerable noise bisection.
pub const NOISE_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 60;
/// Key rates are evaluated from here when looking for the maximal distance.
pub const START_DISTANCE_KM: f64 = 1.0;
const MAX_BRACKET_DISTANCE_KM: f64 = 5_000.0;
const MAX_BRACKET_NOISE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`; the endpoints must straddle a sign change.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::BracketFailure { lo, f_lo, hi, f_hi });
    }
    for iteration in 1..=MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 || 0.5 * (hi - lo) <= xtol {
            return Ok(Root { x: mid, residual: f_mid, iterations: iteration });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    Distance,
    Gain,
    InherentNoise,
}

impl SweepVariable {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance_km",
            SweepVariable::Gain => "gain",
            SweepVariable::InherentNoise => "noise",
        }
    }
}

/// One curve of a comparison: an amplifier plus optional detector overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub label: String,
    pub amplifier: AmplifierSpec,
    pub efficiency: Option<f64>,
    pub electronic_noise: Option<f64>,
}

impl Configuration {
    pub fn new(label: impl Into<String>, amplifier: AmplifierSpec) -> Self {
        Self {
            label: label.into(),
            amplifier,
            efficiency: None,
            electronic_noise: None,
        }
    }

    pub fn perfect_detector(label: impl Into<String>) -> Self {
        Self {
            efficiency: Some(1.0),
            electronic_noise: Some(0.0),
            ..Self::new(label, AmplifierSpec::None)
        }
    }

    pub fn apply(&self, base: &ProtocolParams) -> ProtocolParams {
        let mut p = *base;
        p.amplifier = self.amplifier;
        if let Some(eta) = self.efficiency {
            p.detector.efficiency = eta;
        }
        if let Some(v) = self.electronic_noise {
            p.detector.electronic_noise = v;
        }
        p
    }

    /// The homodyne comparison set: no amplifier, PSA with g = 2 and 15, perfect detector.
    pub fn homodyne_set() -> Vec<Self> {
        vec![
            Self::new("none", AmplifierSpec::None),
            Self::new("psa_g2", AmplifierSpec::Psa { gain: 2.0 }),
            Self::new("psa_g15", AmplifierSpec::Psa { gain: 15.0 }),
            Self::perfect_detector("perfect"),
        ]
    }

    /// The heterodyne comparison set: no amplifier, PIA with g ∈ {2, 15} and
    /// N ∈ {1, 1.5}, perfect detector.
    pub fn heterodyne_set() -> Vec<Self> {
        vec![
            Self::new("none", AmplifierSpec::None),
            Self::new("pia_g2_n1", AmplifierSpec::Pia { gain: 2.0, noise: 1.0 }),
            Self::new("pia_g15_n1", AmplifierSpec::Pia { gain: 15.0, noise: 1.0 }),
            Self::new("pia_g2_n1.5", AmplifierSpec::Pia { gain: 2.0, noise: 1.5 }),
            Self::new("pia_g15_n1.5", AmplifierSpec::Pia { gain: 15.0, noise: 1.5 }),
            Self::perfect_detector("perfect"),
        ]
    }

    pub fn default_set(detection: Detection) -> Vec<Self> {
        match detection {
            Detection::Homodyne => Self::homodyne_set(),
            Detection::Heterodyne => Self::heterodyne_set(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ProtocolParams,
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub configurations: Vec<Configuration>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidParameter { name: "sweep.step", value: self.step, constraint: "step > 0" });
        }
        if !(self.start < self.stop) || !self.stop.is_finite() {
            return Err(Error::InvalidParameter { name: "sweep.stop", value: self.stop, constraint: "start < stop" });
        }
        Ok(())
    }

    /// `start, start + step, ...`, with the last point clamped to `stop`;
    /// `ceil((stop - start)/step) + 1` values.
    pub fn grid(&self) -> Vec<f64> {
        grid(self.start, self.stop, self.step)
    }

    /// Parameters of configuration `config` at swept value `value`.
    pub fn params_at(&self, config: &Configuration, value: f64) -> ProtocolParams {
        let mut p = config.apply(&self.base);
        match self.variable {
            SweepVariable::Distance => p.channel.distance_km = value,
            SweepVariable::Gain => {
                p.amplifier = match p.amplifier {
                    AmplifierSpec::None => AmplifierSpec::None,
                    AmplifierSpec::Psa { .. } => AmplifierSpec::Psa { gain: value },
                    AmplifierSpec::Pia { noise, .. } => AmplifierSpec::Pia { gain: value, noise },
                }
            }
            SweepVariable::InherentNoise => {
                if let AmplifierSpec::Pia { gain, .. } = p.amplifier {
                    p.amplifier = AmplifierSpec::Pia { gain, noise: value };
                }
            }
        }
        p
    }
}

pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step - 1e-9).ceil().max(0.0) as usize;
    (0..=n).map(|i| (start + i as f64 * step).min(stop)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// One result per configuration, in the order of `SweepSpec::configurations`.
    pub results: Vec<KeyRateResult>,
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid()
        .into_par_iter()
        .map(|value| {
            let results = spec
                .configurations
                .iter()
                .map(|c| secret_key_rate(&spec.params_at(c, value)))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { value, results })
        })
        .collect()
}

/// Distance sweep of `spec`, regardless of its `variable`.
pub fn sweep_distance(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    sweep(&SweepSpec { variable: SweepVariable::Distance, ..spec.clone() })
}

fn key_rate(params: &ProtocolParams) -> Result<f64> {
    Ok(secret_key_rate(params)?.key_rate)
}

/// Distance at which the key rate crosses zero. The bracket starts at
/// [`START_DISTANCE_KM`] and doubles until the key rate turns negative.
pub fn find_max_distance(params: &ProtocolParams) -> Result<f64> {
    let at = |d: f64| key_rate(&params.with_distance(d));
    let mut lo = START_DISTANCE_KM;
    let k_lo = at(lo)?;
    if !(k_lo > 0.0) {
        return Err(Error::NoPositiveKeyRate { at: lo, key_rate: k_lo });
    }
    let mut hi = 2.0 * lo;
    loop {
        let k_hi = at(hi)?;
        if k_hi <= 0.0 {
            break;
        }
        if hi > MAX_BRACKET_DISTANCE_KM {
            return Err(Error::BracketFailure { lo, f_lo: k_lo, hi, f_hi: k_hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    Ok(bisect(at, lo, hi, DISTANCE_TOL_KM)?.x)
}

/// Which condition defined a tolerable noise value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseCriterion {
    /// Inside the range of the bare receiver: the amplified key rate equals `bare_key_rate`.
    MatchBare { bare_key_rate: f64 },
    /// Beyond that range: the amplified key rate reaches zero.
    PositiveKeyRate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TolerableNoise {
    Value { noise: f64, criterion: NoiseCriterion, residual: f64 },
    /// Even a noiseless (N = 1) amplifier does not meet the criterion.
    NoImprovement,
}

impl TolerableNoise {
    pub fn noise(&self) -> Option<f64> {
        match self {
            TolerableNoise::Value { noise, .. } => Some(*noise),
            TolerableNoise::NoImprovement => None,
        }
    }
}

fn require_pia(params: &ProtocolParams) -> Result<f64> {
    match (params.detector.detection, params.amplifier) {
        (Detection::Heterodyne, AmplifierSpec::Pia { gain, .. }) => Ok(gain),
        _ => Err(Error::IncompatibleAmplifier {
            amplifier: params.amplifier.name(),
            detection: params.detector.detection.name(),
        }),
    }
}

/// Maximal distance of `params` with the amplifier removed, or 0 when the
/// bare protocol never has a positive key rate.
pub fn bare_max_distance(params: &ProtocolParams) -> Result<f64> {
    match find_max_distance(&params.with_amplifier(AmplifierSpec::None)) {
        Ok(d) => Ok(d),
        Err(Error::NoPositiveKeyRate { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Largest PIA inherent noise that still improves on the bare receiver at
/// `distance_km` (or, past the bare receiver's range, keeps the key rate positive).
pub fn find_tolerable_noise(params: &ProtocolParams, distance_km: f64) -> Result<TolerableNoise> {
    require_pia(params)?;
    let bare_limit = bare_max_distance(params)?;
    tolerable_noise_with_limit(params, distance_km, bare_limit)
}

fn tolerable_noise_with_limit(params: &ProtocolParams, distance_km: f64, bare_limit: f64) -> Result<TolerableNoise> {
    let gain = require_pia(params)?;
    let at_d = params.with_distance(distance_km);
    let criterion = if distance_km <= bare_limit {
        NoiseCriterion::MatchBare { bare_key_rate: key_rate(&at_d.with_amplifier(AmplifierSpec::None))? }
    } else {
        NoiseCriterion::PositiveKeyRate
    };
    let target = match criterion {
        NoiseCriterion::MatchBare { bare_key_rate } => bare_key_rate,
        NoiseCriterion::PositiveKeyRate => 0.0,
    };
    let excess = |noise: f64| Ok(key_rate(&at_d.with_amplifier(AmplifierSpec::Pia { gain, noise }))? - target);

    let f_one = excess(1.0)?;
    if !(f_one > 0.0) {
        return Ok(TolerableNoise::NoImprovement);
    }
    let (mut lo, mut hi) = (1.0, 2.0);
    loop {
        let f_hi = excess(hi)?;
        if f_hi <= 0.0 {
            break;
        }
        if hi > MAX_BRACKET_NOISE {
            return Err(Error::BracketFailure { lo, f_lo: f_one, hi, f_hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    let root = bisect(excess, lo, hi, NOISE_TOL)?;
    Ok(TolerableNoise::Value { noise: root.x, criterion, residual: root.residual })
}

#[derive(Debug)]
pub struct SurfaceCell {
    pub gain: f64,
    pub distance_km: f64,
    pub result: Result<TolerableNoise>,
}

/// Tolerable noise over a `(gain, distance)` grid, ordered by gain then
/// distance. A failing cell keeps its error and does not abort the grid.
pub fn tolerable_noise_surface(params: &ProtocolParams, gains: &[f64], distances: &[f64]) -> Result<Vec<SurfaceCell>> {
    require_pia(params)?;
    let bare_limit = bare_max_distance(params)?;
    let noise = params.amplifier.noise();
    let cells: Vec<(f64, f64)> = gains
        .iter()
        .flat_map(|&g| distances.iter().map(move |&d| (g, d)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(gain, distance_km)| {
            let p = params.with_amplifier(AmplifierSpec::Pia { gain, noise });
            SurfaceCell { gain, distance_km, result: tolerable_noise_with_limit(&p, distance_km, bare_limit) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(bisect(|x| Ok(x * x + 1.0), 0.0, 2.0, 1e-9), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn grid_row_count() {
        assert_eq!(grid(1.0, 80.0, 1.0).len(), 80);
        let g = grid(0.0, 1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(grid(5.0, 60.0, 5.0).len(), 12);
    }

    #[test]
    fn sweep_spec_validation() {
        let mut s = SweepSpec {
            base: ProtocolParams::default(),
            variable: SweepVariable::Distance,
            start: 1.0,
            stop: 2.0,
            step: 0.0,
            configurations: Configuration::homodyne_set(),
        };
        assert!(sweep(&s).is_err());
        s.step = 1.0;
        s.stop = 0.5;
        assert!(sweep(&s).is_err());
    }

    #[test]
    fn tolerable_noise_needs_pia() {
        assert!(matches!(
            find_tolerable_noise(&ProtocolParams::heterodyne(), 20.0),
            Err(Error::IncompatibleAmplifier { .. })
        ));
    }

    #[test]
    fn max_distance_needs_positive_start() {
        let p = ProtocolParams { beta: 0.0, ..Default::default() };
        assert!(matches!(find_max_distance(&p), Err(Error::NoPositiveKeyRate { .. })));
    }
}
