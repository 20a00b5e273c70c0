//! The entanglement-based two-way protocol under a two-mode entangling-cloner
//! attack, with Bob's imperfect detector and an optional optical amplifier.
//!
//! Mode names follow the usual layout of the scheme:
//!
//! * Bob's source EPR pair `(B1, B2)`, Alice's `(A1, A2)`, Eve's `(E1, E2)` plus
//!   a vacuum `E0`.
//! * `B2` travels to Alice, is mixed with `A2` on her splitter `T_A`
//!   (`A_out`, `A3`), and `A_out` returns to Bob as `B3`.
//! * Bob heterodynes `B1` into `(B1x, B1p)` and receives `B3` through the
//!   amplifier and the detector model (`F0`, `G` ancilla), ending with the
//!   estimator gates that produce `Bx` (and `Bp`).

use nalgebra::DMatrix;

use crate::error::{check_range, Error, Result};
use crate::gaussian::{CovarianceMatrix, Quadrature, SymplecticTransform};

pub const A1: &str = "A1";
pub const A3: &str = "A3";
pub const B1: &str = "B1";
pub const B3: &str = "B3";
pub const B1X: &str = "B1x";
pub const B1P: &str = "B1p";
pub const F: &str = "F";
pub const G: &str = "G";
pub const I: &str = "I";
pub const J: &str = "J";
pub const B6: &str = "B6";
pub const B7: &str = "B7";
pub const BX: &str = "Bx";
pub const BP: &str = "Bp";

/// Output ordering of [`receiver_chain_homodyne`].
pub const HOMODYNE_MODES: [&str; 7] = [A1, A3, B1P, B6, F, G, BX];
/// Output ordering of [`receiver_chain_heterodyne`].
pub const HETERODYNE_MODES: [&str; 10] = [A1, A3, I, J, F, G, B6, B7, BX, BP];
/// Modes of the state shared by Alice and Bob before Bob's receiver.
pub const SOURCE_MODES: [&str; 4] = [A1, A3, B1, B3];

/// Fibre transmittance `10^(-a d / 10)` for loss `a` in dB/km over `d` km.
pub fn channel_transmittance(loss_db_per_km: f64, distance_km: f64) -> f64 {
    10f64.powf(-loss_db_per_km * distance_km / 10.0)
}

/// Symmetric lossy channel used in both directions (`T1 = T2 = T`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub loss_db_per_km: f64,
    pub distance_km: f64,
    /// Average of the forward and backward excess noise, shot-noise units.
    pub excess_noise: f64,
}

impl ChannelModel {
    pub fn transmittance(&self) -> f64 {
        channel_transmittance(self.loss_db_per_km, self.distance_km)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("channel.loss_db_per_km", self.loss_db_per_km, self.loss_db_per_km >= 0.0, ">= 0")?;
        check_range("channel.distance_km", self.distance_km, self.distance_km >= 0.0, ">= 0")?;
        check_range("channel.excess_noise", self.excess_noise, self.excess_noise >= 0.0, ">= 0")?;
        Ok(())
    }
}

/// Eve's splitter transmittance and EPR variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveParameters {
    /// `T_E = 1 / (1 + T T_A)`, which cancels `E2` from the mode returning to Bob.
    pub splitter: f64,
    /// `V_E = 1 + 2 T ε / (1 - T)`.
    pub variance: f64,
}

pub fn eve_parameters(t: f64, t_a: f64, excess_noise: f64) -> Result<EveParameters> {
    let splitter = 1.0 / (1.0 + t * t_a);
    let variance = if excess_noise == 0.0 {
        1.0
    } else if t >= 1.0 {
        return Err(Error::ChannelSingularity {
            distance_km: 0.0,
            excess_noise,
        });
    } else {
        1.0 + 2.0 * t * excess_noise / (1.0 - t)
    };
    Ok(EveParameters { splitter, variance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

impl Detection {
    pub fn name(self) -> &'static str {
        match self {
            Detection::Homodyne => "homodyne",
            Detection::Heterodyne => "heterodyne",
        }
    }
}

/// Bob's detector: efficiency `η` and electronic noise `υ_el`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub detection: Detection,
    pub efficiency: f64,
    pub electronic_noise: f64,
}

impl DetectorModel {
    pub fn perfect(detection: Detection) -> Self {
        Self {
            detection,
            efficiency: 1.0,
            electronic_noise: 0.0,
        }
    }

    /// Variance `υ` of the thermal ancilla that models electronic noise:
    /// `1 + υ_el/(1-η)` for homodyne, `1 + 2υ_el/(1-η)` for heterodyne.
    pub fn ancilla_variance(&self) -> f64 {
        if self.efficiency >= 1.0 {
            return 1.0;
        }
        let factor = match self.detection {
            Detection::Homodyne => 1.0,
            Detection::Heterodyne => 2.0,
        };
        1.0 + factor * self.electronic_noise / (1.0 - self.efficiency)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("detector.eta", self.efficiency, self.efficiency > 0.0 && self.efficiency <= 1.0, "eta in (0, 1]")?;
        check_range("detector.v_el", self.electronic_noise, self.electronic_noise >= 0.0, "v_el >= 0")?;
        if self.efficiency == 1.0 {
            check_range("detector.v_el", self.electronic_noise, self.electronic_noise == 0.0, "v_el = 0 when eta = 1")?;
        }
        Ok(())
    }
}

/// Optical amplifier placed in front of Bob's detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplifierSpec {
    None,
    /// Phase-sensitive amplifier with gain on `x`.
    Psa { gain: f64 },
    /// Phase-insensitive amplifier whose inherent noise is an EPR pair of variance `noise`.
    Pia { gain: f64, noise: f64 },
}

impl AmplifierSpec {
    pub fn gain(&self) -> f64 {
        match *self {
            AmplifierSpec::None => 1.0,
            AmplifierSpec::Psa { gain } | AmplifierSpec::Pia { gain, .. } => gain,
        }
    }

    pub fn noise(&self) -> f64 {
        match *self {
            AmplifierSpec::Pia { noise, .. } => noise,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AmplifierSpec::None => "none",
            AmplifierSpec::Psa { .. } => "psa",
            AmplifierSpec::Pia { .. } => "pia",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.gain();
        check_range("amplifier.gain", g, g >= 1.0, "g >= 1")?;
        let n = self.noise();
        check_range("amplifier.noise", n, n >= 1.0, "N >= 1")?;
        Ok(())
    }
}

/// All physical inputs of one key-rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Variance of Alice's EPR source (modulation variance + 1).
    pub v_a: f64,
    /// Variance of Bob's EPR source.
    pub v_b: f64,
    /// Transmittance of Alice's coupling beam splitter.
    pub t_a: f64,
    /// Reconciliation efficiency.
    pub beta: f64,
    pub channel: ChannelModel,
    pub detector: DetectorModel,
    pub amplifier: AmplifierSpec,
}

impl Default for ProtocolParams {
    /// Values of a typical experiment: `V_A = V_B = 40`, `β = 0.948`,
    /// `η = 0.552`, `υ_el = 0.015`, `T_A = 0.4`, `ε = 0.02`, 0.2 dB/km fibre.
    fn default() -> Self {
        Self {
            v_a: 40.0,
            v_b: 40.0,
            t_a: 0.4,
            beta: 0.948,
            channel: ChannelModel {
                loss_db_per_km: 0.2,
                distance_km: 20.0,
                excess_noise: 0.02,
            },
            detector: DetectorModel {
                detection: Detection::Homodyne,
                efficiency: 0.552,
                electronic_noise: 0.015,
            },
            amplifier: AmplifierSpec::None,
        }
    }
}

impl ProtocolParams {
    pub fn heterodyne() -> Self {
        let mut p = Self::default();
        p.detector.detection = Detection::Heterodyne;
        p
    }

    pub fn with_distance(mut self, distance_km: f64) -> Self {
        self.channel.distance_km = distance_km;
        self
    }

    pub fn with_excess_noise(mut self, excess_noise: f64) -> Self {
        self.channel.excess_noise = excess_noise;
        self
    }

    pub fn with_amplifier(mut self, amplifier: AmplifierSpec) -> Self {
        self.amplifier = amplifier;
        self
    }

    /// Same detection kind, ideal efficiency and no electronic noise.
    pub fn with_perfect_detector(mut self) -> Self {
        self.detector = DetectorModel::perfect(self.detector.detection);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_range("source.va", self.v_a, self.v_a >= 1.0, "V_A >= 1")?;
        check_range("source.vb", self.v_b, self.v_b >= 1.0, "V_B >= 1")?;
        check_range("source.ta", self.t_a, (0.0..=1.0).contains(&self.t_a), "0 <= T_A <= 1")?;
        check_range("source.beta", self.beta, (0.0..=1.0).contains(&self.beta), "0 <= beta <= 1")?;
        self.channel.validate()?;
        self.detector.validate()?;
        self.amplifier.validate()?;
        match (self.detector.detection, self.amplifier) {
            (Detection::Homodyne, AmplifierSpec::Pia { .. }) | (Detection::Heterodyne, AmplifierSpec::Psa { .. }) => {
                Err(Error::IncompatibleAmplifier {
                    amplifier: self.amplifier.name(),
                    detection: self.detector.detection.name(),
                })
            }
            _ => Ok(()),
        }
    }

    pub fn eve(&self) -> Result<EveParameters> {
        let t = self.channel.transmittance();
        eve_parameters(t, self.t_a, self.channel.excess_noise).map_err(|e| match e {
            Error::ChannelSingularity { excess_noise, .. } => Error::ChannelSingularity {
                distance_km: self.channel.distance_km,
                excess_noise,
            },
            other => other,
        })
    }
}

/// Gain `k` of Bob's estimator `x_B5 - k x_B1x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorParams {
    pub k: f64,
}

/// The `k` minimizing the variance of Bob's estimator:
/// `sqrt(c η g T_A T1 T2 (V_B - 1)/(V_B + 1))` with `c = 2` for homodyne and
/// `c = 1` for heterodyne (whose signal arm is split once more).
pub fn optimal_k(params: &ProtocolParams) -> EstimatorParams {
    let t = params.channel.transmittance();
    let c = match params.detector.detection {
        Detection::Homodyne => 2.0,
        Detection::Heterodyne => 1.0,
    };
    let k = (c
        * params.detector.efficiency
        * params.amplifier.gain()
        * params.t_a
        * t
        * t
        * (params.v_b - 1.0)
        / (params.v_b + 1.0))
        .sqrt();
    EstimatorParams { k }
}

/// Closed-form covariance matrix of `(A1, A3, B1, B3)` for the interference-
/// cancelling choice of `T_E`.
pub fn source_state_closed_form(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    let (va, vb, ta) = (params.v_a, params.v_b, params.t_a);
    let t = params.channel.transmittance();
    let ve = params.eve()?.variance;

    let a1a3 = (ta * (va * va - 1.0)).sqrt();
    let a1b3 = (t * (1.0 - ta) * (va * va - 1.0)).sqrt();
    let a3 = ta * va
        + t * (1.0 - ta) * vb
        + (1.0 - ta) * (1.0 - t) / (1.0 + t * ta) * ve
        + t * (1.0 - t) * ta * (1.0 - ta) / (1.0 + t * ta);
    let a3b1 = -(t * (1.0 - ta) * (vb * vb - 1.0)).sqrt();
    let a3b3 = (t * ta * (1.0 - ta)).sqrt() * (va - t * vb - 1.0 + t);
    let b3 = ta * t * t * vb + (1.0 - ta) * t * va + (1.0 - t) * (1.0 + t * ta);
    let b1b3 = t * (ta * (vb * vb - 1.0)).sqrt();

    // Block (i, j) is value * I2 (`false`) or value * σz (`true`).
    let blocks: [[(f64, bool); 4]; 4] = [
        [(va, false), (a1a3, true), (0.0, false), (a1b3, true)],
        [(a1a3, true), (a3, false), (a3b1, true), (a3b3, false)],
        [(0.0, false), (a3b1, true), (vb, false), (b1b3, true)],
        [(a1b3, true), (a3b3, false), (b1b3, true), (b3, false)],
    ];
    let mut m = DMatrix::zeros(8, 8);
    for (i, row) in blocks.iter().enumerate() {
        for (j, &(v, sz)) in row.iter().enumerate() {
            m[(2 * i, 2 * j)] = v;
            m[(2 * i + 1, 2 * j + 1)] = if sz { -v } else { v };
        }
    }
    CovarianceMatrix::new(SOURCE_MODES.to_vec(), m)
}

/// Global pure state after the attack. Each source mode keeps its slot and
/// takes the output name of every splitter it passes, giving
/// `(B1, B3, A1, A3, E1, E4, E6)`.
pub fn attack_global_state(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    let t = params.channel.transmittance();
    let eve = params.eve()?;
    let state = CovarianceMatrix::epr(params.v_b, B1, "B2")?
        .tensor(&CovarianceMatrix::epr(params.v_a, A1, "A2")?)?
        .tensor(&CovarianceMatrix::epr(eve.variance, "E1", "E2")?)?
        .tensor(&CovarianceMatrix::vacuum(&["E0"])?)?;
    let mut state = state;
    for (transmittance, targets, outputs) in attack_steps(t, params.t_a, eve.splitter) {
        state = state.apply_as(&SymplecticTransform::beam_splitter(transmittance)?, &targets, &outputs)?;
    }
    Ok(state)
}

/// The four beam splitters of the attack, in order.
fn attack_steps(t: f64, t_a: f64, t_e: f64) -> [(f64, [&'static str; 2], [&'static str; 2]); 4] {
    [
        (t_e, ["E2", "E0"], ["E3", "E5"]),
        (t, ["B2", "E3"], ["Ain", "E4"]),
        (t_a, ["Ain", "A2"], ["Aout", A3]),
        (t, ["Aout", "E5"], [B3, "E6"]),
    ]
}

/// Input-to-output amplitude map of the attack as a full symplectic matrix
/// over the source slots `(B1, B2, A1, A2, E1, E2, E0)`. Row `2i` gives the
/// `x` quadrature of the mode that ends up in slot `i`.
pub fn attack_transfer(params: &ProtocolParams) -> Result<(Vec<&'static str>, Vec<&'static str>, DMatrix<f64>)> {
    params.validate()?;
    let t = params.channel.transmittance();
    let eve = params.eve()?;
    let inputs = vec![B1, "B2", A1, "A2", "E1", "E2", "E0"];
    let mut labels = inputs.clone();
    let mut total = DMatrix::identity(14, 14);
    for (transmittance, targets, outputs) in attack_steps(t, params.t_a, eve.splitter) {
        let step = SymplecticTransform::beam_splitter(transmittance)?.embed(&labels, &targets)?;
        total = step * total;
        for (from, to) in targets.iter().zip(outputs) {
            let i = labels.iter().position(|l| l == from).expect("label present");
            labels[i] = to;
        }
    }
    Ok((inputs, labels, total))
}

/// `(A1, A3, B1, B3)` obtained by propagating the pure sources through the
/// attack and tracing out Eve.
pub fn source_state_by_propagation(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    attack_global_state(params)?.restrict(&SOURCE_MODES)
}

fn split_b1(state: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    state
        .tensor(&CovarianceMatrix::vacuum(&["vB1"])?)?
        .apply_as(&SymplecticTransform::beam_splitter(0.5)?, &[B1, "vB1"], &[B1X, B1P])
}

fn detector_ancilla(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    CovarianceMatrix::epr(params.detector.ancilla_variance(), "F0", G)
}

/// Homodyne receiver with optional PSA, output over
/// `(A1, A3, B1p, B6, F, G, Bx)`.
pub fn receiver_chain_homodyne(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    if params.detector.detection != Detection::Homodyne {
        return Err(Error::IncompatibleAmplifier {
            amplifier: params.amplifier.name(),
            detection: Detection::Heterodyne.name(),
        });
    }
    let k = optimal_k(params).k;
    let state = split_b1(&source_state_by_propagation(params)?)?
        .restrict(&[A1, A3, B1P, B1X, B3])?
        .tensor(&detector_ancilla(params)?)?
        .apply_as(&SymplecticTransform::psa(params.amplifier.gain())?, &[B3], &["B4"])?
        .apply_as(&SymplecticTransform::beam_splitter(params.detector.efficiency)?, &["B4", "F0"], &["B5", F])?
        .apply_as(&SymplecticTransform::cnot_x(k)?, &["B5", B1X], &[BX, B6])?;
    state.restrict(&HOMODYNE_MODES)
}

/// Heterodyne receiver with optional PIA, output over
/// `(A1, A3, I, J, F, G, B6, B7, Bx, Bp)`.
pub fn receiver_chain_heterodyne(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    if params.detector.detection != Detection::Heterodyne {
        return Err(Error::IncompatibleAmplifier {
            amplifier: params.amplifier.name(),
            detection: Detection::Homodyne.name(),
        });
    }
    let k = optimal_k(params).k;
    let state = split_b1(&source_state_by_propagation(params)?)?
        .tensor(&CovarianceMatrix::epr(params.amplifier.noise(), "I0", J)?)?
        .apply_as(&SymplecticTransform::pia(params.amplifier.gain())?, &[B3, "I0"], &["B4", I])?
        .tensor(&detector_ancilla(params)?)?
        .apply_as(&SymplecticTransform::beam_splitter(params.detector.efficiency)?, &["B4", "F0"], &["B5", F])?
        .tensor(&CovarianceMatrix::vacuum(&["vB5"])?)?
        .apply_as(&SymplecticTransform::beam_splitter(0.5)?, &["B5", "vB5"], &["B5x", "B5p"])?
        .apply_as(&SymplecticTransform::cnot_x(k)?, &["B5x", B1X], &[BX, B6])?
        .apply_as(&SymplecticTransform::cnot_p(k)?, &["B5p", B1P], &[BP, B7])?;
    state.restrict(&HETERODYNE_MODES)
}

/// Receiver chain selected by the detection kind.
pub fn receiver_state(params: &ProtocolParams) -> Result<CovarianceMatrix> {
    match params.detector.detection {
        Detection::Homodyne => receiver_chain_homodyne(params),
        Detection::Heterodyne => receiver_chain_heterodyne(params),
    }
}

/// Bob's measurements: `x` of `Bx` and, for heterodyne, `p` of `Bp`.
pub fn bob_measurements(detection: Detection) -> &'static [(&'static str, Quadrature)] {
    match detection {
        Detection::Homodyne => &[(BX, Quadrature::X)],
        Detection::Heterodyne => &[(BX, Quadrature::X), (BP, Quadrature::P)],
    }
}

/// Sequential homodyne conditioning on each `(mode, quadrature)`.
pub fn conditional_gamma(state: &CovarianceMatrix, measured: &[(&str, Quadrature)]) -> Result<CovarianceMatrix> {
    measured
        .iter()
        .try_fold(state.clone(), |s, &(mode, q)| s.condition_homodyne(mode, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transmittance_values() {
        assert_eq!(channel_transmittance(0.2, 0.0), 1.0);
        assert_abs_diff_eq!(channel_transmittance(0.2, 50.0), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(channel_transmittance(0.2, 100.0), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn eve_parameter_values() {
        let e = eve_parameters(0.1, 0.4, 0.02).unwrap();
        assert_abs_diff_eq!(e.splitter, 1.0 / 1.04, epsilon = 1e-15);
        assert_abs_diff_eq!(e.splitter, 0.961538, epsilon = 1e-6);
        assert_eq!(eve_parameters(0.3, 0.4, 0.0).unwrap().variance, 1.0);
        assert_abs_diff_eq!(eve_parameters(0.5, 0.4, 0.02).unwrap().variance, 1.04, epsilon = 1e-15);
        assert!(matches!(eve_parameters(1.0, 0.4, 0.02), Err(Error::ChannelSingularity { .. })));
        assert!(eve_parameters(1.0, 0.4, 0.0).is_ok());
    }

    #[test]
    fn zero_distance_requires_zero_noise() {
        let p = ProtocolParams::default().with_distance(0.0);
        assert!(matches!(source_state_closed_form(&p), Err(Error::ChannelSingularity { distance_km, .. }) if distance_km == 0.0));
        assert!(source_state_closed_form(&p.with_excess_noise(0.0)).is_ok());
    }

    #[test]
    fn ancilla_variances() {
        let mut d = ProtocolParams::default().detector;
        assert_abs_diff_eq!(d.ancilla_variance(), 1.0 + 0.015 / 0.448, epsilon = 1e-15);
        d.detection = Detection::Heterodyne;
        assert_abs_diff_eq!(d.ancilla_variance(), 1.0 + 0.03 / 0.448, epsilon = 1e-15);
        assert_eq!(DetectorModel::perfect(Detection::Heterodyne).ancilla_variance(), 1.0);
        let bad = DetectorModel { efficiency: 1.0, electronic_noise: 0.01, ..d };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn optimal_k_values() {
        let p = ProtocolParams { v_b: 1.0, ..Default::default() };
        assert_eq!(optimal_k(&p).k, 0.0);
        let mut p = ProtocolParams::default().with_perfect_detector().with_distance(0.0).with_excess_noise(0.0);
        p.t_a = 1.0;
        p.v_b = 3.0;
        assert_abs_diff_eq!(optimal_k(&p).k, 1.0, epsilon = 1e-15);
        p.detector.detection = Detection::Heterodyne;
        assert_abs_diff_eq!(optimal_k(&p).k, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn closed_form_special_cases() {
        let mut p = ProtocolParams::default().with_distance(30.0);
        p.t_a = 1.0;
        let g = source_state_closed_form(&p).unwrap();
        assert_eq!(g.entry((A1, Quadrature::X), (B3, Quadrature::X)).unwrap(), 0.0);

        let p = ProtocolParams::default().with_distance(0.0).with_excess_noise(0.0);
        let g = source_state_closed_form(&p).unwrap();
        let expected = p.t_a * p.v_b + (1.0 - p.t_a) * p.v_a;
        assert_abs_diff_eq!(g.entry((B3, Quadrature::X), (B3, Quadrature::X)).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn incompatible_amplifier_rejected() {
        let p = ProtocolParams::default().with_amplifier(AmplifierSpec::Pia { gain: 2.0, noise: 1.0 });
        assert!(matches!(receiver_chain_homodyne(&p), Err(Error::IncompatibleAmplifier { .. })));
        let p = ProtocolParams::heterodyne().with_amplifier(AmplifierSpec::Psa { gain: 2.0 });
        assert!(matches!(receiver_state(&p), Err(Error::IncompatibleAmplifier { .. })));
        assert!(matches!(receiver_chain_heterodyne(&ProtocolParams::default()), Err(Error::IncompatibleAmplifier { .. })));
    }

    #[test]
    fn receiver_output_shapes() {
        let h = receiver_chain_homodyne(&ProtocolParams::default()).unwrap();
        assert_eq!(h.modes(), &HOMODYNE_MODES);
        let c = conditional_gamma(&h, bob_measurements(Detection::Homodyne)).unwrap();
        assert_eq!(c.n_modes(), 6);
        let het = receiver_chain_heterodyne(&ProtocolParams::heterodyne()).unwrap();
        assert_eq!(het.modes(), &HETERODYNE_MODES);
        let c = conditional_gamma(&het, bob_measurements(Detection::Heterodyne)).unwrap();
        assert_eq!(c.n_modes(), 8);
    }
}
