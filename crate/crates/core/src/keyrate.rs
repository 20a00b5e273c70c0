//! Secret key rate `K = β I(a:b) - χ_BE` under reverse reconciliation.

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, Quadrature, SymplecticSpectrum};
use crate::protocol::{self, Detection, EstimatorParams, ProtocolParams, A1, BP, BX};

#[derive(Debug, Clone, PartialEq)]
pub struct KeyRateResult {
    /// Bits per pulse; negative values are kept so root finders can bracket.
    pub key_rate: f64,
    pub mutual_information: f64,
    pub holevo: f64,
    pub v_ax: f64,
    pub v_ax_given_b: f64,
    pub spectrum_unconditional: SymplecticSpectrum,
    pub spectrum_conditional: SymplecticSpectrum,
    pub estimator: EstimatorParams,
}

/// Classical mutual information between Alice's heterodyne outcomes and Bob's estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    pub bits: f64,
    /// `(V_A + 1)/2`, the variance of Alice's `x_Ax`.
    pub v_ax: f64,
    /// Variance of `x_Ax` conditioned on Bob's `x_Bx`.
    pub v_ax_given_b: f64,
}

fn quadrature_information(state: &CovarianceMatrix, v_a: f64, bob: &str, q: Quadrature) -> Result<(f64, f64, f64)> {
    // Alice's heterodyne splits A1 with vacuum on a balanced splitter, so each
    // outcome carries half of A1's amplitude.
    let v_alice = 0.5 * (v_a + 1.0);
    let cov = state.entry((A1, q), (bob, q))? / 2f64.sqrt();
    let v_bob = state.entry((bob, q), (bob, q))?;
    if !(v_bob > 0.0) {
        return Err(Error::DegenerateMeasurement {
            mode: bob.to_string(),
            quadrature: q,
            variance: v_bob,
        });
    }
    let v_cond = v_alice - cov * cov / v_bob;
    if !(v_cond > 0.0) {
        return Err(Error::Numerical {
            reason: format!("non-positive conditional variance {v_cond}"),
            matrix: state.matrix().clone(),
        });
    }
    Ok((0.5 * (v_alice / v_cond).log2(), v_alice, v_cond))
}

/// `I = ½ log2(V_Ax / V_Ax|Bx)` for homodyne; heterodyne adds the matching
/// `p` term from `(p_Ap, p_Bp)`.
pub fn mutual_information(params: &ProtocolParams, receiver: &CovarianceMatrix) -> Result<MutualInformation> {
    let (ix, v_ax, v_ax_given_b) = quadrature_information(receiver, params.v_a, BX, Quadrature::X)?;
    let bits = match params.detector.detection {
        Detection::Homodyne => ix,
        Detection::Heterodyne => ix + quadrature_information(receiver, params.v_a, BP, Quadrature::P)?.0,
    };
    Ok(MutualInformation {
        bits,
        v_ax,
        v_ax_given_b,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolevoBound {
    pub chi: f64,
    pub spectrum_unconditional: SymplecticSpectrum,
    pub spectrum_conditional: SymplecticSpectrum,
}

/// `χ_BE = S(γ_uncond) - S(γ_cond)`: Eve purifies the unconditional state and
/// the rest of the system stays pure after Bob's measurement.
pub fn holevo_bound(unconditional: &CovarianceMatrix, conditional: &CovarianceMatrix) -> Result<HolevoBound> {
    let su = unconditional.symplectic_spectrum()?;
    let sc = conditional.symplectic_spectrum()?;
    let chi = su.entropy()? - sc.entropy()?;
    Ok(HolevoBound {
        chi,
        spectrum_unconditional: su,
        spectrum_conditional: sc,
    })
}

pub fn secret_key_rate(params: &ProtocolParams) -> Result<KeyRateResult> {
    params.validate()?;
    let unconditional = protocol::source_state_by_propagation(params)?;
    let receiver = protocol::receiver_state(params)?;
    let conditional = protocol::conditional_gamma(&receiver, protocol::bob_measurements(params.detector.detection))?;
    let info = mutual_information(params, &receiver)?;
    let holevo = holevo_bound(&unconditional, &conditional)?;
    Ok(KeyRateResult {
        key_rate: params.beta * info.bits - holevo.chi,
        mutual_information: info.bits,
        holevo: holevo.chi,
        v_ax: info.v_ax,
        v_ax_given_b: info.v_ax_given_b,
        spectrum_unconditional: holevo.spectrum_unconditional,
        spectrum_conditional: holevo.spectrum_conditional,
        estimator: protocol::optimal_k(params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::AmplifierSpec;

    #[test]
    fn decomposition_identity_is_exact() {
        let p = ProtocolParams::default();
        let r = secret_key_rate(&p).unwrap();
        assert_eq!(r.key_rate, p.beta * r.mutual_information - r.holevo);
        assert_eq!(r.v_ax, 20.5);
        assert_eq!(r.spectrum_unconditional.len(), 4);
        assert_eq!(r.spectrum_conditional.len(), 6);
    }

    #[test]
    fn heterodyne_spectrum_lengths() {
        let r = secret_key_rate(&ProtocolParams::heterodyne()).unwrap();
        assert_eq!(r.spectrum_unconditional.len(), 4);
        assert_eq!(r.spectrum_conditional.len(), 8);
    }

    #[test]
    fn no_correlation_means_no_information() {
        let p = ProtocolParams { t_a: 1.0, ..Default::default() };
        let receiver = protocol::receiver_state(&p).unwrap();
        let info = mutual_information(&p, &receiver).unwrap();
        assert!(info.bits.abs() < 1e-12, "{}", info.bits);
    }

    #[test]
    fn heterodyne_quadratures_contribute_equally() {
        let p = ProtocolParams::heterodyne().with_amplifier(AmplifierSpec::Pia { gain: 15.0, noise: 1.5 });
        let receiver = protocol::receiver_state(&p).unwrap();
        let ix = quadrature_information(&receiver, p.v_a, BX, Quadrature::X).unwrap().0;
        let ip = quadrature_information(&receiver, p.v_a, BP, Quadrature::P).unwrap().0;
        assert!((ix - ip).abs() < 1e-12);
        assert!((mutual_information(&p, &receiver).unwrap().bits - 2.0 * ix).abs() < 1e-12);
    }

    #[test]
    fn vanishing_eve_gives_no_holevo_information() {
        let p = ProtocolParams::default()
            .with_perfect_detector()
            .with_excess_noise(0.0)
            .with_distance(1e-6 / 0.2 * 10.0 / std::f64::consts::LN_10);
        let t = p.channel.transmittance();
        assert!((t - (1.0 - 1e-6)).abs() < 1e-9);
        let r = secret_key_rate(&p).unwrap();
        assert!(r.holevo.abs() < 1e-4, "{}", r.holevo);
    }
}
