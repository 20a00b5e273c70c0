//! Sampling oracle for the analytic engine.
//!
//! Every source (EPR pairs, vacua, thermal ancillas) is drawn as a classical
//! Gaussian vector with the same covariance, pushed through the same linear
//! optics written out quadrature by quadrature, and the outcomes are recorded.
//! Sample covariances and Gaussian plug-in estimates of the mutual
//! information can then be compared with the covariance-matrix computation.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; partition `i` of a batch uses stream `i` of that
//! generator. Normal deviates are drawn with `rand_distr::StandardNormal`.
//! Results are deterministic for a given `(seed, n, partitions)`.

use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::{self, AmplifierSpec, Detection, ProtocolParams};

pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Number of standard errors allowed between a sampled and an analytic value.
pub const STANDARD_ERRORS: f64 = 5.0;

/// `(x, p)` of one mode in one sample.
type Mode = [f64; 2];

fn mix(t: f64, a: Mode, b: Mode) -> (Mode, Mode) {
    let (s, r) = (t.sqrt(), (1.0 - t).sqrt());
    (
        [s * a[0] + r * b[0], s * a[1] + r * b[1]],
        [-r * a[0] + s * b[0], -r * a[1] + s * b[1]],
    )
}

fn two_mode_amplify(g: f64, signal: Mode, idler: Mode) -> (Mode, Mode) {
    let (s, r) = (g.sqrt(), (g - 1.0).sqrt());
    (
        [s * signal[0] + r * idler[0], s * signal[1] - r * idler[1]],
        [r * signal[0] + s * idler[0], -r * signal[1] + s * idler[1]],
    )
}

/// Cholesky factor of a two-mode squeezed vacuum of variance `v`.
fn epr_factor(v: f64) -> Result<Matrix4<f64>> {
    let c = (v * v - 1.0).sqrt();
    #[rustfmt::skip]
    let cov = Matrix4::new(
        v, 0.0, c, 0.0,
        0.0, v, 0.0, -c,
        c, 0.0, v, 0.0,
        0.0, -c, 0.0, v,
    );
    cov.cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| Error::Numerical {
            reason: format!("EPR covariance with V = {v} is not positive definite"),
            matrix: DMatrix::from_iterator(4, 4, cov.iter().copied()),
        })
}

struct Sources {
    bob: Matrix4<f64>,
    alice: Matrix4<f64>,
    eve: Matrix4<f64>,
    detector: Matrix4<f64>,
    amplifier: Matrix4<f64>,
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn draw_vacuum<R: Rng>(rng: &mut R) -> Mode {
    [normal(rng), normal(rng)]
}

fn draw_pair<R: Rng>(rng: &mut R, l: &Matrix4<f64>) -> (Mode, Mode) {
    let z = Vector4::new(normal(rng), normal(rng), normal(rng), normal(rng));
    let s = l * z;
    ([s[0], s[1]], [s[2], s[3]])
}

/// Column names recorded for every detection kind.
const COMMON: [&str; 15] = [
    "x_A1", "p_A1", "x_A3", "p_A3", "x_B1", "p_B1", "x_B3", "p_B3", "x_Ax", "p_Ap", "x_B1x", "p_B1p", "x_B5", "p_B5",
    "x_Bx",
];

/// Per-sample quadrature outcomes, one column per label. For heterodyne
/// detection `x_B5`/`p_B5` hold the split arms `x_B5x`/`p_B5p` and `p_Bp` is
/// recorded as well.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub n_samples: usize,
    pub detection: Detection,
    names: Vec<&'static str>,
    columns: Vec<Vec<f64>>,
}

impl SampleBatch {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    fn require(&self, name: &str) -> Result<&[f64]> {
        self.column(name).ok_or_else(|| Error::UnknownMode(name.to_string()))
    }

    /// Appends `other`'s samples; merging is associative.
    pub fn merge(mut self, other: SampleBatch) -> Self {
        for (mine, theirs) in self.columns.iter_mut().zip(other.columns) {
            mine.extend(theirs);
        }
        self.n_samples += other.n_samples;
        self
    }
}

pub fn sample_protocol(params: &ProtocolParams, seed: u64, n: usize) -> Result<SampleBatch> {
    sample_protocol_partitioned(params, seed, n, 1)
}

/// Samples in `partitions` independent sub-batches (stream `i` for partition `i`).
pub fn sample_protocol_partitioned(params: &ProtocolParams, seed: u64, n: usize, partitions: usize) -> Result<SampleBatch> {
    params.validate()?;
    if n == 0 || partitions == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: n.min(partitions) as f64,
            constraint: ">= 1",
        });
    }
    let eve = params.eve()?;
    let sources = Sources {
        bob: epr_factor(params.v_b)?,
        alice: epr_factor(params.v_a)?,
        eve: epr_factor(eve.variance)?,
        detector: epr_factor(params.detector.ancilla_variance())?,
        amplifier: epr_factor(params.amplifier.noise())?,
    };
    let sizes: Vec<(usize, usize)> = (0..partitions)
        .map(|i| (i, n / partitions + usize::from(i < n % partitions)))
        .collect();
    let batches: Vec<SampleBatch> = sizes
        .into_par_iter()
        .map(|(i, size)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_partition(params, eve.splitter, &sources, &mut rng, seed, size)
        })
        .collect();
    Ok(batches
        .into_iter()
        .reduce(SampleBatch::merge)
        .expect("at least one partition"))
}

fn sample_partition<R: Rng>(params: &ProtocolParams, t_e: f64, src: &Sources, rng: &mut R, seed: u64, n: usize) -> SampleBatch {
    let heterodyne = params.detector.detection == Detection::Heterodyne;
    let mut names: Vec<&'static str> = COMMON.to_vec();
    if heterodyne {
        names.push("p_Bp");
    }
    let mut columns: Vec<Vec<f64>> = names.iter().map(|_| Vec::with_capacity(n)).collect();

    let t = params.channel.transmittance();
    let k = protocol::optimal_k(params).k;
    let eta = params.detector.efficiency;
    let g = params.amplifier.gain();

    for _ in 0..n {
        let (b1, b2) = draw_pair(rng, &src.bob);
        let (a1, a2) = draw_pair(rng, &src.alice);
        let (_e1, e2) = draw_pair(rng, &src.eve);
        let e0 = draw_vacuum(rng);

        // Two-mode attack and Alice's coupling splitter.
        let (e3, e5) = mix(t_e, e2, e0);
        let (a_in, _e4) = mix(t, b2, e3);
        let (a_out, a3) = mix(params.t_a, a_in, a2);
        let (b3, _e6) = mix(t, a_out, e5);

        // Alice heterodynes A1, Bob heterodynes B1.
        let (alice_x, alice_p) = mix(0.5, a1, draw_vacuum(rng));
        let (b1x, b1p) = mix(0.5, b1, draw_vacuum(rng));

        let b4 = match params.amplifier {
            AmplifierSpec::None => b3,
            AmplifierSpec::Psa { gain } => [gain.sqrt() * b3[0], b3[1] / gain.sqrt()],
            AmplifierSpec::Pia { .. } => {
                let (i0, _j) = draw_pair(rng, &src.amplifier);
                two_mode_amplify(g, b3, i0).0
            }
        };
        let (f0, _g) = draw_pair(rng, &src.detector);
        let (b5, _f) = mix(eta, b4, f0);

        let values: [f64; 16] = if heterodyne {
            let (b5x, b5p) = mix(0.5, b5, draw_vacuum(rng));
            let bx = b5x[0] - k * b1x[0];
            let bp = b5p[1] + k * b1p[1];
            [
                a1[0], a1[1], a3[0], a3[1], b1[0], b1[1], b3[0], b3[1], alice_x[0], alice_p[1], b1x[0], b1p[1], b5x[0],
                b5p[1], bx, bp,
            ]
        } else {
            let bx = b5[0] - k * b1x[0];
            [
                a1[0], a1[1], a3[0], a3[1], b1[0], b1[1], b3[0], b3[1], alice_x[0], alice_p[1], b1x[0], b1p[1], b5[0],
                b5[1], bx, 0.0,
            ]
        };
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    SampleBatch {
        seed,
        n_samples: n,
        detection: params.detector.detection,
        names,
        columns,
    }
}

fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

/// Unbiased sample covariance.
pub fn sample_covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() as f64 - 1.0)
}

/// Delta-method standard error of a Gaussian sample covariance:
/// `sqrt((σ_aa σ_bb + σ_ab²) / n)`.
pub fn covariance_standard_error(var_a: f64, var_b: f64, cov: f64, n: usize) -> f64 {
    ((var_a * var_b + cov * cov) / n as f64).sqrt()
}

/// Sampled covariance of `(A1, A3, B1, B3)` and the standard error of each entry.
pub fn source_covariance(batch: &SampleBatch) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let names = ["x_A1", "p_A1", "x_A3", "p_A3", "x_B1", "p_B1", "x_B3", "p_B3"];
    let cols = names.iter().map(|n| batch.require(n)).collect::<Result<Vec<_>>>()?;
    let cov = DMatrix::from_fn(8, 8, |i, j| sample_covariance(cols[i], cols[j]));
    let se = DMatrix::from_fn(8, 8, |i, j| covariance_standard_error(cov[(i, i)], cov[(j, j)], cov[(i, j)], batch.n_samples));
    Ok((cov, se))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationEstimate {
    pub bits: f64,
    pub standard_error: f64,
}

fn information_term(a: &[f64], b: &[f64], n: usize) -> Result<(f64, f64)> {
    let (va, vb, c) = (sample_covariance(a, a), sample_covariance(b, b), sample_covariance(a, b));
    if !(va > 0.0 && vb > 0.0) {
        return Err(Error::Numerical {
            reason: format!("degenerate sample variances {va}, {vb}"),
            matrix: DMatrix::from_row_slice(2, 2, &[va, c, c, vb]),
        });
    }
    let rho2 = c * c / (va * vb);
    let bits = -0.5 * (1.0 - rho2).log2();
    // SE(ρ) ≈ (1 - ρ²)/√n and dI/dρ = ρ / ((1 - ρ²) ln 2).
    let se = rho2.sqrt() / (std::f64::consts::LN_2 * (n as f64).sqrt());
    Ok((bits, se))
}

/// Gaussian plug-in estimate of `I(a:b)` from `(x_Ax, x_Bx)`, plus
/// `(p_Ap, p_Bp)` for heterodyne batches.
pub fn estimate_mutual_information(batch: &SampleBatch) -> Result<InformationEstimate> {
    let n = batch.n_samples;
    let (mut bits, x_se) = information_term(batch.require("x_Ax")?, batch.require("x_Bx")?, n)?;
    let mut var = x_se * x_se;
    if batch.detection == Detection::Heterodyne {
        let (b, se) = information_term(batch.require("p_Ap")?, batch.require("p_Bp")?, n)?;
        bits += b;
        var += se * se;
    }
    Ok(InformationEstimate { bits, standard_error: var.sqrt() })
}

/// Grid search for the `k` minimizing the sample variance of
/// `x_B5 - k x_B1x` over `points` values in `[0, k_max]`.
pub fn scan_optimal_k(batch: &SampleBatch, k_max: f64, points: usize) -> Result<f64> {
    let b5 = batch.require("x_B5")?;
    let b1 = batch.require("x_B1x")?;
    let (v5, v1, c) = (sample_covariance(b5, b5), sample_covariance(b1, b1), sample_covariance(b5, b1));
    let variance = |k: f64| v5 - 2.0 * k * c + k * k * v1;
    let step = k_max / (points.max(2) - 1) as f64;
    Ok((0..points)
        .map(|i| i as f64 * step)
        .min_by(|a, b| variance(*a).total_cmp(&variance(*b)))
        .unwrap_or(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub sampled: f64,
    pub analytic: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ValidationCheck {
    fn new(name: impl Into<String>, sampled: f64, analytic: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            sampled,
            analytic,
            tolerance,
            passed: (sampled - analytic).abs() <= tolerance,
        }
    }
}

/// Oracle suite at one parameter point: every entry of the `(A1, A3, B1, B3)`
/// covariance and the mutual information within five standard errors, the
/// scanned estimator gain and Bob's estimator variances within 1%.
pub fn validate(params: &ProtocolParams, seed: u64, n: usize, partitions: usize) -> Result<Vec<ValidationCheck>> {
    let batch = sample_protocol_partitioned(params, seed, n, partitions)?;
    let mut checks = Vec::new();

    let analytic = protocol::source_state_by_propagation(params)?;
    let (sampled, se) = source_covariance(&batch)?;
    let labels = ["x_A1", "p_A1", "x_A3", "p_A3", "x_B1", "p_B1", "x_B3", "p_B3"];
    for i in 0..8 {
        for j in i..8 {
            checks.push(ValidationCheck::new(
                format!("cov_{}_{}", labels[i], labels[j]),
                sampled[(i, j)],
                analytic.matrix()[(i, j)],
                STANDARD_ERRORS * se[(i, j)],
            ));
        }
    }

    let receiver = protocol::receiver_state(params)?;
    let info = crate::keyrate::mutual_information(params, &receiver)?;
    let estimate = estimate_mutual_information(&batch)?;
    checks.push(ValidationCheck::new(
        "mutual_information",
        estimate.bits,
        info.bits,
        STANDARD_ERRORS * estimate.standard_error,
    ));

    let k = protocol::optimal_k(params).k;
    let k_scan = scan_optimal_k(&batch, 4.0, 40_001)?;
    checks.push(ValidationCheck::new("estimator_gain_k", k_scan, k, 0.01 * k));

    let bx = batch.require("x_Bx")?;
    let var_bx = receiver.entry((protocol::BX, crate::gaussian::Quadrature::X), (protocol::BX, crate::gaussian::Quadrature::X))?;
    checks.push(ValidationCheck::new("var(x_Bx)", sample_covariance(bx, bx), var_bx, 0.01 * var_bx));
    if params.detector.detection == Detection::Heterodyne {
        let bp = batch.require("p_Bp")?;
        let var_bp = receiver.entry((protocol::BP, crate::gaussian::Quadrature::P), (protocol::BP, crate::gaussian::Quadrature::P))?;
        checks.push(ValidationCheck::new("var(p_Bp)", sample_covariance(bp, bp), var_bp, 0.01 * var_bp));
    }
    Ok(checks)
}
