//! Gaussian-state algebra over labelled modes.
//!
//! States are zero-mean and described by their covariance matrix in shot-noise
//! units (vacuum quadrature variance 1). Quadratures are ordered
//! `(x1, p1, x2, p2, ...)`, one `(x, p)` pair per mode label. Every operation
//! returns a new value; nothing is mutated in place.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{check_range, Error, Result};

/// Largest tolerated asymmetry when a matrix is handed in from outside.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// A state is physical iff every symplectic eigenvalue is at least `1 - PHYSICAL_TOL`.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Constructors guarantee `max |S Ω Sᵀ - Ω| < SYMPLECTIC_TOL`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Relative tolerance used to pair the `±λ` eigenvalues of `Ωγ`.
const PAIRING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quadrature::X => f.write_str("x"),
            Quadrature::P => f.write_str("p"),
        }
    }
}

/// The symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Entropy in bits of a thermal mode with mean photon number `x`:
/// `(x+1) log2(x+1) - x log2 x`, with the `x -> 0` limit taken explicitly.
pub fn thermal_entropy_bits(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Covariance matrix of a zero-mean Gaussian state over an ordered list of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: Vec<String>,
    data: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps a matrix after checking its shape, label uniqueness and symmetry.
    /// The stored matrix is the symmetrized input.
    pub fn new<S: Into<String>>(modes: Vec<S>, data: DMatrix<f64>) -> Result<Self> {
        let modes: Vec<String> = modes.into_iter().map(Into::into).collect();
        check_unique(&modes)?;
        let dim = 2 * modes.len();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: data.nrows().max(data.ncols()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                reason: "covariance matrix has non-finite entries".into(),
                matrix: data,
            });
        }
        let asym = max_abs(&(&data - data.transpose()));
        if asym > SYMMETRY_TOL * max_abs(&data).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            modes,
            data: symmetrize(&data),
        })
    }

    /// Vacuum on each of the given modes (identity covariance).
    pub fn vacuum(labels: &[&str]) -> Result<Self> {
        let n = labels.len();
        Self::new(labels.to_vec(), DMatrix::identity(2 * n, 2 * n))
    }

    /// Two-mode squeezed vacuum with variance `v` on each arm:
    /// `[[v I, c σz], [c σz, v I]]` with `c = sqrt(v² - 1)`.
    pub fn epr(v: f64, first: &str, second: &str) -> Result<Self> {
        check_range("EPR variance", v, v >= 1.0, "V >= 1")?;
        let c = (v * v - 1.0).sqrt();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = v;
        m[(1, 1)] = v;
        m[(2, 2)] = v;
        m[(3, 3)] = v;
        m[(0, 2)] = c;
        m[(2, 0)] = c;
        m[(1, 3)] = -c;
        m[(3, 1)] = -c;
        Self::new(vec![first, second], m)
    }

    /// Single-mode thermal state `v I`.
    pub fn thermal(v: f64, label: &str) -> Result<Self> {
        check_range("thermal variance", v, v >= 1.0, "v >= 1")?;
        Self::new(vec![label], DMatrix::identity(2, 2) * v)
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn index_of(&self, mode: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| Error::UnknownMode(mode.to_string()))
    }

    /// Second moment `<q_a q_b>` between two quadratures of (possibly equal) modes.
    pub fn entry(&self, a: (&str, Quadrature), b: (&str, Quadrature)) -> Result<f64> {
        let i = 2 * self.index_of(a.0)? + a.1.offset();
        let j = 2 * self.index_of(b.0)? + b.1.offset();
        Ok(self.data[(i, j)])
    }

    /// Direct sum; modes of `self` come first.
    pub fn tensor(&self, other: &CovarianceMatrix) -> Result<Self> {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        check_unique(&modes)?;
        let (n, m) = (self.data.nrows(), other.data.nrows());
        let mut data = DMatrix::zeros(n + m, n + m);
        data.view_mut((0, 0), (n, n)).copy_from(&self.data);
        data.view_mut((n, n), (m, m)).copy_from(&other.data);
        Ok(Self { modes, data })
    }

    /// Congruence `S γ Sᵀ` with `S` acting on `targets` and identity elsewhere.
    pub fn apply(&self, s: &SymplecticTransform, targets: &[&str]) -> Result<Self> {
        let idx = self.quadrature_indices(targets)?;
        if s.n_modes() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * targets.len(),
                found: s.matrix().nrows(),
            });
        }
        let sm = s.matrix();
        // Rows of the targets first, then columns: E γ Eᵀ without forming E.
        let mut rows = self.data.clone();
        for (a, &i) in idx.iter().enumerate() {
            for c in 0..self.data.ncols() {
                rows[(i, c)] = idx
                    .iter()
                    .enumerate()
                    .map(|(b, &j)| sm[(a, b)] * self.data[(j, c)])
                    .sum();
            }
        }
        let mut out = rows.clone();
        for (a, &i) in idx.iter().enumerate() {
            for r in 0..rows.nrows() {
                out[(r, i)] = idx
                    .iter()
                    .enumerate()
                    .map(|(b, &j)| rows[(r, j)] * sm[(a, b)])
                    .sum();
            }
        }
        Ok(Self {
            modes: self.modes.clone(),
            data: symmetrize(&out),
        })
    }

    /// Like [`apply`](Self::apply), then renames `targets[i]` to `outputs[i]`.
    pub fn apply_as(
        &self,
        s: &SymplecticTransform,
        targets: &[&str],
        outputs: &[&str],
    ) -> Result<Self> {
        if targets.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: targets.len(),
                found: outputs.len(),
            });
        }
        let mut out = self.apply(s, targets)?;
        for (t, o) in targets.iter().zip(outputs) {
            let i = out.index_of(t)?;
            out.modes[i] = o.to_string();
        }
        check_unique(&out.modes)?;
        Ok(out)
    }

    /// Reduced state on `labels`, in the order given.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self> {
        let idx = self.quadrature_indices(labels)?;
        let data = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.data[(idx[r], idx[c])]);
        Ok(Self {
            modes: labels.iter().map(|s| s.to_string()).collect(),
            data,
        })
    }

    /// Post-measurement state of the remaining modes after a homodyne
    /// measurement of `quadrature` on `mode`:
    /// `γ_A - σᵀ (X γ_B X)⁻ σ`, where the pseudo-inverse keeps only the
    /// measured variance.
    pub fn condition_homodyne(&self, mode: &str, quadrature: Quadrature) -> Result<Self> {
        let k = self.index_of(mode)?;
        let measured = 2 * k + quadrature.offset();
        let variance = self.data[(measured, measured)];
        if !(variance > f64::EPSILON * max_abs(&self.data)) {
            return Err(Error::DegenerateMeasurement {
                mode: mode.to_string(),
                quadrature,
                variance,
            });
        }
        let rest: Vec<usize> = (0..self.data.nrows())
            .filter(|&i| i / 2 != k)
            .collect();
        let data = DMatrix::from_fn(rest.len(), rest.len(), |r, c| {
            let (i, j) = (rest[r], rest[c]);
            self.data[(i, j)] - self.data[(i, measured)] * self.data[(measured, j)] / variance
        });
        let mut modes = self.modes.clone();
        modes.remove(k);
        Ok(Self {
            modes,
            data: symmetrize(&data),
        })
    }

    /// Symplectic eigenvalues: the moduli of the eigenvalues of `iΩγ`,
    /// which come in `±λ` pairs.
    ///
    /// With `γ = L Lᵀ`, `A = Lᵀ Ω L` is antisymmetric and similar to `Ωγ`, so
    /// the eigenvalues of the symmetric `AᵀA` are the `λ²`, each twice. A
    /// matrix that is not positive definite has no such factor.
    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        let n = self.n_modes();
        let l = match self.data.clone().cholesky() {
            Some(ch) => ch.l(),
            None => {
                let min = self.data.symmetric_eigenvalues().min();
                return Err(Error::NotPositiveDefinite(min));
            }
        };
        let a = l.transpose() * symplectic_form(n) * &l;
        let ata = a.transpose() * &a;
        let ata = symmetrize(&ata);
        let mut moduli: Vec<f64> = SymmetricEigen::new(ata)
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let mut values = Vec::with_capacity(n);
        for pair in moduli.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            if (a - b).abs() > PAIRING_TOL * a.max(1.0) {
                return Err(Error::Numerical {
                    reason: format!("eigenvalues of Ωγ do not pair: {a} vs {b}"),
                    matrix: self.data.clone(),
                });
            }
            values.push(0.5 * (a + b));
        }
        Ok(SymplecticSpectrum { values })
    }

    pub fn is_physical(&self) -> Result<bool> {
        match self.symplectic_spectrum() {
            Ok(s) => Ok(s.is_physical()),
            Err(Error::NotPositiveDefinite(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        self.symplectic_spectrum()?.entropy()
    }

    fn quadrature_indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        check_unique(labels)?;
        let mut idx = Vec::with_capacity(2 * labels.len());
        for l in labels {
            let k = self.index_of(l)?;
            idx.push(2 * k);
            idx.push(2 * k + 1);
        }
        Ok(idx)
    }
}

fn check_unique<S: AsRef<str>>(labels: &[S]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].iter().any(|b| b.as_ref() == a.as_ref()) {
            return Err(Error::DuplicateMode(a.as_ref().to_string()));
        }
    }
    Ok(())
}

/// Symplectic eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn is_physical(&self) -> bool {
        self.min() >= 1.0 - PHYSICAL_TOL
    }

    /// `Σ G((λ - 1) / 2)` in bits. Eigenvalues within `PHYSICAL_TOL` below
    /// one are clamped to one; anything lower is rejected.
    pub fn entropy(&self) -> Result<f64> {
        if !self.is_physical() {
            return Err(Error::Unphysical(self.min()));
        }
        Ok(self
            .values
            .iter()
            .map(|&l| thermal_entropy_bits((l.max(1.0) - 1.0) / 2.0))
            .sum())
    }
}

/// Linear phase-space map `S` with `S Ω Sᵀ = Ω`, acting on `n_modes()` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    data: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Accepts any square even-sized matrix that preserves `Ω` within tolerance.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() || !data.nrows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: data.nrows() + data.nrows() % 2,
                found: data.ncols(),
            });
        }
        let s = Self { data };
        let err = s.symplectic_error();
        if !(err < SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic(err));
        }
        Ok(s)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            data: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Beam splitter of transmittance `t`:
    /// `[[√t I, √(1-t) I], [-√(1-t) I, √t I]]`.
    pub fn beam_splitter(t: f64) -> Result<Self> {
        check_range("beam splitter transmittance", t, (0.0..=1.0).contains(&t), "0 <= T <= 1")?;
        let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
        #[rustfmt::skip]
        let data = DMatrix::from_row_slice(4, 4, &[
             a, 0.0,   b, 0.0,
           0.0,   a, 0.0,   b,
            -b, 0.0,   a, 0.0,
           0.0,  -b, 0.0,   a,
        ]);
        Ok(Self { data })
    }

    /// Phase-sensitive amplifier, noiseless gain on `x`: `diag(√g, 1/√g)`.
    pub fn psa(g: f64) -> Result<Self> {
        check_range("PSA gain", g, g >= 1.0, "g >= 1")?;
        let s = g.sqrt();
        Ok(Self {
            data: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![s, 1.0 / s])),
        })
    }

    /// Phase-insensitive amplifier on (signal, ancilla):
    /// `[[√g I, √(g-1) σz], [√(g-1) σz, √g I]]`.
    pub fn pia(g: f64) -> Result<Self> {
        check_range("PIA gain", g, g >= 1.0, "g >= 1")?;
        let (a, b) = (g.sqrt(), (g - 1.0).sqrt());
        #[rustfmt::skip]
        let data = DMatrix::from_row_slice(4, 4, &[
             a, 0.0,   b, 0.0,
           0.0,   a, 0.0,  -b,
             b, 0.0,   a, 0.0,
           0.0,  -b, 0.0,   a,
        ]);
        Ok(Self { data })
    }

    /// CNOT-type gate used for the `x` estimator: `x1 -> x1 - k x2`, `p2 -> p2 + k p1`.
    pub fn cnot_x(k: f64) -> Result<Self> {
        check_range("CNOT gain", k, k.is_finite(), "finite k")?;
        #[rustfmt::skip]
        let data = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0,  -k, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0,   k, 0.0, 1.0,
        ]);
        Ok(Self { data })
    }

    /// CNOT-type gate used for the `p` estimator: `p1 -> p1 + k p2`, `x2 -> x2 - k x1`.
    pub fn cnot_p(k: f64) -> Result<Self> {
        check_range("CNOT gain", k, k.is_finite(), "finite k")?;
        #[rustfmt::skip]
        let data = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0,   k,
             -k, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        ]);
        Ok(Self { data })
    }

    pub fn n_modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// `self · other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &SymplecticTransform) -> Result<Self> {
        if self.data.nrows() != other.data.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.data.nrows(),
                found: other.data.nrows(),
            });
        }
        Ok(Self {
            data: &self.data * &other.data,
        })
    }

    /// `max |S Ω Sᵀ - Ω|`.
    pub fn symplectic_error(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        max_abs(&(&self.data * &omega * self.data.transpose() - omega))
    }

    /// Full-size matrix acting on `modes`: `self` on `targets`, identity elsewhere.
    pub fn embed<S: AsRef<str>>(&self, modes: &[S], targets: &[&str]) -> Result<DMatrix<f64>> {
        if self.n_modes() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * targets.len(),
                found: self.data.nrows(),
            });
        }
        check_unique(targets)?;
        let mut idx = Vec::with_capacity(2 * targets.len());
        for t in targets {
            let k = modes
                .iter()
                .position(|m| m.as_ref() == *t)
                .ok_or_else(|| Error::UnknownMode(t.to_string()))?;
            idx.push(2 * k);
            idx.push(2 * k + 1);
        }
        let dim = 2 * modes.len();
        let mut full = DMatrix::identity(dim, dim);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                full[(i, j)] = self.data[(a, b)];
            }
        }
        Ok(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_is_identity() {
        let v = CovarianceMatrix::vacuum(&["a", "b"]).unwrap();
        assert_eq!(v.matrix(), &DMatrix::identity(4, 4));
        let s = CovarianceMatrix::vacuum(&["a", "b", "c"]).unwrap().symplectic_spectrum().unwrap();
        for l in s.values() {
            assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn epr_entries_and_purity() {
        let e = CovarianceMatrix::epr(40.0, "a", "b").unwrap();
        assert_abs_diff_eq!(e.entry(("a", Quadrature::X), ("b", Quadrature::X)).unwrap(), 39.987498, epsilon = 1e-6);
        assert_abs_diff_eq!(e.entry(("a", Quadrature::P), ("b", Quadrature::P)).unwrap(), -1599f64.sqrt(), epsilon = 1e-12);
        assert_eq!(CovarianceMatrix::epr(1.0, "a", "b").unwrap().matrix(), &DMatrix::identity(4, 4));
        for v in [1.0, 2.0, 40.0, 1000.0] {
            let s = CovarianceMatrix::epr(v, "a", "b").unwrap().symplectic_spectrum().unwrap();
            assert_eq!(s.len(), 2);
            for l in s.values() {
                assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-9);
            }
        }
        assert!(matches!(CovarianceMatrix::epr(0.9, "a", "b"), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn thermal_entropy_values() {
        assert_eq!(CovarianceMatrix::thermal(1.0, "f").unwrap(), CovarianceMatrix::vacuum(&["f"]).unwrap());
        assert_abs_diff_eq!(CovarianceMatrix::thermal(3.0, "f").unwrap().entropy().unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(thermal_entropy_bits(0.5), 1.5 * 1.5f64.log2() + 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_entropy_bits(0.5), 1.377443, epsilon = 1e-6);
        assert_eq!(thermal_entropy_bits(0.0), 0.0);
        assert!(CovarianceMatrix::thermal(0.5, "f").is_err());
        let detector = 1.0 + 0.015 / (1.0 - 0.552);
        assert_abs_diff_eq!(detector, 1.033482, epsilon = 1e-6);
    }

    #[test]
    fn tensor_rejects_duplicates() {
        let a = CovarianceMatrix::vacuum(&["a"]).unwrap();
        assert!(matches!(a.tensor(&a), Err(Error::DuplicateMode(_))));
        let t = CovarianceMatrix::epr(3.0, "a", "b")
            .unwrap()
            .tensor(&CovarianceMatrix::thermal(2.0, "c").unwrap())
            .unwrap();
        assert_eq!(t.modes(), &["a", "b", "c"]);
        assert_eq!(t.matrix().nrows(), 6);
        assert_eq!(t.matrix()[(4, 0)], 0.0);
    }

    #[test]
    fn transform_constructors() {
        assert_eq!(SymplecticTransform::beam_splitter(1.0).unwrap(), SymplecticTransform::identity(2));
        let swap = SymplecticTransform::beam_splitter(0.0).unwrap();
        assert_eq!(swap.matrix()[(0, 2)], 1.0);
        assert_eq!(swap.matrix()[(2, 0)], -1.0);
        assert!(SymplecticTransform::beam_splitter(1.2).is_err());
        assert_eq!(SymplecticTransform::psa(1.0).unwrap(), SymplecticTransform::identity(1));
        let psa = SymplecticTransform::psa(4.0).unwrap();
        assert_eq!(psa.matrix()[(0, 0)], 2.0);
        assert_eq!(psa.matrix()[(1, 1)], 0.5);
        assert_abs_diff_eq!(SymplecticTransform::psa(15.0).unwrap().matrix().determinant(), 1.0, epsilon = 1e-12);
        assert!(SymplecticTransform::psa(0.5).is_err());
        assert_eq!(SymplecticTransform::pia(1.0).unwrap(), SymplecticTransform::identity(2));
        assert!(SymplecticTransform::pia(0.99).is_err());
        assert_eq!(SymplecticTransform::cnot_x(0.0).unwrap(), SymplecticTransform::identity(2));
        assert_eq!(SymplecticTransform::cnot_p(0.0).unwrap(), SymplecticTransform::identity(2));
        assert!(SymplecticTransform::cnot_x(f64::NAN).is_err());
        let gx = SymplecticTransform::cnot_x(3.7).unwrap();
        assert_eq!(gx.matrix().row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, -3.7, 0.0]);
        for s in [
            SymplecticTransform::beam_splitter(0.4).unwrap(),
            SymplecticTransform::pia(15.0).unwrap(),
            gx,
            SymplecticTransform::cnot_p(3.7).unwrap(),
        ] {
            assert!(s.symplectic_error() < SYMPLECTIC_TOL);
        }
        assert!(matches!(
            SymplecticTransform::from_matrix(DMatrix::identity(2, 2) * 2.0),
            Err(Error::NotSymplectic(_))
        ));
    }

    #[test]
    fn pia_output_variance() {
        // Vacuum signal, vacuum ancilla (N = 1): output variance 2g - 1.
        let g = 15.0;
        let out = CovarianceMatrix::vacuum(&["s", "i"])
            .unwrap()
            .apply(&SymplecticTransform::pia(g).unwrap(), &["s", "i"])
            .unwrap();
        assert_abs_diff_eq!(out.entry(("s", Quadrature::X), ("s", Quadrature::X)).unwrap(), 2.0 * g - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_on_non_adjacent_modes_matches_embedding() {
        let state = CovarianceMatrix::epr(5.0, "a", "b")
            .unwrap()
            .tensor(&CovarianceMatrix::thermal(2.0, "c").unwrap())
            .unwrap()
            .tensor(&CovarianceMatrix::epr(3.0, "d", "e").unwrap())
            .unwrap();
        let s = SymplecticTransform::cnot_x(0.7).unwrap();
        let out = state.apply(&s, &["e", "a"]).unwrap();
        let full = s.embed(state.modes(), &["e", "a"]).unwrap();
        let expected = &full * state.matrix() * full.transpose();
        assert!(max_abs(&(out.matrix() - expected)) < 1e-12);
        assert!(matches!(state.apply(&s, &["a", "zz"]), Err(Error::UnknownMode(_))));
        assert!(matches!(state.apply(&s, &["a"]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(state.apply(&s, &["a", "a"]), Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn psa_unit_gain_is_noop() {
        let state = CovarianceMatrix::epr(40.0, "a", "b").unwrap();
        let out = state.apply(&SymplecticTransform::psa(1.0).unwrap(), &["b"]).unwrap();
        assert_eq!(out, state);
    }

    #[test]
    fn conditioning_epr_on_x() {
        let v = 40.0;
        let cond = CovarianceMatrix::epr(v, "a", "b")
            .unwrap()
            .condition_homodyne("b", Quadrature::X)
            .unwrap();
        assert_eq!(cond.modes(), &["a"]);
        assert_abs_diff_eq!(cond.matrix()[(0, 0)], 1.0 / v, epsilon = 1e-12);
        assert_abs_diff_eq!(cond.matrix()[(1, 1)], v, epsilon = 1e-12);
    }

    #[test]
    fn conditioning_uncorrelated_mode_changes_nothing() {
        let a = CovarianceMatrix::epr(7.0, "a", "b").unwrap();
        let joint = a.tensor(&CovarianceMatrix::thermal(3.0, "c").unwrap()).unwrap();
        let cond = joint.condition_homodyne("c", Quadrature::P).unwrap();
        assert_eq!(cond.matrix(), a.matrix());
    }

    #[test]
    fn degenerate_measurement_is_reported() {
        let mut m = DMatrix::identity(4, 4);
        m[(2, 2)] = 0.0;
        let state = CovarianceMatrix::new(vec!["a", "b"], m).unwrap();
        assert!(matches!(
            state.condition_homodyne("b", Quadrature::X),
            Err(Error::DegenerateMeasurement { .. })
        ));
    }

    #[test]
    fn rejects_malformed_input() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 0.5;
        assert!(matches!(CovarianceMatrix::new(vec!["a", "b"], m), Err(Error::NotSymmetric(_))));
        assert!(matches!(
            CovarianceMatrix::new(vec!["a"], DMatrix::identity(4, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unphysical_entropy_is_rejected() {
        let squeezed_too_far = CovarianceMatrix::new(vec!["a"], DMatrix::identity(2, 2) * 0.5).unwrap();
        assert!(!squeezed_too_far.is_physical().unwrap());
        assert!(matches!(squeezed_too_far.entropy(), Err(Error::Unphysical(_))));
    }
}
