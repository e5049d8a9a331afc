//! Zero-mean multimode Gaussian states over labelled frequency modes.
//!
//! Quadratures are ordered `(X1, P1, X2, P2, ...)` and normalized so that the
//! vacuum has unit variance in every quadrature. With that convention the
//! uncertainty principle reads `V + iJ >= 0`, where `J` is the block-diagonal
//! symplectic form built from `[[0, 1], [-1, 0]]`.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};

/// Absolute tolerance on matrix entries for symmetry and symplectic checks.
pub const MATRIX_TOL: f64 = 1e-12;
/// Slack allowed below 1 for symplectic eigenvalues.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

/// An optical frequency mode, identified by its detuning from the carrier in Hz.
#[derive(
    Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ModeLabel {
    detuning_hz: i64,
}

impl ModeLabel {
    pub const CARRIER: ModeLabel = ModeLabel { detuning_hz: 0 };

    pub const fn from_hz(detuning_hz: i64) -> Self {
        Self { detuning_hz }
    }

    /// Label for `mhz`, which must sit exactly on `grid`.
    pub fn from_mhz(mhz: f64, grid: FrequencyGrid) -> Result<Self> {
        grid.label(mhz)
    }

    pub fn detuning_hz(self) -> i64 {
        self.detuning_hz
    }

    pub fn detuning_mhz(self) -> f64 {
        self.detuning_hz as f64 / 1e6
    }

    pub fn shifted_hz(self, shift_hz: i64) -> Self {
        Self::from_hz(self.detuning_hz + shift_hz)
    }

    /// Mirror image about `center` (the partner sideband).
    pub fn mirrored(self, center: ModeLabel) -> Self {
        Self::from_hz(2 * center.detuning_hz - self.detuning_hz)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.detuning_hz == 0 {
            write!(f, "w")
        } else {
            write!(f, "w{:+}MHz", self.detuning_mhz())
        }
    }
}

/// Integer grid on which mode labels are constructed from MHz values.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FrequencyGrid {
    step_hz: u64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self { step_hz: 10_000 }
    }
}

impl FrequencyGrid {
    pub fn new(step_hz: u64) -> Self {
        assert!(step_hz > 0, "grid step must be positive");
        Self { step_hz }
    }

    pub fn step_hz(self) -> u64 {
        self.step_hz
    }

    /// Exact label for `mhz`; errors when the value is off-grid.
    pub fn label(self, mhz: f64) -> Result<ModeLabel> {
        let steps = mhz * 1e6 / self.step_hz as f64;
        let rounded = steps.round();
        if !steps.is_finite() || (steps - rounded).abs() > 1e-6 {
            return Err(Error::OffGrid {
                mhz,
                step_hz: self.step_hz,
            });
        }
        Ok(ModeLabel::from_hz(rounded as i64 * self.step_hz as i64))
    }

    /// Nearest on-grid label.
    pub fn snap(self, mhz: f64) -> ModeLabel {
        let steps = (mhz * 1e6 / self.step_hz as f64).round() as i64;
        ModeLabel::from_hz(steps * self.step_hz as i64)
    }
}

fn check_distinct(modes: &[ModeLabel]) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::DuplicateMode(*m));
        }
    }
    Ok(())
}

/// Standard symplectic form for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest entry of `|S J S^T - J|`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(s.nrows() / 2);
    max_abs_diff(&(s * &j * s.transpose()), &j)
}

/// A Gaussian state with zero mean.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    modes: Vec<ModeLabel>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking labels, shape, symmetry and physicality.
    pub fn new(modes: Vec<ModeLabel>, cov: DMatrix<f64>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_distinct(&modes)?;
        let dim = 2 * modes.len();
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: cov.nrows(),
            });
        }
        let asym = max_abs_diff(&cov, &cov.transpose());
        if asym > MATRIX_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let state = Self { modes, cov };
        let nu_min = state.min_symplectic_eigenvalue();
        if nu_min < 1.0 - UNCERTAINTY_SLACK {
            return Err(Error::Unphysical(nu_min));
        }
        Ok(state)
    }

    /// Vacuum on the given modes.
    pub fn vacuum(modes: &[ModeLabel]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_distinct(modes)?;
        let dim = 2 * modes.len();
        Ok(Self {
            modes: modes.to_vec(),
            cov: DMatrix::identity(dim, dim),
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn contains(&self, mode: ModeLabel) -> bool {
        self.modes.contains(&mode)
    }

    pub fn index_of(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .ok_or(Error::MissingMode(mode))
    }

    /// 2x2 covariance block of a single mode.
    pub fn mode_block(&self, mode: ModeLabel) -> Result<Matrix2<f64>> {
        let i = 2 * self.index_of(mode)?;
        Ok(Matrix2::new(
            self.cov[(i, i)],
            self.cov[(i, i + 1)],
            self.cov[(i + 1, i)],
            self.cov[(i + 1, i + 1)],
        ))
    }

    /// Applies `op` to its input modes, relabelling them with its output modes.
    pub fn apply_symplectic(&self, op: &SymplecticOp) -> Result<Self> {
        let defect = symplectic_defect(&op.matrix);
        if defect > MATRIX_TOL {
            return Err(Error::NotSymplectic(defect));
        }
        let positions = op
            .input_modes
            .iter()
            .map(|m| self.index_of(*m))
            .collect::<Result<Vec<_>>>()?;

        let mut modes = self.modes.clone();
        for (pos, out) in positions.iter().zip(&op.output_modes) {
            modes[*pos] = *out;
        }
        check_distinct(&modes)?;

        let dim = self.cov.nrows();
        let mut s = DMatrix::<f64>::identity(dim, dim);
        for (a, &pa) in positions.iter().enumerate() {
            for q in 0..2 {
                s[(2 * pa + q, 2 * pa + q)] = 0.0;
            }
            for (b, &pb) in positions.iter().enumerate() {
                for q in 0..2 {
                    for p in 0..2 {
                        s[(2 * pa + q, 2 * pb + p)] = op.matrix[(2 * a + q, 2 * b + p)];
                    }
                }
            }
        }
        let cov = &s * &self.cov * s.transpose();
        Ok(Self {
            modes,
            cov: symmetrize(cov),
        })
    }

    /// Pure-loss channel with transmissivity `eta` on one mode.
    pub fn apply_loss(&self, mode: ModeLabel, eta: f64) -> Result<Self> {
        check_unit_interval("efficiency", eta)?;
        let i = 2 * self.index_of(mode)?;
        let mut cov = self.cov.clone();
        let scale = eta.sqrt();
        for q in i..i + 2 {
            for k in 0..cov.ncols() {
                cov[(q, k)] *= scale;
            }
            for k in 0..cov.nrows() {
                cov[(k, q)] *= scale;
            }
        }
        cov[(i, i)] += 1.0 - eta;
        cov[(i + 1, i + 1)] += 1.0 - eta;
        Ok(Self {
            modes: self.modes.clone(),
            cov,
        })
    }

    /// Loss `eta` applied to every mode.
    pub fn apply_uniform_loss(&self, eta: f64) -> Result<Self> {
        let mut state = self.clone();
        for m in &self.modes {
            state = state.apply_loss(*m, eta)?;
        }
        Ok(state)
    }

    /// Variance of `cos(theta) X + sin(theta) P` for one mode.
    pub fn quadrature_variance(&self, mode: ModeLabel, theta: f64) -> Result<f64> {
        let b = self.mode_block(mode)?;
        let (s, c) = theta.sin_cos();
        Ok(c * c * b[(0, 0)] + s * s * b[(1, 1)] + 2.0 * s * c * b[(0, 1)])
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_distinct(keep)?;
        let idx = keep
            .iter()
            .map(|m| self.index_of(*m))
            .collect::<Result<Vec<_>>>()?;
        let dim = 2 * keep.len();
        let cov = DMatrix::from_fn(dim, dim, |r, c| {
            self.cov[(2 * idx[r / 2] + r % 2, 2 * idx[c / 2] + c % 2)]
        });
        Ok(Self {
            modes: keep.to_vec(),
            cov,
        })
    }

    /// Removes a single mode.
    pub fn trace_out(&self, mode: ModeLabel) -> Result<Self> {
        self.index_of(mode)?;
        let keep: Vec<_> = self.modes.iter().copied().filter(|m| *m != mode).collect();
        self.partial_trace(&keep)
    }

    /// Tensor product with another (uncorrelated) state.
    pub fn direct_sum(&self, other: &GaussianState) -> Result<Self> {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        check_distinct(&modes)?;
        let (n, m) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        Ok(Self { modes, cov })
    }

    /// Appends vacuum modes.
    pub fn with_vacuum(&self, extra: &[ModeLabel]) -> Result<Self> {
        self.direct_sum(&GaussianState::vacuum(extra)?)
    }

    /// Symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_eigenvalues(&self.cov)
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    /// `1 / sqrt(det V)`; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        1.0 / self.cov.determinant().sqrt()
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Symplectic eigenvalues of a positive-definite covariance matrix.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows() / 2;
    let eig = symmetrize(cov.clone()).symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&sqrt_vals)
        * eig.eigenvectors.transpose();
    // K = V^1/2 J V^1/2 is antisymmetric with eigenvalues +-i nu_k.
    let k = &root * symplectic_form(n) * &root;
    let ktk = symmetrize(k.transpose() * &k);
    let mut vals: Vec<f64> = ktk
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    vals.sort_by(f64::total_cmp);
    vals.into_iter().step_by(2).collect()
}

/// A Gaussian unitary acting on an ordered set of labelled modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    input_modes: Vec<ModeLabel>,
    output_modes: Vec<ModeLabel>,
}

impl SymplecticOp {
    pub fn new(
        matrix: DMatrix<f64>,
        input_modes: Vec<ModeLabel>,
        output_modes: Vec<ModeLabel>,
    ) -> Result<Self> {
        if input_modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_distinct(&input_modes)?;
        check_distinct(&output_modes)?;
        let dim = 2 * input_modes.len();
        if output_modes.len() != input_modes.len() {
            return Err(Error::Dimension {
                expected: input_modes.len(),
                got: output_modes.len(),
            });
        }
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let defect = symplectic_defect(&matrix);
        if defect > MATRIX_TOL {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(Self {
            matrix,
            input_modes,
            output_modes,
        })
    }

    pub fn identity(modes: &[ModeLabel]) -> Result<Self> {
        let dim = 2 * modes.len();
        Self::new(DMatrix::identity(dim, dim), modes.to_vec(), modes.to_vec())
    }

    /// Passive linear-optics map `a_out = U a_in` for a unitary `U`
    /// (rows index outputs, columns inputs).
    pub fn from_passive_unitary(
        u: &DMatrix<Complex64>,
        input_modes: Vec<ModeLabel>,
        output_modes: Vec<ModeLabel>,
    ) -> Result<Self> {
        Self::new(passive_symplectic(u), input_modes, output_modes)
    }

    /// Real beam splitter with amplitude transmissivity `cos(angle)`.
    pub fn beam_splitter(a: ModeLabel, b: ModeLabel, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(c, 0.0),
            ],
        );
        Self::from_passive_unitary(&u, vec![a, b], vec![a, b])
    }

    pub fn phase_shift(mode: ModeLabel, phi: f64) -> Result<Self> {
        let u = DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi));
        Self::from_passive_unitary(&u, vec![mode], vec![mode])
    }

    /// Single-mode squeezer: vacuum goes to `diag(e^{-2r}, e^{2r})`.
    pub fn squeezer(mode: ModeLabel, r: f64) -> Result<Self> {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![(-r).exp(), r.exp()]));
        Self::new(m, vec![mode], vec![mode])
    }

    /// Two-mode squeezer whose symmetric X and antisymmetric P combinations are
    /// squeezed: vacuum goes to a state with `Var(X1 + X2)/2 = e^{-2r}`.
    pub fn two_mode_squeezer(a: ModeLabel, b: ModeLabel, r: f64) -> Result<Self> {
        let (c, s) = (r.cosh(), r.sinh());
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, -s,  0.0,
            0.0, c,   0.0, s,
            -s,  0.0, c,   0.0,
            0.0, s,   0.0, c,
        ]);
        Self::new(m, vec![a, b], vec![a, b])
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn input_modes(&self) -> &[ModeLabel] {
        &self.input_modes
    }

    pub fn output_modes(&self) -> &[ModeLabel] {
        &self.output_modes
    }

    /// `next` after `self`; `next` must consume exactly `self`'s outputs in order.
    pub fn then(&self, next: &SymplecticOp) -> Result<Self> {
        if next.input_modes != self.output_modes {
            return Err(Error::Config(
                "composed operations must share the intermediate mode ordering".into(),
            ));
        }
        Self::new(
            &next.matrix * &self.matrix,
            self.input_modes.clone(),
            next.output_modes.clone(),
        )
    }
}

/// Real symplectic matrix of a passive unitary in `(X, P)` interleaved order.
pub fn passive_symplectic(u: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (rows, cols) = u.shape();
    let mut s = DMatrix::zeros(2 * rows, 2 * cols);
    for j in 0..rows {
        for k in 0..cols {
            let z = u[(j, k)];
            s[(2 * j, 2 * k)] = z.re;
            s[(2 * j, 2 * k + 1)] = -z.im;
            s[(2 * j + 1, 2 * k)] = z.im;
            s[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    s
}

/// Convenience free function mirroring [`GaussianState::vacuum`].
pub fn vacuum_state(modes: &[ModeLabel]) -> Result<GaussianState> {
    GaussianState::vacuum(modes)
}
