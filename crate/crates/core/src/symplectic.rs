//! Symplectic transforms acting on quadratures: beam splitters, two-mode
//! squeezers and the orthogonal mixer onto collective environment modes.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::{omega_times, GaussianState};

/// Tolerance on `‖S Ω Sᵀ - Ω‖_max`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Real `2n x 2n` matrix satisfying `S Ω Sᵀ = Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    mat: DMatrix<f64>,
    n_modes: usize,
}

impl SymplecticMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 || !mat.nrows().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must be square with even size, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let s = Self { n_modes: mat.nrows() / 2, mat };
        let dev = s.symplectic_defect();
        if dev.is_nan() || dev > SYMPLECTIC_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic (defect {dev:e})"
            )));
        }
        Ok(s)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
            n_modes,
        }
    }

    /// Lifts an orthogonal `n x n` mode-mixing matrix to quadrature space.
    /// Orthogonal mode mixers are passive, hence symplectic.
    pub fn from_orthogonal(o: &DMatrix<f64>) -> Result<Self> {
        let n = o.nrows();
        if n == 0 || o.ncols() != n {
            return Err(Error::InvalidArgument("mode mixer must be square".into()));
        }
        let dev = (o * o.transpose() - DMatrix::identity(n, n)).amax();
        if dev > SYMPLECTIC_TOL {
            return Err(Error::InvalidArgument(format!(
                "mode mixer is not orthogonal (defect {dev:e})"
            )));
        }
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                mat[(2 * r, 2 * c)] = o[(r, c)];
                mat[(2 * r + 1, 2 * c + 1)] = o[(r, c)];
            }
        }
        Ok(Self { mat, n_modes: n })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `‖S Ω Sᵀ - Ω‖_max`.
    pub fn symplectic_defect(&self) -> f64 {
        let lhs = &self.mat * omega_times(&self.mat.transpose());
        let omega = omega_times(&DMatrix::identity(2 * self.n_modes, 2 * self.n_modes));
        (lhs - omega).amax()
    }

    /// `self · other`: applies `other` first.
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                actual: other.n_modes,
            });
        }
        Ok(Self {
            mat: &self.mat * &other.mat,
            n_modes: self.n_modes,
        })
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        Self {
            mat: self.mat.transpose(),
            n_modes: self.n_modes,
        }
    }

    /// Embeds this transform on the listed modes of an `n_total`-mode system.
    pub fn embed(&self, modes: &[usize], n_total: usize) -> Result<SymplecticMatrix> {
        if modes.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                actual: modes.len(),
            });
        }
        check_indices(modes, n_total)?;
        let mut mat = DMatrix::identity(2 * n_total, 2 * n_total);
        for (a, &ma) in modes.iter().enumerate() {
            for (b, &mb) in modes.iter().enumerate() {
                for (da, db) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    mat[(2 * ma + da, 2 * mb + db)] = self.mat[(2 * a + da, 2 * b + db)];
                }
            }
        }
        Ok(Self { mat, n_modes: n_total })
    }
}

fn check_indices(modes: &[usize], n_total: usize) -> Result<()> {
    for (k, &m) in modes.iter().enumerate() {
        if m >= n_total {
            return Err(Error::InvalidArgument(format!(
                "mode index {m} out of range for {n_total} modes"
            )));
        }
        if modes[..k].contains(&m) {
            return Err(Error::InvalidArgument(format!("mode index {m} repeated")));
        }
    }
    Ok(())
}

fn check_pair(t_name: &str, i: usize, j: usize, n_modes: usize) -> Result<()> {
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "{t_name} needs two distinct modes, got {i} twice"
        )));
    }
    check_indices(&[i, j], n_modes)
}

/// Beam splitter with amplitude transmittivity `t` between modes `i`, `j`:
/// `x_i -> t x_i - r x_j`, `x_j -> r x_i + t x_j`, with `r = √(1 - t²)`.
pub fn beam_splitter(t: f64, i: usize, j: usize, n_modes: usize) -> Result<SymplecticMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "beam-splitter transmittivity {t} outside [0, 1]"
        )));
    }
    check_pair("beam splitter", i, j, n_modes)?;
    let r = (1.0 - t * t).sqrt();
    let o = DMatrix::from_row_slice(2, 2, &[t, -r, r, t]);
    SymplecticMatrix::from_orthogonal(&o)?.embed(&[i, j], n_modes)
}

/// Two-mode squeezer that maps a two-mode vacuum to the two-mode squeezed
/// state with parameter `s` on modes `(i, j)`.
pub fn two_mode_squeezer(s: f64, i: usize, j: usize, n_modes: usize) -> Result<SymplecticMatrix> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("squeezing s = {s}")));
    }
    check_pair("two-mode squeezer", i, j, n_modes)?;
    let (ch, sh) = (s.cosh(), s.sinh());
    #[rustfmt::skip]
    let local = DMatrix::from_row_slice(4, 4, &[
        ch,  0.0, sh,  0.0,
        0.0, ch,  0.0, -sh,
        sh,  0.0, ch,  0.0,
        0.0, -sh, 0.0, ch,
    ]);
    SymplecticMatrix { mat: local, n_modes: 2 }.embed(&[i, j], n_modes)
}

/// Phase rotation of a single mode.
pub fn phase_rotation(phi: f64, i: usize, n_modes: usize) -> Result<SymplecticMatrix> {
    let (c, s) = (phi.cos(), phi.sin());
    let local = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    SymplecticMatrix { mat: local, n_modes: 1 }.embed(&[i], n_modes)
}

/// Single-mode squeezer `diag(e^{-s}, e^{s})`.
pub fn single_mode_squeezer(s: f64, i: usize, n_modes: usize) -> Result<SymplecticMatrix> {
    let local = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![(-s).exp(), s.exp()]));
    SymplecticMatrix { mat: local, n_modes: 1 }.embed(&[i], n_modes)
}

/// `cov -> S cov Sᵀ`, labels unchanged.
pub fn apply(state: &GaussianState, s: &SymplecticMatrix) -> Result<GaussianState> {
    if state.n_modes() != s.n_modes {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes(),
            actual: s.n_modes,
        });
    }
    let cov = &s.mat * state.cov() * s.mat.transpose();
    GaussianState::new_unchecked(state.modes().to_vec(), cov)
}

/// Orthogonal `N x N` real Fourier basis with uniform first row `1/√N`.
///
/// Rows `2k-1, 2k` are `√(2/N)·cos(2πkm/N)` and `√(2/N)·sin(2πkm/N)`; for even
/// `N` the last row is the alternating `(-1)^m/√N`.
pub fn collective_basis(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("collective mixer needs N >= 1".into()));
    }
    let nf = n as f64;
    let mut o = DMatrix::zeros(n, n);
    for m in 0..n {
        o[(0, m)] = 1.0 / nf.sqrt();
    }
    let pairs = (n - 1) / 2;
    let amp = (2.0 / nf).sqrt();
    for k in 1..=pairs {
        for m in 0..n {
            let phase = 2.0 * PI * (k * m) as f64 / nf;
            o[(2 * k - 1, m)] = amp * phase.cos();
            o[(2 * k, m)] = amp * phase.sin();
        }
    }
    if n.is_multiple_of(2) && n > 1 {
        for m in 0..n {
            o[(n - 1, m)] = if m % 2 == 0 { 1.0 } else { -1.0 } / nf.sqrt();
        }
    }
    Ok(o)
}

/// Quadrature-space lift of [`collective_basis`]: output mode 0 is
/// `c0 = Σ b_m / √N`.
pub fn collective_mixer(n: usize) -> Result<SymplecticMatrix> {
    SymplecticMatrix::from_orthogonal(&collective_basis(n)?)
}

/// In-place `cov -> B cov Bᵀ` for a beam splitter on modes `(i, j)`.
/// Touches only four rows and columns, so a chain of `N` splitters costs
/// `O(N · dim)` instead of `O(N · dim³)`.
pub(crate) fn beam_split_in_place(cov: &mut DMatrix<f64>, t: f64, i: usize, j: usize) {
    let r = (1.0 - t * t).sqrt();
    for d in 0..2 {
        let (a, b) = (2 * i + d, 2 * j + d);
        for c in 0..cov.ncols() {
            let (x, y) = (cov[(a, c)], cov[(b, c)]);
            cov[(a, c)] = t * x - r * y;
            cov[(b, c)] = r * x + t * y;
        }
    }
    for d in 0..2 {
        let (a, b) = (2 * i + d, 2 * j + d);
        for rr in 0..cov.nrows() {
            let (x, y) = (cov[(rr, a)], cov[(rr, b)]);
            cov[(rr, a)] = t * x - r * y;
            cov[(rr, b)] = r * x + t * y;
        }
    }
}
