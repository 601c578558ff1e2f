//! Zero-mean Gaussian states represented by their covariance matrix.
//!
//! Quadratures are ordered mode-major, `(q1, p1, q2, p2, ...)`, and the
//! vacuum covariance is the identity. A state is physical when every
//! symplectic eigenvalue is at least one.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Absolute tolerance on `min ν - 1` below which a state counts as unphysical.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Relative asymmetry above which a matrix is rejected as malformed.
const SYMMETRY_TOL: f64 = 1e-9;

/// Gaussian state: ordered mode labels plus a `2n x 2n` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: Vec<String>,
    cov: DMatrix<f64>,
}

/// Non-empty ordered list of distinct mode labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSelection {
    labels: Vec<String>,
}

impl ModeSelection {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSelection("empty selection".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSelection(format!("label `{l}` repeated")));
            }
        }
        Ok(Self { labels })
    }

    /// Shorthand for literal label lists; panics on an invalid list.
    pub fn of(labels: &[&str]) -> Self {
        Self::new(labels.iter().copied()).expect("valid literal selection")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    /// Mode indices of the selection inside `state`, in selection order.
    pub fn resolve(&self, state: &GaussianState) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .map(|l| {
                state
                    .index_of(l)
                    .ok_or_else(|| Error::InvalidSelection(format!("unknown mode `{l}`")))
            })
            .collect()
    }
}

impl GaussianState {
    /// Builds a state, symmetrizing `cov` and rejecting unphysical input.
    pub fn new<S: Into<String>>(modes: Vec<S>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked(modes, cov)?;
        let (ok, margin) = state.is_physical()?;
        if !ok {
            return Err(Error::UnphysicalState(format!(
                "minimum symplectic eigenvalue is 1 {margin:+e}"
            )));
        }
        Ok(state)
    }

    /// Like [`GaussianState::new`] but skips the uncertainty-principle check.
    /// Shape, finiteness and label uniqueness are still enforced.
    pub fn new_unchecked<S: Into<String>>(modes: Vec<S>, cov: DMatrix<f64>) -> Result<Self> {
        let modes: Vec<String> = modes.into_iter().map(Into::into).collect();
        if modes.is_empty() {
            return Err(Error::InvalidArgument("a state needs at least one mode".into()));
        }
        let mut seen = HashSet::new();
        for m in &modes {
            if !seen.insert(m.as_str()) {
                return Err(Error::DuplicateMode(m.clone()));
            }
        }
        check_shape(&cov)?;
        if cov.nrows() != 2 * modes.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * modes.len(),
                actual: cov.nrows(),
            });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { modes, cov })
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m == label)
    }

    /// Returns the same covariance under new labels.
    pub fn relabel<S: Into<String>>(self, modes: Vec<S>) -> Result<Self> {
        Self::new_unchecked(modes, self.cov)
    }

    /// The `2 x 2` covariance block between modes `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        self.cov.view((2 * i, 2 * j), (2, 2)).into_owned()
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_spectrum(&self.cov)
    }

    /// `(physical, min ν - 1)`.
    pub fn is_physical(&self) -> Result<(bool, f64)> {
        let nu = self.symplectic_eigenvalues()?;
        let margin = nu[0] - 1.0;
        Ok((margin >= -PHYSICAL_TOL, margin))
    }
}

/// `n` vacuum modes labelled `m0, m1, ...`.
pub fn vacuum_state(n_modes: usize) -> Result<GaussianState> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("n_modes must be positive".into()));
    }
    GaussianState::new_unchecked(default_labels(n_modes), DMatrix::identity(2 * n_modes, 2 * n_modes))
}

/// Single-mode thermal state with `n_tilde = 2 n̄ + 1`.
pub fn thermal_state(n_tilde: f64) -> Result<GaussianState> {
    if !n_tilde.is_finite() {
        return Err(Error::InvalidArgument(format!("n_tilde = {n_tilde}")));
    }
    if n_tilde < 1.0 {
        return Err(Error::UnphysicalState(format!(
            "thermal variance {n_tilde} is below the vacuum level"
        )));
    }
    GaussianState::new_unchecked(default_labels(1), DMatrix::from_diagonal_element(2, 2, n_tilde))
}

/// Two-mode squeezed vacuum with squeezing `s`.
pub fn two_mode_squeezed(s: f64) -> Result<GaussianState> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("squeezing s = {s}")));
    }
    let (ch, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        ch,  0.0, sh,  0.0,
        0.0, ch,  0.0, -sh,
        sh,  0.0, ch,  0.0,
        0.0, -sh, 0.0, ch,
    ]);
    GaussianState::new_unchecked(default_labels(2), cov)
}

/// Direct sum of two states with disjoint labels.
pub fn tensor(a: &GaussianState, b: &GaussianState) -> Result<GaussianState> {
    if let Some(dup) = b.modes.iter().find(|m| a.index_of(m).is_some()) {
        return Err(Error::DuplicateMode(dup.clone()));
    }
    let (na, nb) = (a.cov.nrows(), b.cov.nrows());
    let mut cov = DMatrix::zeros(na + nb, na + nb);
    cov.view_mut((0, 0), (na, na)).copy_from(&a.cov);
    cov.view_mut((na, na), (nb, nb)).copy_from(&b.cov);
    let modes = a.modes.iter().chain(&b.modes).cloned().collect::<Vec<_>>();
    GaussianState::new_unchecked(modes, cov)
}

/// Gaussian partial trace: keeps the selected modes in selection order.
pub fn reduce(state: &GaussianState, keep: &ModeSelection) -> Result<GaussianState> {
    let idx = keep.resolve(state)?;
    Ok(GaussianState {
        modes: keep.labels().to_vec(),
        cov: principal_submatrix(&state.cov, &idx),
    })
}

pub(crate) fn principal_submatrix(cov: &DMatrix<f64>, modes: &[usize]) -> DMatrix<f64> {
    let quad: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    DMatrix::from_fn(quad.len(), quad.len(), |r, c| cov[(quad[r], quad[c])])
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("m{k}")).collect()
}

fn check_shape(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::MalformedState(format!(
            "covariance must be square with even positive size, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::MalformedState("non-finite covariance entry".into()));
    }
    Ok(())
}

/// `Ω·M` for the block-diagonal form `Ω = ⊕ [[0, 1], [-1, 0]]`.
pub(crate) fn omega_times(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..m.nrows() / 2 {
        out.row_mut(2 * k).copy_from(&m.row(2 * k + 1));
        out.row_mut(2 * k + 1).copy_from(&(-m.row(2 * k)));
    }
    out
}

/// The standard symplectic form on `n` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    omega_times(&DMatrix::identity(2 * n_modes, 2 * n_modes))
}

/// Symplectic eigenvalues of a symmetric positive-definite matrix, ascending.
///
/// With `V = L Lᵀ`, the antisymmetric `K = Lᵀ Ω L` is similar to `Ω V`, so
/// the eigenvalues of the symmetric matrix `Kᵀ K` are the `ν²`, each twice.
pub fn symplectic_spectrum(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_shape(cov)?;
    let scale = cov.amax().max(1.0);
    if (cov - cov.transpose()).amax() > SYMMETRY_TOL * scale {
        return Err(Error::MalformedState("covariance is not symmetric".into()));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let l = sym
        .cholesky()
        .ok_or_else(|| Error::MalformedState("covariance is not positive definite".into()))?
        .unpack();
    let k = l.transpose() * omega_times(&l);
    let ktk = k.transpose() * &k;
    let ktk = (&ktk + ktk.transpose()) * 0.5;
    let mut sq: Vec<f64> = SymmetricEigen::new(ktk).eigenvalues.iter().copied().collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}
