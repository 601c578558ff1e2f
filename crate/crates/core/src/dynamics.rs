//! Decoherence of a two-mode squeezed state `(a1, a2)` when `a2` couples to a
//! homogeneous thermal bath.
//!
//! Four routes to the same physics:
//! * [`collective_evolve`]: one beam splitter between `a2` and the collective
//!   bath mode `c0`;
//! * [`closed_form_system`] / [`closed_form_tripartite`]: the resulting
//!   covariance written out entry by entry;
//! * [`chain_evolve`]: `N` beam splitters coupling `a2` to fresh bath modes;
//! * [`fokker_planck_evolve`]: RK4 integration of the covariance ODE.
//!
//! The decay rate is normalised to one, so elapsed time is `τ = -ln t²`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::state::{tensor, thermal_state, two_mode_squeezed, GaussianState};
use crate::symplectic::{apply, beam_split_in_place, beam_splitter, two_mode_squeezer};

pub const SYSTEM_A1: &str = "a1";
pub const SYSTEM_A2: &str = "a2";
pub const COLLECTIVE: &str = "c0";
pub const COLLECTIVE_PARTNER: &str = "c0p";

/// Default number of RK4 steps for [`fokker_planck_evolve`].
pub const DEFAULT_RK4_STEPS: usize = 1000;

/// Squeezing `s`, bath occupation `n̄` and transmittivity `t² = e^{-τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    s: f64,
    n_bar: f64,
    t_sq: f64,
}

impl ScenarioParams {
    pub fn new(s: f64, n_bar: f64, t_sq: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("squeezing s = {s}")));
        }
        if !(n_bar.is_finite() && n_bar >= 0.0) {
            return Err(Error::InvalidArgument(format!("n_bar = {n_bar} must be >= 0")));
        }
        if !(0.0..=1.0).contains(&t_sq) {
            return Err(Error::InvalidArgument(format!("t_sq = {t_sq} outside [0, 1]")));
        }
        Ok(Self { s, n_bar, t_sq })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn t_sq(&self) -> f64 {
        self.t_sq
    }

    /// `ñ = 2n̄ + 1`.
    pub fn n_tilde(&self) -> f64 {
        2.0 * self.n_bar + 1.0
    }

    /// Amplitude transmittivity `t`.
    pub fn t(&self) -> f64 {
        self.t_sq.sqrt()
    }

    /// Amplitude reflectivity `r = √(1 - t²)`.
    pub fn r(&self) -> f64 {
        (1.0 - self.t_sq).sqrt()
    }

    /// Elapsed time `τ = -ln t²` in units of the inverse decay rate.
    pub fn tau(&self) -> f64 {
        -self.t_sq.ln()
    }
}

/// A scenario realised by `N` equal beam splitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub scenario: ScenarioParams,
    n_splitters: usize,
}

impl ChainParams {
    pub fn new(scenario: ScenarioParams, n_splitters: usize) -> Result<Self> {
        if n_splitters == 0 {
            return Err(Error::InvalidArgument("chain needs at least one beam splitter".into()));
        }
        Ok(Self { scenario, n_splitters })
    }

    pub fn n_splitters(&self) -> usize {
        self.n_splitters
    }

    /// Per-splitter energy transmittivity `T = (t²)^(1/N)`.
    pub fn per_splitter_t_sq(&self) -> f64 {
        self.scenario.t_sq.powf(1.0 / self.n_splitters as f64)
    }
}

/// Labels of the chain bath modes `b0 .. b{N-1}`.
pub fn bath_labels(n: usize) -> Vec<String> {
    (0..n).map(|m| format!("b{m}")).collect()
}

fn initial_system(s: f64) -> Result<GaussianState> {
    two_mode_squeezed(s)?.relabel(vec![SYSTEM_A1, SYSTEM_A2])
}

/// `V_s ⊕ ñ·1` on `(a1, a2, c0)` after the `a2`–`c0` beam splitter.
pub fn collective_evolve(p: &ScenarioParams) -> Result<GaussianState> {
    let bath = thermal_state(p.n_tilde())?.relabel(vec![COLLECTIVE])?;
    let v0 = tensor(&initial_system(p.s)?, &bath)?;
    apply(&v0, &beam_splitter(p.t(), 1, 2, 3)?)
}

/// Reduced system covariance on `(a1, a2)`, built entry by entry.
pub fn closed_form_system(p: &ScenarioParams) -> Result<GaussianState> {
    let (ch, sh) = ((2.0 * p.s).cosh(), (2.0 * p.s).sinh());
    let (t, t_sq, r_sq) = (p.t(), p.t_sq, 1.0 - p.t_sq);
    let d = t_sq * ch + r_sq * p.n_tilde();
    let x = t * sh;
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        ch,  0.0, x,   0.0,
        0.0, ch,  0.0, -x,
        x,   0.0, d,   0.0,
        0.0, -x,  0.0, d,
    ]);
    GaussianState::new_unchecked(vec![SYSTEM_A1, SYSTEM_A2], cov)
}

/// Full `(a1, a2, c0)` covariance written out entry by entry.
///
/// The `(a1, c0)` block is the `(a1, a2)` one with `t` and `r` exchanged;
/// `a2` and `c0` share the real correlation `t r (cosh 2s - ñ)`.
pub fn closed_form_tripartite(p: &ScenarioParams) -> Result<GaussianState> {
    let (ch, sh) = ((2.0 * p.s).cosh(), (2.0 * p.s).sinh());
    let (t, r) = (p.t(), p.r());
    let nt = p.n_tilde();
    let d2 = t * t * ch + r * r * nt;
    let dc = r * r * ch + t * t * nt;
    let x2 = t * sh;
    let xc = r * sh;
    let y = t * r * (ch - nt);
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(6, 6, &[
        ch,  0.0, x2,  0.0, xc,  0.0,
        0.0, ch,  0.0, -x2, 0.0, -xc,
        x2,  0.0, d2,  0.0, y,   0.0,
        0.0, -x2, 0.0, d2,  0.0, y,
        xc,  0.0, y,   0.0, dc,  0.0,
        0.0, -xc, 0.0, y,   0.0, dc,
    ]);
    GaussianState::new_unchecked(vec![SYSTEM_A1, SYSTEM_A2, COLLECTIVE], cov)
}

/// Right-hand side of the covariance ODE for `(a1, a2)`:
/// the `a2` block relaxes to `ñ·1` at unit rate, the cross blocks decay at
/// half that rate and the `a1` block is constant.
fn moment_rhs(v: &DMatrix<f64>, n_tilde: f64) -> DMatrix<f64> {
    let mut dv = DMatrix::zeros(4, 4);
    for r in 0..4 {
        for c in 0..4 {
            let rate = 0.5 * ((r >= 2) as u8 + (c >= 2) as u8) as f64;
            dv[(r, c)] = -rate * v[(r, c)];
        }
    }
    dv[(2, 2)] += n_tilde;
    dv[(3, 3)] += n_tilde;
    dv
}

/// Classic fixed-step RK4 for a matrix-valued autonomous ODE.
fn rk4<F>(mut y: DMatrix<f64>, t_end: f64, steps: usize, f: F) -> DMatrix<f64>
where
    F: Fn(&DMatrix<f64>) -> DMatrix<f64>,
{
    let h = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (0.5 * h)));
        let k3 = f(&(&y + &k2 * (0.5 * h)));
        let k4 = f(&(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Integrates the `(a1, a2)` covariance ODE from the squeezed initial state
/// for time `τ = -ln t²` using `steps` RK4 steps.
pub fn fokker_planck_evolve(p: &ScenarioParams, steps: usize) -> Result<GaussianState> {
    fokker_planck_from(&initial_system(p.s)?, p, steps)
}

/// As [`fokker_planck_evolve`] from an arbitrary two-mode initial state.
pub fn fokker_planck_from(
    initial: &GaussianState,
    p: &ScenarioParams,
    steps: usize,
) -> Result<GaussianState> {
    if steps == 0 {
        return Err(Error::InvalidArgument("RK4 needs at least one step".into()));
    }
    if initial.n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: initial.n_modes(),
        });
    }
    if p.t_sq <= 0.0 {
        return Err(Error::InvalidArgument(
            "t_sq = 0 corresponds to infinite time and cannot be integrated".into(),
        ));
    }
    let nt = p.n_tilde();
    let v = rk4(initial.cov().clone(), p.tau(), steps, |v| moment_rhs(v, nt));
    GaussianState::new_unchecked(initial.modes().to_vec(), v)
}

/// `a2` swept through `N` fresh thermal modes with equal splitters; returns
/// the `(2 + N)`-mode state on `(a1, a2, b0, ..)`.
pub fn chain_evolve(cp: &ChainParams) -> Result<GaussianState> {
    let p = &cp.scenario;
    let n = cp.n_splitters;
    let dim = 2 * (n + 2);
    let mut cov = DMatrix::from_diagonal_element(dim, dim, p.n_tilde());
    cov.view_mut((0, 0), (4, 4)).copy_from(initial_system(p.s)?.cov());
    let t_amp = cp.per_splitter_t_sq().sqrt();
    for m in 0..n {
        beam_split_in_place(&mut cov, t_amp, 1, 2 + m);
    }
    let mut labels = vec![SYSTEM_A1.to_owned(), SYSTEM_A2.to_owned()];
    labels.extend(bath_labels(n));
    GaussianState::new_unchecked(labels, cov)
}

/// Amplitudes with which the input `a2` ends up in each output bath mode.
pub fn chain_bath_amplitudes(cp: &ChainParams) -> DVector<f64> {
    let n = cp.n_splitters;
    let t = cp.per_splitter_t_sq().sqrt();
    let r = (1.0 - t * t).sqrt();
    // mode-level vector over (a2, b0, .., b{N-1})
    let mut x = DVector::zeros(n + 1);
    x[0] = 1.0;
    for m in 0..n {
        let (a, b) = (x[0], x[m + 1]);
        x[0] = t * a - r * b;
        x[m + 1] = r * a + t * b;
    }
    x.rows(1, n).into_owned()
}

/// Chain output re-expressed on `(a1, a2, c0, e1, ..)`.
///
/// A Householder reflection on the bath outputs (passive and local to the
/// bath) rotates the direction that received `a2` onto the first bath slot,
/// which then plays the role of the collective mode `c0`. The remaining
/// modes `e1 ..` are uncorrelated thermal modes.
pub fn chain_in_collective_frame(cp: &ChainParams) -> Result<GaussianState> {
    let chain = chain_evolve(cp)?;
    let n = cp.n_splitters;
    let v = chain_bath_amplitudes(cp);
    let norm = v.norm();
    let mut h = DMatrix::<f64>::identity(n, n);
    if norm > 0.0 {
        let mut u = -(&v / norm);
        u[0] += 1.0;
        let un = u.norm_squared();
        if un > 1e-30 {
            h -= (&u * u.transpose()) * (2.0 / un);
        }
    }
    // lift I_2 ⊕ (H ⊗ 1_2) and conjugate
    let dim = 2 * (n + 2);
    let mut lift = DMatrix::<f64>::identity(dim, dim);
    for r in 0..n {
        for c in 0..n {
            let (rr, cc) = (2 * (r + 2), 2 * (c + 2));
            lift[(rr, cc)] = h[(r, c)];
            lift[(rr + 1, cc + 1)] = h[(r, c)];
        }
    }
    let cov = &lift * chain.cov() * lift.transpose();
    let mut labels = vec![SYSTEM_A1.to_owned(), SYSTEM_A2.to_owned(), COLLECTIVE.to_owned()];
    labels.extend((1..n).map(|k| format!("e{k}")));
    GaussianState::new_unchecked(labels, cov)
}

/// Environment squeezing `s_e` with `cosh 2s_e = ñ`.
pub fn environment_squeezing(n_tilde: f64) -> f64 {
    0.5 * n_tilde.max(1.0).acosh()
}

/// Pure four-mode model on `(a1, a2, c0, c0p)`: the thermal collective mode
/// is purified by a two-mode squeezed partner `c0p`.
pub fn purified_collective_evolve(p: &ScenarioParams) -> Result<GaussianState> {
    let s_env = environment_squeezing(p.n_tilde());
    let bath = two_mode_squeezed(s_env)?.relabel(vec![COLLECTIVE, COLLECTIVE_PARTNER])?;
    let v0 = tensor(&initial_system(p.s)?, &bath)?;
    apply(&v0, &beam_splitter(p.t(), 1, 2, 4)?)
}

/// Same state built from vacuum with explicit squeezers, kept as an
/// independent route for tests.
pub fn purified_from_vacuum(p: &ScenarioParams) -> Result<GaussianState> {
    let s_env = environment_squeezing(p.n_tilde());
    let vac = crate::state::vacuum_state(4)?.relabel(vec![
        SYSTEM_A1,
        SYSTEM_A2,
        COLLECTIVE,
        COLLECTIVE_PARTNER,
    ])?;
    let prep = two_mode_squeezer(p.s, 0, 1, 4)?.compose(&two_mode_squeezer(s_env, 2, 3, 4)?)?;
    let u = beam_splitter(p.t(), 1, 2, 4)?.compose(&prep)?;
    apply(&vac, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{reduce, ModeSelection};

    fn dev(a: &GaussianState, b: &GaussianState) -> f64 {
        (a.cov() - b.cov()).amax()
    }

    fn p(s: f64, n: f64, t: f64) -> ScenarioParams {
        ScenarioParams::new(s, n, t).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ScenarioParams::new(f64::INFINITY, 1.0, 0.5).is_err());
        assert!(ScenarioParams::new(1.0, -0.1, 0.5).is_err());
        assert!(ScenarioParams::new(1.0, 1.0, 1.5).is_err());
        assert!(ChainParams::new(p(1.0, 1.0, 0.5), 0).is_err());
        let q = p(1.0, 1.5, 0.25);
        assert_eq!(q.n_tilde(), 4.0);
        assert_eq!(q.t(), 0.5);
        assert!((q.r() - 0.75f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn no_interaction_leaves_initial_state() {
        let q = p(0.7, 2.0, 1.0);
        let out = collective_evolve(&q).unwrap();
        let v0 = tensor(
            &initial_system(0.7).unwrap(),
            &thermal_state(5.0).unwrap().relabel(vec!["c0"]).unwrap(),
        )
        .unwrap();
        assert!(dev(&out, &v0) < 1e-15);
        assert!(dev(&closed_form_system(&q).unwrap(), &initial_system(0.7).unwrap()) < 1e-15);
    }

    #[test]
    fn unsqueezed_system_stays_decoupled() {
        let out = collective_evolve(&p(0.0, 1.0, 0.4)).unwrap();
        assert_eq!(out.block(0, 0), DMatrix::identity(2, 2));
        assert_eq!(out.block(0, 1), DMatrix::zeros(2, 2));
        assert_eq!(out.block(0, 2), DMatrix::zeros(2, 2));
    }

    #[test]
    fn full_reflection_swaps_in_the_bath() {
        let q = p(0.9, 1.5, 0.0);
        let cf = closed_form_system(&q).unwrap();
        let ch = 1.8f64.cosh();
        assert_eq!(cf.block(0, 0), DMatrix::from_diagonal_element(2, 2, ch));
        assert_eq!(cf.block(1, 1), DMatrix::from_diagonal_element(2, 2, 4.0));
        assert_eq!(cf.block(0, 1), DMatrix::zeros(2, 2));
    }

    #[test]
    fn closed_forms_match_collective_model() {
        for &(s, n, t) in &[(1.0, 1.0, 0.25), (0.3, 0.0, 0.9), (2.0, 5.0, 0.01), (-0.4, 2.5, 0.6)] {
            let q = p(s, n, t);
            let col = collective_evolve(&q).unwrap();
            let red = reduce(&col, &ModeSelection::of(&["a1", "a2"])).unwrap();
            assert!(dev(&red, &closed_form_system(&q).unwrap()) < 1e-12);
            assert!(dev(&col, &closed_form_tripartite(&q).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn rk4_keeps_thermal_fixed_point() {
        let th = tensor(
            &thermal_state(2.0).unwrap().relabel(vec!["a1"]).unwrap(),
            &thermal_state(3.0).unwrap().relabel(vec!["a2"]).unwrap(),
        )
        .unwrap();
        let out = fokker_planck_from(&th, &p(0.0, 1.0, 0.05), 50).unwrap();
        assert!(dev(&out, &th) < 1e-13);
    }

    #[test]
    fn rk4_cross_term_decays_as_amplitude() {
        let s = 0.8;
        for t_sq in [0.9, 0.5, 0.1] {
            let out = fokker_planck_evolve(&p(s, 1.0, t_sq), 1000).unwrap();
            let expect = t_sq.sqrt() * (2.0 * s).sinh();
            assert!((out.cov()[(0, 2)] - expect).abs() < 1e-10);
            assert!((out.cov()[(1, 3)] + expect).abs() < 1e-10);
        }
    }

    #[test]
    fn rk4_argument_errors() {
        assert!(fokker_planck_evolve(&p(1.0, 1.0, 0.3), 0).is_err());
        assert!(fokker_planck_evolve(&p(1.0, 1.0, 0.0), 10).is_err());
    }

    #[test]
    fn single_splitter_chain_is_collective_model() {
        let q = p(0.6, 1.2, 0.35);
        let chain = chain_evolve(&ChainParams::new(q, 1).unwrap()).unwrap();
        let col = collective_evolve(&q).unwrap();
        assert!((chain.cov() - col.cov()).amax() < 1e-13);
        assert_eq!(chain.modes(), &["a1", "a2", "b0"]);
    }

    #[test]
    fn chain_amplitudes_have_reflected_norm() {
        let cp = ChainParams::new(p(1.0, 1.0, 0.3), 25).unwrap();
        let v = chain_bath_amplitudes(&cp);
        assert!((v.norm_squared() - 0.7).abs() < 1e-13);
        // the chain state's a2-bath cross block carries the same pattern
        let st = chain_evolve(&ChainParams::new(p(0.0, 0.0, 0.3), 25).unwrap()).unwrap();
        assert!(st.cov().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn chain_collective_frame_recovers_tripartite_state() {
        for n in [2, 10, 100] {
            let q = p(1.1, 1.7, 0.42);
            let framed = chain_in_collective_frame(&ChainParams::new(q, n).unwrap()).unwrap();
            let red = reduce(&framed, &ModeSelection::of(&["a1", "a2", "c0"])).unwrap();
            assert!(dev(&red, &collective_evolve(&q).unwrap()) < 1e-10, "N={n}");
        }
    }

    #[test]
    fn purified_model_routes_agree() {
        let q = p(0.8, 1.3, 0.45);
        let a = purified_collective_evolve(&q).unwrap();
        let b = purified_from_vacuum(&q).unwrap();
        assert!(dev(&a, &b) < 1e-11);
        assert!((environment_squeezing(1.0)).abs() < 1e-15);
    }
}
