//! Phase-diagram sweeps over `(n̄, t²)` and separability boundary search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    bath_labels, chain_evolve, chain_in_collective_frame, closed_form_tripartite,
    collective_evolve, ChainParams, ScenarioParams, COLLECTIVE, SYSTEM_A1, SYSTEM_A2,
};
use crate::error::{Error, Result};
use crate::separability::{class_from_margins, ppt_margin, Partition, TripartiteClass};
use crate::state::{reduce, GaussianState, ModeSelection};

/// Bisection bracket on `t²`; the endpoints 0 and 1 are degenerate.
pub const BISECT_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);

/// Default squeezing for sweeps; verdicts do not depend on it for `s != 0`.
pub const DEFAULT_SWEEP_S: f64 = 1.0;

/// `(n̄/(1+n̄), 1/(1+n̄))`: below the first `t²` the system pair is
/// separable, above the second `a1` is separable from the bath.
pub fn analytic_thresholds(n_bar: f64) -> Result<(f64, f64)> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(Error::InvalidArgument(format!("n_bar = {n_bar} must be >= 0")));
    }
    Ok((n_bar / (1.0 + n_bar), 1.0 / (1.0 + n_bar)))
}

/// Which pair's separability boundary to locate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// `a1`–`a2`.
    SysPair,
    /// `a1`–`c0`.
    EnvPair,
}

/// Zero crossing of `margin(x)` on `[lo, hi]` by bisection on its sign,
/// returned to within `tol`.
pub fn bisect_sign_change<F>(margin: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let (mut a, mut b) = (lo, hi);
    let neg_a = margin(a)? < 0.0;
    let neg_b = margin(b)? < 0.0;
    if neg_a == neg_b {
        return Err(Error::NoBoundary { lo, hi });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if (margin(mid)? < 0.0) == neg_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Locates the separability boundary in `t²` of the chosen pair.
pub fn boundary_bisect(n_bar: f64, which: BoundaryKind, s: f64, tol: f64) -> Result<f64> {
    ScenarioParams::new(s, n_bar, 0.5)?;
    let partner = match which {
        BoundaryKind::SysPair => SYSTEM_A2,
        BoundaryKind::EnvPair => COLLECTIVE,
    };
    let pair = Partition::pair(SYSTEM_A1, partner)?;
    let (lo, hi) = BISECT_BRACKET;
    bisect_sign_change(
        |t_sq| ppt_margin(&collective_evolve(&ScenarioParams::new(s, n_bar, t_sq)?)?, &pair),
        lo,
        hi,
        tol,
    )
}

/// Model used to evaluate a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Collective,
    Chain(usize),
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    n_bar_values: Vec<f64>,
    t_sq_values: Vec<f64>,
    s: f64,
    model: Model,
}

impl SweepGrid {
    pub fn new(n_bar_values: Vec<f64>, t_sq_values: Vec<f64>, s: f64, model: Model) -> Result<Self> {
        if n_bar_values.is_empty() || t_sq_values.is_empty() {
            return Err(Error::InvalidArgument("sweep axes must be non-empty".into()));
        }
        if !is_ascending(&n_bar_values) || !is_ascending(&t_sq_values) {
            return Err(Error::InvalidArgument("sweep axes must be ascending".into()));
        }
        if let Model::Chain(0) = model {
            return Err(Error::InvalidArgument("chain needs at least one beam splitter".into()));
        }
        for &n in &n_bar_values {
            for &t in [t_sq_values[0], *t_sq_values.last().unwrap()].iter() {
                ScenarioParams::new(s, n, t)?;
            }
        }
        Ok(Self {
            n_bar_values,
            t_sq_values,
            s,
            model,
        })
    }

    pub fn n_bar_values(&self) -> &[f64] {
        &self.n_bar_values
    }

    pub fn t_sq_values(&self) -> &[f64] {
        &self.t_sq_values
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.n_bar_values.len() * self.t_sq_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn is_ascending(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] <= w[1])
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Separability margins and class at one `(n̄, t²)` point.
///
/// `margin_a1c0` and `margin_a2c0` test a system mode against the whole
/// environment; `bip_*` are the `1 | 2` splits of `(a1, a2, c0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n_bar: f64,
    pub t_sq: f64,
    pub s: f64,
    pub margin_a1a2: f64,
    pub margin_a1c0: f64,
    pub margin_a2c0: f64,
    pub bip_a1: f64,
    pub bip_a2: f64,
    pub bip_c0: f64,
    pub class: String,
}

impl SweepRecord {
    /// Copy with every real rounded to `digits` significant digits.
    pub fn rounded(&self, digits: usize) -> SweepRecord {
        let r = |x: f64| round_sig(x, digits);
        SweepRecord {
            n_bar: r(self.n_bar),
            t_sq: r(self.t_sq),
            s: r(self.s),
            margin_a1a2: r(self.margin_a1a2),
            margin_a1c0: r(self.margin_a1c0),
            margin_a2c0: r(self.margin_a2c0),
            bip_a1: r(self.bip_a1),
            bip_a2: r(self.bip_a2),
            bip_c0: r(self.bip_c0),
            class: self.class.clone(),
        }
    }

    pub fn sys_pair_entangled(&self) -> bool {
        self.margin_a1a2 < -crate::separability::SEPARABILITY_TOL
    }

    pub fn env_pair_entangled(&self) -> bool {
        self.margin_a1c0 < -crate::separability::SEPARABILITY_TOL
    }
}

/// Rounds to `digits` significant decimal digits via the shortest
/// scientific representation.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn record_from_margins(p: &ScenarioParams, pairs: [f64; 3], bips: [f64; 3]) -> (SweepRecord, TripartiteClass) {
    let class = class_from_margins([SYSTEM_A1, SYSTEM_A2, COLLECTIVE], pairs, bips);
    let rec = SweepRecord {
        n_bar: p.n_bar(),
        t_sq: p.t_sq(),
        s: p.s(),
        margin_a1a2: pairs[0],
        margin_a1c0: pairs[1],
        margin_a2c0: pairs[2],
        bip_a1: bips[0],
        bip_a2: bips[1],
        bip_c0: bips[2],
        class: class.label().to_owned(),
    };
    (rec, class)
}

fn tripartite_margins(state: &GaussianState) -> Result<([f64; 3], [f64; 3])> {
    let pairs = [
        ppt_margin(state, &Partition::pair(SYSTEM_A1, SYSTEM_A2)?)?,
        ppt_margin(state, &Partition::pair(SYSTEM_A1, COLLECTIVE)?)?,
        ppt_margin(state, &Partition::pair(SYSTEM_A2, COLLECTIVE)?)?,
    ];
    let bips = [
        ppt_margin(state, &Partition::one_vs_rest(state, SYSTEM_A1)?)?,
        ppt_margin(state, &Partition::one_vs_rest(state, SYSTEM_A2)?)?,
        ppt_margin(state, &Partition::one_vs_rest(state, COLLECTIVE)?)?,
    ];
    Ok((pairs, bips))
}

/// Pair margins against the system use the whole bath; the uncoupled bath
/// modes cap positive margins at `ñ - 1` without changing any verdict.
fn chain_margins(cp: &ChainParams) -> Result<([f64; 3], [f64; 3])> {
    let state = chain_evolve(cp)?;
    let bath = ModeSelection::new(bath_labels(cp.n_splitters()))?;
    let a1 = ModeSelection::of(&[SYSTEM_A1]);
    let a2 = ModeSelection::of(&[SYSTEM_A2]);
    let pairs = [
        ppt_margin(&state, &Partition::pair(SYSTEM_A1, SYSTEM_A2)?)?,
        ppt_margin(&state, &Partition::new(a1, bath.clone())?)?,
        ppt_margin(&state, &Partition::new(a2, bath)?)?,
    ];
    // The bath side of `bath | a1 a2` is multi-mode; evaluate it on the
    // effective collective mode, which carries all correlations with the
    // system.
    let framed = chain_in_collective_frame(cp)?;
    let tri = reduce(&framed, &ModeSelection::of(&[SYSTEM_A1, SYSTEM_A2, COLLECTIVE]))?;
    let bips = [
        ppt_margin(&state, &Partition::one_vs_rest(&state, SYSTEM_A1)?)?,
        ppt_margin(&state, &Partition::one_vs_rest(&state, SYSTEM_A2)?)?,
        ppt_margin(&tri, &Partition::one_vs_rest(&tri, COLLECTIVE)?)?,
    ];
    Ok((pairs, bips))
}

/// Evaluates all margins at one point with the chosen model.
pub fn evaluate_point(model: Model, p: &ScenarioParams) -> Result<(SweepRecord, TripartiteClass)> {
    let (pairs, bips) = match model {
        Model::Collective => tripartite_margins(&collective_evolve(p)?)?,
        Model::ClosedForm => tripartite_margins(&closed_form_tripartite(p)?)?,
        Model::Chain(n) => chain_margins(&ChainParams::new(*p, n)?)?,
    };
    Ok(record_from_margins(p, pairs, bips))
}

/// One record per grid point, `n̄`-major; points are evaluated in parallel.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    let points: Vec<(f64, f64)> = grid
        .n_bar_values
        .iter()
        .flat_map(|&n| grid.t_sq_values.iter().map(move |&t| (n, t)))
        .collect();
    points
        .par_iter()
        .map(|&(n_bar, t_sq)| {
            let p = ScenarioParams::new(grid.s, n_bar, t_sq)?;
            evaluate_point(grid.model, &p).map(|(rec, _)| rec)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_formulas() {
        assert_eq!(analytic_thresholds(1.0).unwrap(), (0.5, 0.5));
        assert_eq!(analytic_thresholds(0.0).unwrap(), (0.0, 1.0));
        assert_eq!(analytic_thresholds(3.0).unwrap(), (0.75, 0.25));
        assert!(analytic_thresholds(-1.0).is_err());
    }

    #[test]
    fn bisection_finds_known_boundaries() {
        let sys = boundary_bisect(2.0, BoundaryKind::SysPair, 1.0, 1e-6).unwrap();
        assert!((sys - 2.0 / 3.0).abs() <= 1e-6);
        let env = boundary_bisect(2.0, BoundaryKind::EnvPair, 0.3, 1e-6).unwrap();
        assert!((env - 1.0 / 3.0).abs() <= 1e-6);
    }

    #[test]
    fn bisection_reports_missing_boundary() {
        assert!(matches!(
            boundary_bisect(2.0, BoundaryKind::SysPair, 0.0, 1e-6),
            Err(Error::NoBoundary { .. })
        ));
        assert!(matches!(
            boundary_bisect(0.0, BoundaryKind::SysPair, 1.0, 1e-6),
            Err(Error::NoBoundary { .. })
        ));
        assert!(boundary_bisect(1.0, BoundaryKind::SysPair, 1.0, 0.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![], vec![0.5], 1.0, Model::Collective).is_err());
        assert!(SweepGrid::new(vec![2.0, 1.0], vec![0.5], 1.0, Model::Collective).is_err());
        assert!(SweepGrid::new(vec![1.0], vec![0.5, 1.2], 1.0, Model::Collective).is_err());
        assert!(SweepGrid::new(vec![-1.0], vec![0.5], 1.0, Model::Collective).is_err());
        assert!(SweepGrid::new(vec![1.0], vec![0.5], 1.0, Model::Chain(0)).is_err());
        assert_eq!(
            SweepGrid::new(vec![0.0, 1.0], vec![0.2, 0.5, 0.9], 1.0, Model::ClosedForm)
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn single_point_sweep_in_ghz_band() {
        let grid = SweepGrid::new(vec![2.0], vec![0.5], 1.0, Model::Collective).unwrap();
        let recs = sweep(&grid).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].class, "ghz");
    }

    #[test]
    fn no_interaction_point_reproduces_initial_verdicts() {
        for s in [0.0, 0.5] {
            let grid = SweepGrid::new(vec![1.0], vec![1.0], s, Model::Collective).unwrap();
            let rec = &sweep(&grid).unwrap()[0];
            assert_eq!(rec.sys_pair_entangled(), s != 0.0);
            assert!(!rec.env_pair_entangled());
            assert_eq!(rec.class, "biseparable");
        }
    }

    #[test]
    fn sweep_order_is_nbar_major() {
        let grid = SweepGrid::new(vec![0.5, 1.5], vec![0.1, 0.9], 1.0, Model::ClosedForm).unwrap();
        let recs = sweep(&grid).unwrap();
        let coords: Vec<(f64, f64)> = recs.iter().map(|r| (r.n_bar, r.t_sq)).collect();
        assert_eq!(coords, vec![(0.5, 0.1), (0.5, 0.9), (1.5, 0.1), (1.5, 0.9)]);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.123456789012345, 12), 0.123456789012);
        assert_eq!(round_sig(-2.0 / 3.0, 12), -0.666666666667);
        assert_eq!(round_sig(0.0, 12), 0.0);
    }
}
