//! PPT separability for `1 x N` bipartitions, P-function classicality and the
//! three-mode entanglement classification built on top of them.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::state::{principal_submatrix, symplectic_spectrum, GaussianState, ModeSelection};

/// Margins within this distance of zero count as separable.
pub const SEPARABILITY_TOL: f64 = 1e-9;

/// Two disjoint groups of modes. Modes of the tested state that belong to
/// neither side are traced out before the test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    side_a: ModeSelection,
    side_b: ModeSelection,
}

impl Partition {
    pub fn new(side_a: ModeSelection, side_b: ModeSelection) -> Result<Self> {
        if let Some(l) = side_a.labels().iter().find(|l| side_b.contains(l)) {
            return Err(Error::InvalidSelection(format!(
                "mode `{l}` appears on both sides of the partition"
            )));
        }
        Ok(Self { side_a, side_b })
    }

    /// `{mode} | rest`, where rest is every other mode of `state`.
    pub fn one_vs_rest(state: &GaussianState, mode: &str) -> Result<Self> {
        if state.index_of(mode).is_none() {
            return Err(Error::InvalidSelection(format!("unknown mode `{mode}`")));
        }
        let rest: Vec<&str> = state.modes().iter().map(String::as_str).filter(|m| *m != mode).collect();
        Self::new(ModeSelection::new([mode])?, ModeSelection::new(rest)?)
    }

    /// Two-mode partition `{a} | {b}`.
    pub fn pair(a: &str, b: &str) -> Result<Self> {
        Self::new(ModeSelection::new([a])?, ModeSelection::new([b])?)
    }

    pub fn side_a(&self) -> &ModeSelection {
        &self.side_a
    }

    pub fn side_b(&self) -> &ModeSelection {
        &self.side_b
    }
}

/// `Λ V Λ`, with `Λ` flipping the momentum of every reversed mode.
pub fn partial_momentum_reversal(
    state: &GaussianState,
    reversed: Option<&ModeSelection>,
) -> Result<DMatrix<f64>> {
    let mut out = state.cov().clone();
    let Some(sel) = reversed else {
        return Ok(out);
    };
    for m in sel.resolve(state)? {
        flip_momentum(&mut out, m);
    }
    Ok(out)
}

fn flip_momentum(cov: &mut DMatrix<f64>, mode: usize) {
    let p = 2 * mode + 1;
    for k in 0..cov.ncols() {
        if k != p {
            cov[(p, k)] = -cov[(p, k)];
            cov[(k, p)] = -cov[(k, p)];
        }
    }
}

/// `min ν(Λ V Λ) - 1` across a `1 x N` partition; negative means entangled.
pub fn ppt_margin(state: &GaussianState, partition: &Partition) -> Result<f64> {
    let a = partition.side_a.resolve(state)?;
    let b = partition.side_b.resolve(state)?;
    if a.len() > 1 && b.len() > 1 {
        return Err(Error::UnsupportedPartition(format!(
            "{} x {} split: the PPT test is only conclusive when one side is a single mode",
            a.len(),
            b.len()
        )));
    }
    let (single, other) = if a.len() == 1 { (a, b) } else { (b, a) };
    let order: Vec<usize> = single.iter().chain(&other).copied().collect();
    let mut cov = principal_submatrix(state.cov(), &order);
    flip_momentum(&mut cov, 0);
    Ok(symplectic_spectrum(&cov)?[0] - 1.0)
}

pub fn is_separable(state: &GaussianState, partition: &Partition) -> Result<bool> {
    Ok(ppt_margin(state, partition)? >= -SEPARABILITY_TOL)
}

/// True when `V - 1 ⪰ 0`, i.e. the state has a regular positive P function
/// and is therefore separable across every partition.
pub fn p_function_classical(state: &GaussianState) -> bool {
    let n = state.cov().nrows();
    let shifted = state.cov() - DMatrix::<f64>::identity(n, n);
    SymmetricEigen::new(shifted).eigenvalues.min() >= -SEPARABILITY_TOL
}

/// Three-mode entanglement structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripartiteClass {
    /// Separable across at least one `1 | 2` grouping.
    ProductOrBiseparable,
    /// Fully inseparable, exactly one entangled pair.
    OnePairOnly(String, String),
    /// Fully inseparable, two entangled pairs sharing this mode.
    TwoWay(String),
    /// Fully inseparable with no pairwise entanglement.
    GhzType,
    /// Fully inseparable and all three pairs entangled.
    FullyInseparableWithPairs,
}

impl TripartiteClass {
    /// Serialized name.
    pub fn label(&self) -> &'static str {
        match self {
            Self::ProductOrBiseparable => "biseparable",
            Self::OnePairOnly(..) => "one_pair",
            Self::TwoWay(_) => "two_way",
            Self::GhzType => "ghz",
            Self::FullyInseparableWithPairs => "full_with_pairs",
        }
    }
}

impl fmt::Display for TripartiteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OnePairOnly(a, b) => write!(f, "one_pair({a},{b})"),
            Self::TwoWay(m) => write!(f, "two_way({m})"),
            other => f.write_str(other.label()),
        }
    }
}

/// Pairwise and `1 | 2` margins of a three-mode state plus its class.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    /// Keyed by mode pair in state order.
    pub pair_margins: BTreeMap<(String, String), f64>,
    /// Keyed by the single mode of each `1 | 2` split.
    pub bipartition_margins: BTreeMap<String, f64>,
    pub tripartite_class: TripartiteClass,
}

impl EntanglementReport {
    pub fn pair_margin(&self, a: &str, b: &str) -> Option<f64> {
        self.pair_margins
            .get(&(a.to_owned(), b.to_owned()))
            .or_else(|| self.pair_margins.get(&(b.to_owned(), a.to_owned())))
            .copied()
    }

    pub fn bipartition_margin(&self, single: &str) -> Option<f64> {
        self.bipartition_margins.get(single).copied()
    }
}

/// Class implied by the margins of modes `modes = [x, y, z]`.
///
/// `pairs` are the margins of `(x,y)`, `(x,z)`, `(y,z)`; `bips` those of
/// `x|yz`, `y|xz`, `z|xy`.
pub fn class_from_margins(modes: [&str; 3], pairs: [f64; 3], bips: [f64; 3]) -> TripartiteClass {
    if bips.iter().any(|&m| m >= -SEPARABILITY_TOL) {
        return TripartiteClass::ProductOrBiseparable;
    }
    let pair_modes = [(0, 1), (0, 2), (1, 2)];
    let entangled: Vec<(usize, usize)> = pair_modes
        .iter()
        .zip(pairs)
        .filter(|(_, m)| *m < -SEPARABILITY_TOL)
        .map(|(p, _)| *p)
        .collect();
    match entangled.as_slice() {
        [] => TripartiteClass::GhzType,
        [(i, j)] => TripartiteClass::OnePairOnly(modes[*i].to_owned(), modes[*j].to_owned()),
        [(a, b), (c, d)] => {
            let shared = if a == c || a == d { *a } else { *b };
            TripartiteClass::TwoWay(modes[shared].to_owned())
        }
        _ => TripartiteClass::FullyInseparableWithPairs,
    }
}

pub fn classify_tripartite(state: &GaussianState) -> Result<EntanglementReport> {
    if state.n_modes() != 3 {
        return Err(Error::InvalidArgument(format!(
            "tripartite classification needs 3 modes, got {}",
            state.n_modes()
        )));
    }
    let m: Vec<&str> = state.modes().iter().map(String::as_str).collect();
    let modes = [m[0], m[1], m[2]];

    let mut pairs = [0.0; 3];
    let mut pair_margins = BTreeMap::new();
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        pairs[k] = ppt_margin(state, &Partition::pair(modes[i], modes[j])?)?;
        pair_margins.insert((modes[i].to_owned(), modes[j].to_owned()), pairs[k]);
    }
    let mut bips = [0.0; 3];
    let mut bipartition_margins = BTreeMap::new();
    for (k, mode) in modes.iter().enumerate() {
        bips[k] = ppt_margin(state, &Partition::one_vs_rest(state, mode)?)?;
        bipartition_margins.insert((*mode).to_owned(), bips[k]);
    }
    Ok(EntanglementReport {
        pair_margins,
        bipartition_margins,
        tripartite_class: class_from_margins(modes, pairs, bips),
    })
}
