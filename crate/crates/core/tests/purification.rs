//! Hidden-mode entanglement in the purified bath model.

use cvdecohere::analysis::{analytic_thresholds, bisect_sign_change, BISECT_BRACKET};
use cvdecohere::dynamics::{purified_collective_evolve, ScenarioParams};
use cvdecohere::separability::{is_separable, ppt_margin, Partition};

fn boundary(a: &str, b: &str, s: f64, n_bar: f64) -> f64 {
    let pair = Partition::pair(a, b).unwrap();
    let (lo, hi) = BISECT_BRACKET;
    bisect_sign_change(
        |t| ppt_margin(&purified_collective_evolve(&ScenarioParams::new(s, n_bar, t)?)?, &pair),
        lo,
        hi,
        1e-10,
    )
    .unwrap()
}

/// With `n_s = (cosh 2s - 1)/2`, `a2` entangles with the hidden partner for
/// `t² < 1/(1+n_s)` (the a1–c0 rule with n̄ -> n_s) while the bath pair
/// `c0`–`c0p` stays entangled for `t² > n_s/(1+n_s)` (the a1–a2 rule).
#[test]
fn hidden_mode_boundaries_follow_the_mirrored_rules() {
    for s in [0.3f64, 0.5, 1.0, 1.5] {
        let n_s = ((2.0 * s).cosh() - 1.0) / 2.0;
        let (sys_rule, env_rule) = analytic_thresholds(n_s).unwrap();
        for n_bar in [0.5, 1.0, 2.0, 4.0] {
            assert!((boundary("a2", "c0p", s, n_bar) - env_rule).abs() < 1e-8, "s={s} n̄={n_bar}");
            assert!((boundary("c0", "c0p", s, n_bar) - sys_rule).abs() < 1e-8, "s={s} n̄={n_bar}");
        }
    }
}

#[test]
fn vacuum_bath_has_no_hidden_entanglement() {
    for t in [0.0, 0.3, 0.7, 1.0] {
        let st = purified_collective_evolve(&ScenarioParams::new(1.2, 0.0, t).unwrap()).unwrap();
        assert!(is_separable(&st, &Partition::pair("a2", "c0p").unwrap()).unwrap());
        assert!(is_separable(&st, &Partition::pair("c0", "c0p").unwrap()).unwrap());
        assert!(st.block(2, 3).amax() < 1e-15);
    }
}
