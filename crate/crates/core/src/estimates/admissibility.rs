//! Exponent constraints for the data regularity `(ψ₀, φ₀, φ₁) ∈ H^{-l} × H^k × H^{k-1}`.

use serde::Serialize;

/// Which hypothesis set a constraint belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// Local well-posedness in `H^{-l} × H^k × H^{k-1}`.
    LocalTheory,
    /// Global theory at `l = 0`.
    GlobalTheory,
    /// The bilinear estimate with `Y^{k-1}` on the left.
    EstimateStar2,
    /// The bilinear estimate with `Y^{-k}` on the left.
    EstimateStar3,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub clause: Clause,
    pub constraint: &'static str,
    pub l: f64,
    pub k: f64,
}

fn check(out: &mut Vec<Violation>, clause: Clause, l: f64, k: f64, list: &[(bool, &'static str)]) {
    for (ok, constraint) in list {
        if !ok {
            out.push(Violation {
                clause,
                constraint,
                l,
                k,
            });
        }
    }
}

/// `l < 1/4`, `k > 0`, `2l + k < 1`, `l + k ≤ 1`, `k ≥ |l|`.
pub fn local_theory_violations(l: f64, k: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    check(
        &mut out,
        Clause::LocalTheory,
        l,
        k,
        &[
            (l < 0.25, "l < 1/4"),
            (k > 0.0, "k > 0"),
            (2.0 * l + k < 1.0, "2l + k < 1"),
            (l + k <= 1.0, "l + k <= 1"),
            (k >= l.abs(), "k >= |l|"),
        ],
    );
    out
}

/// `0 < k < 1/2`.
pub fn global_theory_violations(k: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    check(
        &mut out,
        Clause::GlobalTheory,
        0.0,
        k,
        &[(k > 0.0, "k > 0"), (k < 0.5, "k < 1/2")],
    );
    out
}

/// Hypotheses of the `Y^{k-1}` estimate: `l < 1/4`, `2l + k < 1`, `l + k ≤ 1`.
pub fn star2_violations(l: f64, k: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    check(
        &mut out,
        Clause::EstimateStar2,
        l,
        k,
        &[
            (l < 0.25, "l < 1/4"),
            (2.0 * l + k < 1.0, "2l + k < 1"),
            (l + k <= 1.0, "l + k <= 1"),
        ],
    );
    out
}

/// Hypotheses of the `Y^{-k}` estimate: `k ≥ |l|`, `k > 0`.
pub fn star3_violations(l: f64, k: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    check(
        &mut out,
        Clause::EstimateStar3,
        l,
        k,
        &[(k >= l.abs(), "k >= |l|"), (k > 0.0, "k > 0")],
    );
    out
}
