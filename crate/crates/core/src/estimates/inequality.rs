//! The modulation inequality `2·min(|ξ₁|, |ξ₂|) ≤ |σ₁| + |σ₂| + |σ|`.
//!
//! With `ξ = ξ₁ + ξ₂`, `τ = τ₁ + τ₂` and a sign pair `(s₁, s₂)`:
//!
//! ```text
//! σ₁ = τ₁ + s₁|ξ₁|,  σ₂ = τ₂ - s₂|ξ₂|,  σ = τ + s_φ|ξ|
//! ```
//!
//! Mixed pairs live on `ξ₁ξ₂ ≤ 0`, equal pairs on `ξ₁ξ₂ ≥ 0`; outside its
//! region the symbol vanishes and the inequality can fail, so such tuples are
//! rejected.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirac_algebra::{Sign, SignPair};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `ξ₁ξ₂ ≤ 0`, mixed sign pairs.
    Mixed,
    /// `ξ₁ξ₂ ≥ 0`, equal sign pairs.
    Same,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InequalityCase {
    pub pair: SignPair,
    pub phi_sign: Sign,
}

impl InequalityCase {
    pub fn new(pair: SignPair, phi_sign: Sign) -> Self {
        InequalityCase { pair, phi_sign }
    }

    pub fn region(&self) -> Region {
        if self.pair.is_equal() {
            Region::Same
        } else {
            Region::Mixed
        }
    }

    /// The eight pair and left-sign combinations.
    pub fn all() -> Vec<InequalityCase> {
        SignPair::ALL
            .iter()
            .flat_map(|p| Sign::BOTH.iter().map(move |s| InequalityCase::new(*p, *s)))
            .collect()
    }

    pub fn label(&self) -> String {
        format!("{}{}/{}", self.pair.first, self.pair.second, self.phi_sign)
    }

    fn admits(&self, xi1: f64, xi2: f64) -> bool {
        match self.region() {
            Region::Mixed => xi1 * xi2 <= 0.0,
            Region::Same => xi1 * xi2 >= 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulationTriple {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma: f64,
}

impl ModulationTriple {
    pub fn of(case: InequalityCase, xi1: f64, xi2: f64, tau1: f64, tau2: f64) -> Self {
        let s1 = case.pair.first.real::<f64>();
        let s2 = case.pair.second.real::<f64>();
        let sp = case.phi_sign.real::<f64>();
        ModulationTriple {
            sigma1: tau1 + s1 * xi1.abs(),
            sigma2: tau2 - s2 * xi2.abs(),
            sigma: (tau1 + tau2) + sp * (xi1 + xi2).abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub sigmas: ModulationTriple,
}

/// Evaluates the inequality for one tuple. The comparison allows a rounding
/// margin of a few ulps of the largest input.
pub fn check_algebraic_inequality(
    case: InequalityCase,
    xi1: f64,
    xi2: f64,
    tau1: f64,
    tau2: f64,
) -> Result<InequalityCheck> {
    if ![xi1, xi2, tau1, tau2].iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument("inequality inputs must be finite".into()));
    }
    if !case.admits(xi1, xi2) {
        return Err(Error::InvalidArgument(format!(
            "(xi1, xi2) = ({xi1}, {xi2}) lies outside the {:?} region of case {}",
            case.region(),
            case.label()
        )));
    }
    let sigmas = ModulationTriple::of(case, xi1, xi2, tau1, tau2);
    let lhs = 2.0 * xi1.abs().min(xi2.abs());
    let rhs = sigmas.sigma1.abs() + sigmas.sigma2.abs() + sigmas.sigma.abs();
    let scale = xi1.abs() + xi2.abs() + tau1.abs() + tau2.abs();
    let margin = 16.0 * f64::EPSILON * scale;
    Ok(InequalityCheck {
        holds: lhs <= rhs + margin,
        lhs,
        rhs,
        slack: rhs - lhs,
        sigmas,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub case: String,
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    /// First violating tuple `(ξ₁, ξ₂, τ₁, τ₂)`, if any.
    pub first_violation: Option<[f64; 4]>,
}

/// Frequency and time range of the scan.
pub const SCAN_RANGE: f64 = 100.0;
const CHUNK: usize = 1 << 14;

fn draw(case: InequalityCase, rng: &mut SplitMix64, lattice: bool) -> [f64; 4] {
    let r = SCAN_RANGE;
    let (a, b) = if lattice {
        (rng.random_range(0..=r as i64) as f64, rng.random_range(0..=r as i64) as f64)
    } else {
        (rng.random_range(0.0..r), rng.random_range(0.0..r))
    };
    let sign1 = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let sign2 = match case.region() {
        Region::Same => sign1,
        Region::Mixed => -sign1,
    };
    let (xi1, xi2) = (sign1 * a, sign2 * b);
    // Half the draws sit close to the characteristics, where the inequality is
    // tight; the rest spread over the whole box.
    let near = rng.random::<bool>();
    let offset = |rng: &mut SplitMix64| -> f64 {
        if lattice {
            rng.random_range(-3i64..=3) as f64
        } else {
            let w = 10f64.powf(rng.random_range(-3.0..2.0));
            rng.random_range(-w..w)
        }
    };
    let (tau1, tau2) = if near {
        let s1 = case.pair.first.real::<f64>();
        let s2 = case.pair.second.real::<f64>();
        (-s1 * xi1.abs() + offset(rng), s2 * xi2.abs() + offset(rng))
    } else if lattice {
        (
            rng.random_range(-r as i64..=r as i64) as f64,
            rng.random_range(-r as i64..=r as i64) as f64,
        )
    } else {
        (rng.random_range(-r..r), rng.random_range(-r..r))
    };
    [xi1, xi2, tau1, tau2]
}

/// Samples `samples` tuples in the region of `case`: half on the integer
/// lattice (boundary `ξ₁ξ₂ = 0` included), half continuous.
pub fn scan_case(case: InequalityCase, samples: usize, seed: u64) -> Result<ScanReport> {
    let chunks = samples.div_ceil(CHUNK);
    let case_key = (case.pair.first.value() + 1) as u64 * 16
        + (case.pair.second.value() + 1) as u64 * 4
        + (case.phi_sign.value() + 1) as u64;
    let parts: Vec<(usize, f64, Option<[f64; 4]>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SplitMix64::seed_from_u64(seed ^ (case_key << 48) ^ c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut violations = 0;
            let mut min_slack = f64::INFINITY;
            let mut first = None;
            for i in 0..count {
                let lattice = (c * CHUNK + i) % 2 == 0;
                let [xi1, xi2, tau1, tau2] = draw(case, &mut rng, lattice);
                let r = check_algebraic_inequality(case, xi1, xi2, tau1, tau2)?;
                min_slack = min_slack.min(r.slack);
                if !r.holds {
                    violations += 1;
                    first.get_or_insert([xi1, xi2, tau1, tau2]);
                }
            }
            Ok((violations, min_slack, first))
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport {
        case: case.label(),
        samples,
        violations: parts.iter().map(|p| p.0).sum(),
        min_slack: parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        first_violation: parts.iter().find_map(|p| p.2),
    })
}

/// All eight cases.
pub fn inequality_scan(samples: usize, seed: u64) -> Result<Vec<ScanReport>> {
    InequalityCase::all()
        .into_iter()
        .map(|c| scan_case(c, samples, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let case = InequalityCase::new(SignPair::new(Sign::Plus, Sign::Minus), Sign::Plus);
        let r = check_algebraic_inequality(case, 1.0, -2.0, -1.0, 2.0).unwrap();
        assert_eq!(
            r.sigmas,
            ModulationTriple {
                sigma1: 0.0,
                sigma2: 4.0,
                sigma: 2.0
            }
        );
        assert_eq!((r.lhs, r.rhs, r.slack), (2.0, 6.0, 4.0));
        assert!(r.holds);
    }

    #[test]
    fn region_is_enforced() {
        let same = InequalityCase::new(SignPair::new(Sign::Plus, Sign::Plus), Sign::Plus);
        assert!(check_algebraic_inequality(same, 1.0, -2.0, 0.0, 0.0).is_err());
        assert!(check_algebraic_inequality(same, 0.0, -2.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn fails_off_region() {
        // The equal-pair identity is false for opposite-sign frequencies, which
        // is why the region check exists.
        let (xi1, xi2) = (3.0f64, -1.0f64);
        let (tau1, tau2) = (-xi1, xi2.abs());
        let case = InequalityCase::new(SignPair::new(Sign::Plus, Sign::Plus), Sign::Plus);
        let m = ModulationTriple::of(case, xi1, xi2, tau1, tau2);
        let rhs = m.sigma1.abs() + m.sigma2.abs() + m.sigma.abs();
        assert!(rhs < 2.0 * xi1.abs().min(xi2.abs()));
    }
}
