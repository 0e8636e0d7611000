//! `‖uv‖_{H^{k-1}} ≤ C_k ‖u‖_{L²} ‖v‖_{L²}` on a grid.
//!
//! Each coefficient of the (undealiased, circular) product is a discrete
//! convolution, so Cauchy–Schwarz gives `|(uv)^(ξ)| ≤ ‖u‖‖v‖ / L`. Summing
//! against `L⟨ξ⟩^{2(k-1)}` yields `C_k² = (1/L) Σ_ξ ⟨ξ⟩^{2(k-1)}`, a hard bound
//! at every `n`. The sum diverges as `n → ∞` once `k ≥ ½`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_grid::{Field, SpectralGrid};

/// `C_k` for the grid, for any `k`.
pub fn product_constant<T: Real>(grid: &SpectralGrid<T>, k: T) -> T {
    let two = T::lit(2.0) * (k - T::one());
    let sum = grid
        .wavenumbers()
        .iter()
        .fold(T::zero(), |a, xi| a + xi.bracket().powf(two));
    (sum / grid.length()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductCheck<T> {
    pub lhs: T,
    pub rhs_bound: T,
    pub ratio: T,
    pub constant: T,
}

/// Pointwise product of two scalar fields, without truncation.
pub fn pointwise_product<T: Real>(u: &Field<T>, v: &Field<T>) -> Result<Field<T>> {
    u.grid().check_same(v.grid())?;
    for f in [u, v] {
        if f.components() != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: f.components(),
            });
        }
    }
    let a = u.physical_component(0);
    let b = v.physical_component(0);
    let prod = a.iter().zip(&b).map(|(x, y)| *x * *y).collect();
    Field::from_physical(u.grid(), vec![prod])
}

/// Rejects `k ≥ ½`, where the constant is not uniform in `n`.
pub fn product_estimate_check<T: Real>(u: &Field<T>, v: &Field<T>, k: T) -> Result<ProductCheck<T>> {
    if !(k < T::lit(0.5)) {
        return Err(Error::InvalidArgument(format!(
            "product estimate needs k < 1/2, got {k}"
        )));
    }
    let prod = pointwise_product(u, v)?;
    let lhs = prod.sobolev_norm(k - T::one());
    let constant = product_constant(u.grid(), k);
    let rhs_bound = constant * u.l2_norm() * v.l2_norm();
    let ratio = if rhs_bound > T::zero() { lhs / rhs_bound } else { T::zero() };
    Ok(ProductCheck {
        lhs,
        rhs_bound,
        ratio,
        constant,
    })
}
