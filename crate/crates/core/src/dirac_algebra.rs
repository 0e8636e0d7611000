//! 2×2 Dirac matrix algebra: `α`, `β`, the eigenspace projections `π±` and
//! the piecewise-constant null-form symbol `γ`.
//!
//! The sign of a frequency is `ξ̂ = ξ/|ξ|` with the convention `ξ̂(0) = +1`, so
//! `π₊ + π₋ = I` holds on every grid mode including the zero mode.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral_grid::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn real<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    /// `ξ̂` with `ξ̂(0) = +1`.
    pub fn of<T: Real>(xi: T) -> Sign {
        if xi >= T::zero() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sign> {
        match s.trim() {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(Error::InvalidArgument(format!("not a sign: {other:?}"))),
        }
    }
}

/// Independent sign labels: `first` is the bracket sign attached to the first
/// argument of the null form, `second` the sign of the second argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPair {
    pub first: Sign,
    pub second: Sign,
}

impl SignPair {
    pub const ALL: [SignPair; 4] = [
        SignPair::new(Sign::Plus, Sign::Plus),
        SignPair::new(Sign::Plus, Sign::Minus),
        SignPair::new(Sign::Minus, Sign::Plus),
        SignPair::new(Sign::Minus, Sign::Minus),
    ];

    pub const fn new(first: Sign, second: Sign) -> Self {
        SignPair { first, second }
    }

    /// Equal signs: the symbol lives on `ξ₁ξ₂ > 0`.
    pub fn is_equal(self) -> bool {
        self.first == self.second
    }

    fn index(self) -> usize {
        match (self.first, self.second) {
            (Sign::Plus, Sign::Plus) => 0,
            (Sign::Plus, Sign::Minus) => 1,
            (Sign::Minus, Sign::Plus) => 2,
            (Sign::Minus, Sign::Minus) => 3,
        }
    }
}

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

impl FromStr for SignPair {
    type Err = Error;
    /// Accepts `"+-"`, `"(+,-)"`, `"+,-"`.
    fn from_str(s: &str) -> Result<SignPair> {
        let signs: Vec<char> = s.chars().filter(|c| *c == '+' || *c == '-').collect();
        let stripped: String = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ',' | ' '))
            .collect();
        if signs.len() != 2 || stripped.len() != 2 {
            return Err(Error::InvalidArgument(format!("not a sign pair: {s:?}")));
        }
        let sign = |c: char| if c == '+' { Sign::Plus } else { Sign::Minus };
        Ok(SignPair::new(sign(signs[0]), sign(signs[1])))
    }
}

/// Complex 2×2 matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2<T: Real>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Matrix2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Matrix2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Matrix2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Matrix2([[o, z], [z, o]])
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        let m = &self.0;
        Matrix2([[m[0][0] * a, m[0][1] * a], [m[1][0] * a, m[1][1] * a]])
    }

    pub fn scale_real(&self, a: T) -> Self {
        self.scale(Complex::new(a, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Matrix2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    pub fn hermitian_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == T::zero()
    }
}

impl<T: Real> Add for Matrix2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        Matrix2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl<T: Real> Sub for Matrix2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        Matrix2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl<T: Real> Mul for Matrix2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Matrix2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

/// A pair `(α, β)` of hermitian matrices with `α² = β² = I`, `αβ + βα = 0`.
///
/// The standard choice is `α = [[0, -i], [i, 0]]`, `β = [[0, 1], [1, 0]]`; any
/// other representation can be injected through [`DiracMatrices::new`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracMatrices<T: Real> {
    pub alpha: Matrix2<T>,
    pub beta: Matrix2<T>,
}

impl<T: Real> Default for DiracMatrices<T> {
    fn default() -> Self {
        Self::standard()
    }
}

impl<T: Real> DiracMatrices<T> {
    pub fn standard() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        DiracMatrices {
            alpha: Matrix2::new(z, -i, i, z),
            beta: Matrix2::new(z, o, o, z),
        }
    }

    pub fn new(alpha: Matrix2<T>, beta: Matrix2<T>) -> Self {
        DiracMatrices { alpha, beta }
    }

    /// `π_sign(ξ) = ½(I + sign·ξ̂·α)`.
    pub fn projection(&self, sign: Sign, xi_hat: Sign) -> Matrix2<T> {
        let s = (sign * xi_hat).real::<T>();
        (Matrix2::identity() + self.alpha.scale_real(s)).scale_real(T::lit(0.5))
    }

    /// Closed form of `β π_{s₂}(ξ₂) π_{s₁}(ξ₁)` as a function of signs only:
    /// `½(β + eβα)` when `s₁·sgn ξ₁ = s₂·sgn ξ₂ = e`, zero otherwise.
    pub fn gamma(&self, pair: SignPair, sgn1: Sign, sgn2: Sign) -> Matrix2<T> {
        let e1 = pair.first * sgn1;
        let e2 = pair.second * sgn2;
        if e1 != e2 {
            return Matrix2::zero();
        }
        let beta_alpha = self.beta * self.alpha;
        (self.beta + beta_alpha.scale_real(e1.real())).scale_real(T::lit(0.5))
    }

    /// `β π_{s₂}(sgn2) π_{s₁}(sgn1)` by explicit matrix products.
    pub fn gamma_by_product(&self, pair: SignPair, sgn1: Sign, sgn2: Sign) -> Matrix2<T> {
        self.beta * self.projection(pair.second, sgn2) * self.projection(pair.first, sgn1)
    }

    pub fn gamma_table(&self) -> GammaTable<T> {
        let mut entries = [[[Matrix2::zero(); 2]; 2]; 4];
        for pair in SignPair::ALL {
            for (i, s1) in Sign::BOTH.into_iter().enumerate() {
                for (j, s2) in Sign::BOTH.into_iter().enumerate() {
                    entries[pair.index()][i][j] = self.gamma(pair, s1, s2);
                }
            }
        }
        GammaTable { entries }
    }

    /// `π_sign(D)` applied to a spinor field mode by mode.
    pub fn project(&self, field: &Field<T>, sign: Sign) -> Result<Field<T>> {
        let grid = field.grid().clone();
        let plus = self.projection(sign, Sign::Plus);
        let minus = self.projection(sign, Sign::Minus);
        self.map_modes(field, |k| {
            if Sign::of(grid.wavenumber(k)) == Sign::Plus {
                plus
            } else {
                minus
            }
        })
    }

    /// Constant matrix applied pointwise to a spinor field.
    pub fn apply_constant(&self, field: &Field<T>, m: &Matrix2<T>) -> Result<Field<T>> {
        self.map_modes(field, |_| *m)
    }

    fn map_modes(&self, field: &Field<T>, matrix_at: impl Fn(usize) -> Matrix2<T>) -> Result<Field<T>> {
        if field.components() != 2 {
            return Err(Error::ComponentMismatch {
                expected: 2,
                found: field.components(),
            });
        }
        let n = field.grid().n();
        let (a, b) = (field.coeffs(0), field.coeffs(1));
        let mut c0 = Vec::with_capacity(n);
        let mut c1 = Vec::with_capacity(n);
        for k in 0..n {
            let [x, y] = matrix_at(k).apply([a[k], b[k]]);
            c0.push(x);
            c1.push(y);
        }
        Field::from_spectral(field.grid(), vec![c0, c1])
    }
}

/// `π_sign(ξ̂)` in the standard representation.
pub fn projection<T: Real>(sign: Sign, xi_hat: Sign) -> Matrix2<T> {
    DiracMatrices::standard().projection(sign, xi_hat)
}

/// `γ(pair, sgn ξ₁, sgn ξ₂)` in the standard representation.
pub fn gamma<T: Real>(pair: SignPair, sgn1: Sign, sgn2: Sign) -> Matrix2<T> {
    DiracMatrices::standard().gamma(pair, sgn1, sgn2)
}

/// All 16 values of `γ`, indexed by sign pair and the signs of `ξ₁`, `ξ₂`.
#[derive(Clone, Debug)]
pub struct GammaTable<T: Real> {
    entries: [[[Matrix2<T>; 2]; 2]; 4],
}

impl<T: Real> GammaTable<T> {
    pub fn get(&self, pair: SignPair, sgn1: Sign, sgn2: Sign) -> &Matrix2<T> {
        let i = usize::from(sgn1 == Sign::Minus);
        let j = usize::from(sgn2 == Sign::Minus);
        &self.entries[pair.index()][i][j]
    }

    pub fn cells(&self) -> impl Iterator<Item = (SignPair, Sign, Sign, &Matrix2<T>)> + '_ {
        SignPair::ALL.into_iter().flat_map(move |pair| {
            Sign::BOTH.into_iter().flat_map(move |s1| {
                Sign::BOTH
                    .into_iter()
                    .map(move |s2| (pair, s1, s2, self.get(pair, s1, s2)))
            })
        })
    }

    pub fn zero_cells(&self) -> Vec<(SignPair, Sign, Sign)> {
        self.cells()
            .filter(|(_, _, _, m)| m.is_zero())
            .map(|(p, a, b, _)| (p, a, b))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub tolerance: f64,
    pub checks: Vec<IdentityCheck>,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.deviation))
    }

    pub fn violations(&self) -> Vec<&IdentityCheck> {
        self.checks
            .iter()
            .filter(|c| !(c.deviation <= self.tolerance))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Checks the defining relations of `α`, `β` and every projection identity
/// used by the diagonalization, for both values of `ξ̂`.
pub fn verify_algebra<T: Real>(m: &DiracMatrices<T>, tolerance: f64) -> AlgebraReport {
    let id = Matrix2::<T>::identity();
    let zero = Matrix2::<T>::zero();
    let (a, b) = (m.alpha, m.beta);
    let mut checks = Vec::new();
    let mut push = |name: String, dev: T| {
        checks.push(IdentityCheck {
            name,
            deviation: dev.to_f64_lossy(),
        })
    };

    push("alpha^2 = I".into(), (a * a).max_abs_diff(&id));
    push("beta^2 = I".into(), (b * b).max_abs_diff(&id));
    push("alpha beta + beta alpha = 0".into(), (a * b + b * a).max_abs_diff(&zero));
    push("alpha hermitian".into(), a.hermitian_defect());
    push("beta hermitian".into(), b.hermitian_defect());

    for xi in Sign::BOTH {
        let p = m.projection(Sign::Plus, xi);
        let q = m.projection(Sign::Minus, xi);
        push(format!("pi+^2 = pi+ (xi_hat {xi})"), (p * p).max_abs_diff(&p));
        push(format!("pi-^2 = pi- (xi_hat {xi})"), (q * q).max_abs_diff(&q));
        push(format!("pi+ pi- = 0 (xi_hat {xi})"), (p * q).max_abs());
        push(format!("pi- pi+ = 0 (xi_hat {xi})"), (q * p).max_abs());
        push(format!("pi+ beta = beta pi- (xi_hat {xi})"), (p * b).max_abs_diff(&(b * q)));
        push(format!("pi- beta = beta pi+ (xi_hat {xi})"), (q * b).max_abs_diff(&(b * p)));
        push(format!("pi+ + pi- = I (xi_hat {xi})"), (p + q).max_abs_diff(&id));
        push(format!("pi+ hermitian (xi_hat {xi})"), p.hermitian_defect());
        push(format!("pi- hermitian (xi_hat {xi})"), q.hermitian_defect());
        push(
            format!("pi+(-xi_hat) = pi-(xi_hat) (xi_hat {xi})"),
            m.projection(Sign::Plus, -xi).max_abs_diff(&q),
        );
    }
    AlgebraReport { tolerance, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn projection_plus_plus() {
        let p = projection::<f64>(Sign::Plus, Sign::Plus);
        let expected = Matrix2::new(c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0));
        assert_eq!(p.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn complementary_projections_annihilate() {
        for xi in Sign::BOTH {
            let p = projection::<f64>(Sign::Plus, xi);
            let q = projection::<f64>(Sign::Minus, xi);
            assert!((p * q).is_zero());
        }
        assert_eq!(
            projection::<f64>(Sign::Plus, Sign::Minus),
            projection::<f64>(Sign::Minus, Sign::Plus)
        );
    }

    #[test]
    fn gamma_examples() {
        let pp = SignPair::new(Sign::Plus, Sign::Plus);
        let pm = SignPair::new(Sign::Plus, Sign::Minus);
        let half = Matrix2::new(c(0.0, 0.5), c(0.5, 0.0), c(0.5, 0.0), c(0.0, -0.5));
        assert_eq!(gamma::<f64>(pp, Sign::Plus, Sign::Plus), half);
        assert!(gamma::<f64>(pp, Sign::Plus, Sign::Minus).is_zero());
        assert_eq!(gamma::<f64>(pm, Sign::Plus, Sign::Minus), half);
    }

    #[test]
    fn gamma_closed_form_matches_products() {
        let m = DiracMatrices::<f64>::standard();
        for pair in SignPair::ALL {
            for s1 in Sign::BOTH {
                for s2 in Sign::BOTH {
                    let dev = m
                        .gamma(pair, s1, s2)
                        .max_abs_diff(&m.gamma_by_product(pair, s1, s2));
                    assert!(dev <= 1e-15, "{pair} {s1} {s2}: {dev}");
                }
            }
        }
    }

    #[test]
    fn gamma_table_half_zero_and_entries_from_small_set() {
        let table = DiracMatrices::<f64>::standard().gamma_table();
        assert_eq!(table.zero_cells().len(), 8);
        let allowed = [0.0, 0.5, -0.5];
        for (_, _, _, m) in table.cells() {
            for z in m.0.iter().flat_map(|r| r.iter()) {
                assert!(allowed.contains(&z.re) && allowed.contains(&z.im));
                assert!(z.re == 0.0 || z.im == 0.0);
            }
        }
    }

    #[test]
    fn flipping_all_signs_leaves_gamma_unchanged() {
        for pair in SignPair::ALL {
            let flipped = SignPair::new(-pair.first, -pair.second);
            for s1 in Sign::BOTH {
                for s2 in Sign::BOTH {
                    assert_eq!(
                        gamma::<f64>(pair, s1, s2),
                        gamma::<f64>(flipped, -s1, -s2)
                    );
                }
            }
        }
    }

    #[test]
    fn standard_algebra_is_exact() {
        let report = verify_algebra(&DiracMatrices::<f64>::standard(), 0.0);
        assert_eq!(report.max_deviation(), 0.0);
        assert!(report.passed());
    }

    #[test]
    fn perturbed_beta_is_reported() {
        let std = DiracMatrices::<f64>::standard();
        let beta = std.beta + Matrix2::identity().scale_real(0.01);
        let report = verify_algebra(&DiracMatrices::new(std.alpha, beta), 1e-14);
        let names: Vec<_> = report.violations().iter().map(|c| c.name.clone()).collect();
        assert!(names.iter().any(|n| n == "alpha beta + beta alpha = 0"));
        assert!(!report.passed());
    }

    #[test]
    fn alternative_representation_passes() {
        // Pauli z / x: another hermitian anticommuting pair.
        let alpha = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
        let beta = Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let m = DiracMatrices::new(alpha, beta);
        assert!(verify_algebra(&m, 0.0).passed());
        for pair in SignPair::ALL {
            for s1 in Sign::BOTH {
                for s2 in Sign::BOTH {
                    let dev = m.gamma(pair, s1, s2).max_abs_diff(&m.gamma_by_product(pair, s1, s2));
                    assert!(dev <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn sign_pair_parsing() {
        assert_eq!("+-".parse::<SignPair>().unwrap(), SignPair::new(Sign::Plus, Sign::Minus));
        assert_eq!("(-,+)".parse::<SignPair>().unwrap(), SignPair::new(Sign::Minus, Sign::Plus));
        assert!("+".parse::<SignPair>().is_err());
        assert!("+x-".parse::<SignPair>().is_err());
    }

    #[test]
    fn zero_frequency_counts_as_positive() {
        assert_eq!(Sign::of(0.0f64), Sign::Plus);
        assert_eq!(Sign::of(-0.0f64), Sign::Plus);
        assert_eq!(Sign::of(-1e-300f64), Sign::Minus);
    }
}
