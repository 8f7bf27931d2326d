//! Bernoulli numbers, the Maclaurin coefficients of `x cot x`, and the
//! sign-extended trigonometric kernels used for Jacobi operators.
//!
//! For an eigenvalue `lambda` of a Jacobi operator the kernels are
//! `sin(sqrt(lambda) rho) / (sqrt(lambda) rho)` and
//! `sqrt(lambda) rho cot(sqrt(lambda) rho)`, continued to `lambda <= 0` by
//! their power series (hyperbolic functions for negative `lambda`).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::curvature::JacobiOperator;
use crate::error::{Error, Result};
use crate::linalg;

/// Largest Bernoulli index supported.
pub const MAX_BERNOULLI: usize = 64;
/// Largest cotangent-series order supported.
pub const MAX_COT_ORDER: usize = 30;
/// `|lambda| rho^2` below which the kernels switch to their Maclaurin series.
pub const SERIES_THRESHOLD: f64 = 1e-14;
/// Minimum distance of `sqrt(lambda) rho` from the first pole at `pi`.
pub const POLE_GUARD: f64 = 1e-9;
/// Largest `sqrt(max |lambda|) rho` accepted by the log-determinant series.
pub const SERIES_RADIUS: f64 = 2.5;

/// `B_0..=B_m` as exact rationals (`B_1 = -1/2`).
pub fn bernoulli_numbers(m: usize) -> Result<Vec<BigRational>> {
    if m > MAX_BERNOULLI {
        return Err(Error::Unsupported(format!(
            "Bernoulli numbers are supported up to index {MAX_BERNOULLI}, got {m}"
        )));
    }
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    b.push(BigRational::one());
    for k in 1..=m {
        // sum_{j=0}^{k} C(k+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(k + 1)));
    }
    Ok(b)
}

/// Coefficients `b_0..=b_K` of `x cot x = sum b_k x^{2k}`.
#[derive(Debug, Clone)]
pub struct CotCoefficients {
    exact: Vec<BigRational>,
    values: Vec<f64>,
}

impl CotCoefficients {
    pub fn order(&self) -> usize {
        self.exact.len() - 1
    }

    pub fn exact(&self) -> &[BigRational] {
        &self.exact
    }

    /// Float projections, computed once from the exact values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `b_0 = 1`, `b_k = (-4)^k B_{2k} / (2k)!`.
pub fn cot_coeffs(order: usize) -> Result<CotCoefficients> {
    if order > MAX_COT_ORDER {
        return Err(Error::Unsupported(format!(
            "cotangent coefficients are supported up to order {MAX_COT_ORDER}, got {order}"
        )));
    }
    let bern = bernoulli_numbers(2 * order)?;
    let mut exact = Vec::with_capacity(order + 1);
    let mut factorial = BigInt::one();
    let mut power = BigInt::one();
    for k in 0..=order {
        if k > 0 {
            factorial *= BigInt::from((2 * k - 1) * (2 * k));
            power *= BigInt::from(-4);
        }
        exact.push(BigRational::new(power.clone(), factorial.clone()) * &bern[2 * k]);
    }
    let values = exact
        .iter()
        .map(|q| q.to_f64().expect("cotangent coefficients are representable"))
        .collect();
    Ok(CotCoefficients { exact, values })
}

/// Shared table of `b_k` up to [`MAX_COT_ORDER`].
pub fn cot_table() -> &'static CotCoefficients {
    use std::sync::OnceLock;
    static TABLE: OnceLock<CotCoefficients> = OnceLock::new();
    TABLE.get_or_init(|| cot_coeffs(MAX_COT_ORDER).expect("order within range"))
}

/// `|b_k| pi^{2k} <= pi^2 / 3` for `k >= 1`, since `b_k = -2 zeta(2k) / pi^{2k}`.
const COT_COEFF_SCALE: f64 = PI * PI / 3.0;

fn check_guard(lambda: f64, rho: f64, limit: f64) -> Result<()> {
    if !(lambda.is_finite() && rho.is_finite()) || rho < 0.0 {
        return Err(Error::NonFinite("kernel argument".into()));
    }
    if lambda > 0.0 {
        let x = lambda.sqrt() * rho;
        if x >= limit {
            return Err(Error::Guard { argument: x, limit });
        }
    }
    Ok(())
}

/// `sin(sqrt(lambda) rho) / (sqrt(lambda) rho)`, continued across `lambda <= 0`.
pub fn sinc_sqrt(lambda: f64, rho: f64) -> Result<f64> {
    check_guard(lambda, rho, PI)?;
    let x2 = lambda * rho * rho;
    if x2.abs() < SERIES_THRESHOLD {
        return Ok(1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0);
    }
    let x = x2.abs().sqrt();
    Ok(if lambda > 0.0 { x.sin() / x } else { x.sinh() / x })
}

/// `sqrt(lambda) rho cot(sqrt(lambda) rho)`, continued across `lambda <= 0`.
pub fn cotc_sqrt(lambda: f64, rho: f64) -> Result<f64> {
    check_guard(lambda, rho, PI - POLE_GUARD)?;
    let x2 = lambda * rho * rho;
    if x2.abs() < SERIES_THRESHOLD {
        return Ok(1.0 - x2 / 3.0 - x2 * x2 / 45.0 - 2.0 * x2 * x2 * x2 / 945.0);
    }
    let x = x2.abs().sqrt();
    Ok(if lambda > 0.0 { x / x.tan() } else { x / x.tanh() })
}

/// Truncated series value with a rigorous tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_{k<=K} b_k lambda^k rho^{2k}` with a geometric tail bound.
pub fn cotc_series(lambda: f64, rho: f64, order: usize) -> Result<SeriesValue> {
    let b = cot_table().values();
    if order > MAX_COT_ORDER {
        return Err(Error::Unsupported(format!("series order {order}")));
    }
    let x2 = lambda * rho * rho;
    let terms: Vec<f64> = (0..=order).map(|k| b[k] * x2.powi(k as i32)).collect();
    let q = x2.abs() / (PI * PI);
    if q >= 1.0 {
        return Err(Error::Guard {
            argument: x2.abs().sqrt(),
            limit: PI,
        });
    }
    let tail = COT_COEFF_SCALE * q.powi(order as i32 + 1) / (1.0 - q);
    Ok(SeriesValue {
        value: linalg::pairwise_sum(&terms),
        tail_bound: tail,
    })
}

/// Spectral evaluation of the matrix kernels of a Jacobi operator at radius `rho`.
#[derive(Debug, Clone)]
pub struct MatrixTrig<'a> {
    op: &'a JacobiOperator,
    rho: f64,
    det_sinc: f64,
    cotc: Vec<f64>,
}

impl MatrixTrig<'_> {
    /// `det(sin(sqrt(R_u) rho) / (sqrt(R_u) rho))`.
    pub fn det_sinc(&self) -> f64 {
        self.det_sinc
    }

    /// `<sqrt(R_u) cot(sqrt(R_u) rho) v, v>`.
    pub fn cot_quadratic(&self, v: &[f64]) -> f64 {
        self.cotc_quadratic(v) / self.rho
    }

    /// `<sqrt(R_u) rho cot(sqrt(R_u) rho) v, v>`; finite at `rho = 0`.
    pub fn cotc_quadratic(&self, v: &[f64]) -> f64 {
        let coords = self.op.eigen().coordinates(v);
        let terms: Vec<f64> = self
            .cotc
            .iter()
            .zip(&coords)
            .map(|(f, c)| f * c * c)
            .collect();
        linalg::pairwise_sum(&terms)
    }
}

/// Evaluates the spectral kernels of `op` at `rho`; every eigenvalue must pass
/// the guards of [`sinc_sqrt`] and [`cotc_sqrt`].
pub fn matrix_trig(op: &JacobiOperator, rho: f64) -> Result<MatrixTrig<'_>> {
    let mut det = 1.0;
    let mut cotc = Vec::with_capacity(op.dim());
    for &l in op.eigenvalues() {
        det *= sinc_sqrt(l, rho)?;
        cotc.push(cotc_sqrt(l, rho)?);
    }
    Ok(MatrixTrig {
        op,
        rho,
        det_sinc: det,
        cotc,
    })
}

/// `exp(sum_{k=1}^{K} (b_k / 2k) S_k rho^{2k})` from power sums `S_1..S_K`.
///
/// `max_abs_eigenvalue` bounds `|lambda_i|` and `dim` counts eigenvalues; both
/// feed the tail bound, which is an absolute bound on the returned value.
pub fn log_det_sinc_series(
    power_sums: &[f64],
    rho: f64,
    order: usize,
    max_abs_eigenvalue: f64,
    dim: usize,
) -> Result<SeriesValue> {
    if order > MAX_COT_ORDER || order > power_sums.len() {
        return Err(Error::Unsupported(format!(
            "series order {order} exceeds available power sums or coefficients"
        )));
    }
    let x = max_abs_eigenvalue.sqrt() * rho;
    if x > SERIES_RADIUS {
        return Err(Error::Guard {
            argument: x,
            limit: SERIES_RADIUS,
        });
    }
    let b = cot_table().values();
    let r2 = rho * rho;
    let terms: Vec<f64> = (1..=order)
        .map(|k| b[k] / (2.0 * k as f64) * power_sums[k - 1] * r2.powi(k as i32))
        .collect();
    let log_value = linalg::pairwise_sum(&terms);
    let q = x * x / (PI * PI);
    let mut log_tail = 0.0;
    let mut qk = q.powi(order as i32 + 1);
    // sum_{k>K} |b_k|/(2k) * dim * (max|lambda| rho^2)^k with |b_k| pi^{2k} <= pi^2/3.
    for k in (order + 1)..(order + 400) {
        let term = COT_COEFF_SCALE / (2.0 * k as f64) * dim as f64 * qk;
        log_tail += term;
        if term < 1e-300 || term < log_tail * 1e-17 {
            break;
        }
        qk *= q;
    }
    let value = log_value.exp();
    Ok(SeriesValue {
        value,
        tail_bound: value * (log_tail.exp() - 1.0) + log_tail * f64::EPSILON,
    })
}

/// Runs [`log_det_sinc_series`] from order 12 upward until the tail bound is
/// below `target` or order 24 is reached (then [`Error::Convergence`]).
pub fn adaptive_log_det_sinc(op: &JacobiOperator, rho: f64, target: f64) -> Result<SeriesValue> {
    let max_abs = op.eigenvalues().iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let sums = op.power_sums(24);
    let mut order = 12;
    loop {
        let v = log_det_sinc_series(&sums, rho, order, max_abs, op.dim())?;
        if v.tail_bound < target {
            return Ok(v);
        }
        if order >= 24 {
            return Err(Error::Convergence {
                order,
                tail_bound: v.tail_bound,
            });
        }
        order += 4;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::RiemannCurvature;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_bernoulli_numbers() {
        let b = bernoulli_numbers(8).unwrap();
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[6], q(1, 42));
        assert_eq!(b[8], q(-1, 30));
    }

    #[test]
    fn bernoulli_limit_enforced() {
        assert!(bernoulli_numbers(64).is_ok());
        assert!(bernoulli_numbers(65).is_err());
    }

    #[test]
    fn first_cot_coefficients() {
        let c = cot_coeffs(3).unwrap();
        assert_eq!(c.exact()[0], q(1, 1));
        assert_eq!(c.exact()[1], q(-1, 3));
        assert_eq!(c.exact()[2], q(-1, 45));
        assert_eq!(c.exact()[3], q(-2, 945));
        assert!(cot_coeffs(31).is_err());
    }

    #[test]
    fn cot_coefficients_negative_and_exactly_projected() {
        let c = cot_coeffs(MAX_COT_ORDER).unwrap();
        for (k, (e, f)) in c.exact().iter().zip(c.values()).enumerate().skip(1) {
            assert!(*f < 0.0, "b_{k} = {f}");
            let back = BigRational::from_float(*f).unwrap();
            let rel = ((back - e) / e).to_f64().unwrap().abs();
            assert!(rel <= f64::EPSILON / 2.0, "b_{k}: rel {rel}");
        }
    }

    #[test]
    fn cot_partial_sums_converge_at_half() {
        let x: f64 = 0.5;
        let exact = x / x.tan();
        let s = cotc_series(1.0, x, 20).unwrap();
        assert!((s.value - exact).abs() <= 1e-12);
        assert!((s.value - exact).abs() <= s.tail_bound + 1e-16);
    }

    #[test]
    fn sinc_examples() {
        assert!((sinc_sqrt(1.0, PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(sinc_sqrt(0.0, 5.0).unwrap(), 1.0);
        assert!((sinc_sqrt(-1.0, 1.0).unwrap() - 1.0_f64.sinh()).abs() < 1e-15);
        assert!((sinc_sqrt(-1.0, 1.0).unwrap() - 1.1752011936).abs() < 1e-10);
        assert!(matches!(sinc_sqrt(1.0, PI), Err(Error::Guard { .. })));
    }

    #[test]
    fn cotc_examples() {
        assert!((cotc_sqrt(1.0, PI / 4.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(cotc_sqrt(0.0, 3.0).unwrap(), 1.0);
        let c = cotc_sqrt(-1.0, 1.0).unwrap();
        assert!((c - 1.0 / 1.0_f64.tanh()).abs() < 1e-15);
        assert!((c - 1.3130352855).abs() < 1e-10);
        assert!(matches!(cotc_sqrt(1.0, PI - 1e-10), Err(Error::Guard { .. })));
        assert!(cotc_sqrt(1.0, PI - 1e-6).is_ok());
    }

    #[test]
    fn kernels_continuous_across_zero() {
        for rho in [0.1, 0.5, 1.0, 2.0] {
            for f in [sinc_sqrt, cotc_sqrt] {
                let at0 = f(0.0, rho).unwrap();
                assert!((f(1e-10, rho).unwrap() - at0).abs() <= 1e-9);
                assert!((f(-1e-10, rho).unwrap() - at0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn cotc_series_within_tail_bound() {
        for lambda in [-1.0, -0.3, 0.4, 1.0] {
            for rho in [0.2, 1.0, 2.0] {
                let s = cotc_series(lambda, rho, 16).unwrap();
                let exact = cotc_sqrt(lambda, rho).unwrap();
                assert!((s.value - exact).abs() <= s.tail_bound + 1e-14);
            }
        }
    }

    #[test]
    fn matrix_trig_on_constant_curvature() {
        let u = [0.0, 0.0, 1.0];
        let s3 = RiemannCurvature::constant(3, 1.0).jacobi_operator(&u).unwrap();
        let t = matrix_trig(&s3, 0.5).unwrap();
        assert!((t.det_sinc() - (0.5_f64.sin() / 0.5).powi(2)).abs() < 1e-15);

        let h3 = RiemannCurvature::constant(3, -1.0).jacobi_operator(&u).unwrap();
        let t = matrix_trig(&h3, 0.5).unwrap();
        assert!((t.det_sinc() - (0.5_f64.sinh() / 0.5).powi(2)).abs() < 1e-15);

        let e3 = RiemannCurvature::zero(3).jacobi_operator(&u).unwrap();
        let t = matrix_trig(&e3, 0.5).unwrap();
        assert_eq!(t.det_sinc(), 1.0);
        let v = [0.3, 0.4, 1.2];
        assert!((t.cot_quadratic(&v) - linalg::dot(&v, &v) / 0.5).abs() < 1e-14);
    }

    #[test]
    fn log_det_series_examples() {
        let zero = log_det_sinc_series(&[0.0; 12], 0.7, 12, 0.0, 3).unwrap();
        assert_eq!(zero.value, 1.0);

        let s3 = log_det_sinc_series(&[2.0; 12], 0.5, 12, 1.0, 3).unwrap();
        assert!((s3.value - (0.5_f64.sin() / 0.5).powi(2)).abs() <= 1e-12);

        let h4: Vec<f64> = (1..=12).map(|k| 3.0 * (-1.0_f64).powi(k)).collect();
        let v = log_det_sinc_series(&h4, 0.5, 12, 1.0, 4).unwrap();
        assert!((v.value - (0.5_f64.sinh() / 0.5).powi(3)).abs() <= 1e-10);
    }

    #[test]
    fn log_det_series_radius_guard() {
        assert!(matches!(
            log_det_sinc_series(&[1.0; 12], 2.6, 12, 1.0, 2),
            Err(Error::Guard { .. })
        ));
    }
}
