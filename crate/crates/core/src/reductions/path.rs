//! Gaussian path integration via Karhunen-Loeve truncation.
//!
//! Paths under the Wiener measure (covariance min(s,t) on [0,1]) expand as
//! x = sum_i t_i eta_i with independent t_i ~ Normal(0, lambda_i), where
//!
//!   eta_i(x) = sqrt(2) sin((2i-1) pi x / 2),
//!   lambda_i = 4 / (pi^2 (2i-1)^2).
//!
//! A path functional is supplied as a coefficient-space evaluator: it
//! receives a finite coefficient vector t in R^d and computes
//! f(t_1 eta_1 + ... + t_d eta_d). The L2([0,1])-Lipschitz property carries
//! over to the euclidean norm on coefficients because the eta_i are
//! orthonormal in L2.

use std::f64::consts::PI;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::qae::{Backend, Estimate};

/// Documented ceiling on the register width of randomized-query path
/// integration at accuracy eps: qubits_used <= PATH_QUBIT_LOG_FACTOR *
/// log2(1/eps). Checked at eps = 0.1 by the acceptance suite; the
/// deterministic-query setting would instead need on the order of
/// eps^-2 log2(1/eps) qubits.
pub const PATH_QUBIT_LOG_FACTOR: f64 = 8.0;

/// i-th Karhunen-Loeve eigenpair of the Wiener covariance: the eigenfunction
/// as a callable together with its variance lambda_i = 4 / (pi^2 (2i-1)^2).
/// Indexing starts at 1.
pub fn kl_eigenpair(i: u64) -> Result<(impl Fn(f64) -> f64, f64)> {
    if i < 1 {
        return Err(Error::InvalidArgument(
            "eigenpair index starts at 1".into(),
        ));
    }
    let odd = (2 * i - 1) as f64;
    let lambda = 4.0 / (PI * PI * odd * odd);
    let eta = move |x: f64| 2f64.sqrt() * (odd * PI * x / 2.0).sin();
    Ok((eta, lambda))
}

/// lambda_i alone.
pub fn kl_variance(i: u64) -> Result<f64> {
    kl_eigenpair(i).map(|(_, l)| l)
}

/// Closed form of int_0^1 eta_i(x) dx = 2 sqrt(2) / ((2i-1) pi).
pub fn eta_integral(i: u64) -> f64 {
    assert!(i >= 1);
    2.0 * 2f64.sqrt() / ((2 * i - 1) as f64 * PI)
}

/// Partial sum of the eigenvariances; increases monotonically to 1/2 (the
/// trace of min(s,t) on [0,1]).
pub fn kl_trace_partial(d: u64) -> f64 {
    (1..=d).map(|i| kl_variance(i).unwrap()).sum()
}

/// Truncation dimension d = ceil(9 L^2 / (pi^2 eps^2)).
///
/// The tail satisfies sum_{i>d} lambda_i <= 2 / (pi^2 (2d-1)), so with this d
/// the truncation error of an L-Lipschitz functional is at most
/// L * sqrt(tail) <= eps / 3.
pub fn truncation_dimension(eps: f64, lipschitz: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::BadEpsilon(eps));
    }
    if !(0.0..=1.0).contains(&lipschitz) {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must lie in [0, 1], got {lipschitz}"
        )));
    }
    Ok((9.0 * lipschitz * lipschitz / (PI * PI * eps * eps)).ceil() as u64)
}

/// One draw from mu_d: independent coordinates t_i ~ Normal(0, lambda_i).
pub fn gaussian_sample_mu_d(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let unit = Normal::new(0.0, 1.0).unwrap();
    (1..=d as u64)
        .map(|i| kl_variance(i).unwrap().sqrt() * unit.sample(rng))
        .collect()
}

/// A path integrand presented in coefficient space.
///
/// `evaluate` must accept a coefficient vector of any length d and return
/// f(t_1 eta_1 + ... + t_d eta_d). Values must stay within `sup_bound` and
/// the functional must be `lipschitz`-Lipschitz in the L2([0,1]) norm; both
/// bounds are at most 1.
#[derive(Clone)]
pub struct PathIntegrand {
    evaluator: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    lipschitz: f64,
    sup_bound: f64,
}

impl PathIntegrand {
    pub fn new(
        evaluator: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        lipschitz: f64,
        sup_bound: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lipschitz) || !(0.0..=1.0).contains(&sup_bound) {
            return Err(Error::InvalidArgument(
                "Lipschitz constant and sup bound must lie in [0, 1]".into(),
            ));
        }
        Ok(PathIntegrand {
            evaluator,
            lipschitz,
            sup_bound,
        })
    }

    /// f of the mean of the path: f(x) = g(int_0^1 x(t) dt), evaluated in
    /// coefficient space as g(sum_i t_i * int eta_i). g must be 1-Lipschitz
    /// and bounded by 1 on the reals; the coefficient functional then
    /// inherits L <= ||int eta||_2 <= 1... the weights c_i = eta_integral(i)
    /// have sum of squares 1/3, so L = sqrt(1/3) < 1 is also valid, but the
    /// conservative constant 1 is used unless the caller overrides.
    pub fn of_path_mean<G>(g: G, lipschitz: f64, sup_bound: f64) -> Result<Self>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let eval = move |coeffs: &[f64]| {
            let mean: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(idx, &t)| t * eta_integral(idx as u64 + 1))
                .sum();
            g(mean)
        };
        PathIntegrand::new(Arc::new(eval), lipschitz, sup_bound)
    }

    pub fn evaluate(&self, coeffs: &[f64]) -> f64 {
        (self.evaluator)(coeffs)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

/// Draw the randomized part of one path-integration run: the truncation
/// dimension, n = ceil(9 eps^-2) Gaussian points, the shifted value table
/// and a real-summation realization at eps/6 (the shift back to [-1,1]
/// doubles the error, giving the quantum stage its eps/3 share).
pub(crate) fn path_realize(
    f: &PathIntegrand,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<crate::reductions::RealizedSummation> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadEpsilon(eps));
    }
    let d = truncation_dimension(eps, f.lipschitz())? as usize;
    let n_mc = (9.0 / (eps * eps)).ceil() as usize;
    let mut values = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let point = gaussian_sample_mu_d(d, rng);
        let v = f.evaluate(&point);
        if v.abs() > f.sup_bound() + 1e-12 {
            return Err(Error::IntegrandOutOfRange(v));
        }
        values.push(((v + 1.0) / 2.0).clamp(0.0, 1.0));
    }
    let table = crate::oracles::RealTable::new(values)?;
    let mut inner = crate::reductions::real_summation_realize(&table, eps / 6.0, rng)?;
    inner.map_affine(2.0, -1.0);
    Ok(inner)
}

/// Path integral of `f` over the Wiener measure to accuracy eps.
///
/// The eps-budget is split in three: Karhunen-Loeve truncation at dimension
/// d = ceil(9 L^2 / (pi^2 eps^2)), Monte Carlo over n = ceil(9 eps^-2) draws
/// from mu_d, and quantum summation of the resulting table at eps/3. Qubit
/// usage depends on eps only, never on d.
pub fn path_integrate(
    f: &PathIntegrand,
    eps: f64,
    backend: Backend,
    seed: u64,
) -> Result<Estimate> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = path_realize(f, eps, &mut rng)?;
    let mut estimate = realized.sample(backend, &mut rng)?;
    estimate.seed = seed;
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn first_two_eigenvariances() {
        assert!((kl_variance(1).unwrap() - 4.0 / (PI * PI)).abs() < 1e-12);
        assert!((kl_variance(2).unwrap() - 4.0 / (9.0 * PI * PI)).abs() < 1e-12);
        // numeric anchors
        assert!((kl_variance(1).unwrap() - 0.405285).abs() < 1e-6);
        assert!((kl_variance(2).unwrap() - 0.045032).abs() < 1e-6);
    }

    #[test]
    fn eigenpair_index_starts_at_one() {
        assert!(kl_eigenpair(0).is_err());
    }

    #[test]
    fn eigenfunction_formula() {
        let (eta1, _) = kl_eigenpair(1).unwrap();
        assert!((eta1(1.0) - 2f64.sqrt()).abs() < 1e-12); // sin(pi/2) = 1
        let (eta2, _) = kl_eigenpair(2).unwrap();
        assert!((eta2(1.0) + 2f64.sqrt()).abs() < 1e-12); // sin(3 pi / 2) = -1
    }

    #[test]
    fn trace_partial_sum_approaches_one_half() {
        let s1000 = kl_trace_partial(1000);
        assert!(s1000 <= 0.5);
        assert!(s1000 >= 0.5 - 2e-4, "partial sum {s1000}");
    }

    #[test]
    fn trace_partial_sums_are_monotone_and_bounded() {
        let mut prev = 0.0;
        for d in 1..=200 {
            let s = kl_trace_partial(d);
            assert!(s > prev);
            // partial sum plus the integral tail bound brackets 1/2
            let tail_bound = 2.0 / (PI * PI * (2 * d - 1) as f64);
            assert!(s <= 0.5 && s + tail_bound >= 0.5);
            prev = s;
        }
    }

    #[test]
    fn eta_integral_matches_quadrature() {
        // Composite Simpson on a fine grid against the closed form.
        for i in 1..=5u64 {
            let (eta, _) = kl_eigenpair(i).unwrap();
            let n = 20_000;
            let h = 1.0 / n as f64;
            let mut acc = eta(0.0) + eta(1.0);
            for j in 1..n {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * eta(j as f64 * h);
            }
            let numeric = acc * h / 3.0;
            assert!(
                (numeric - eta_integral(i)).abs() < 1e-10,
                "i = {i}: {numeric} vs {}",
                eta_integral(i)
            );
        }
    }

    #[test]
    fn truncation_dimension_formula() {
        assert_eq!(truncation_dimension(0.3, 1.0).unwrap(), 11);
        assert_eq!(truncation_dimension(0.1, 1.0).unwrap(), 92);
    }

    #[test]
    fn truncation_tail_within_budget() {
        for &eps in &[0.3, 0.1] {
            let d = truncation_dimension(eps, 1.0).unwrap();
            let tail = 0.5 - kl_trace_partial(d);
            assert!(
                tail.sqrt() <= eps / 3.0,
                "eps = {eps}: sqrt tail {} > {}",
                tail.sqrt(),
                eps / 3.0
            );
        }
    }

    #[test]
    fn gaussian_sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let d = 2;
        let mut sum1 = 0.0;
        let mut sum1_sq = 0.0;
        let mut cross = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let t = gaussian_sample_mu_d(d, &mut rng);
            sum1 += t[0];
            sum1_sq += t[0] * t[0];
            sum2 += t[1];
            cross += t[0] * t[1];
        }
        let nf = n as f64;
        let lambda1 = kl_variance(1).unwrap();
        let mean1 = sum1 / nf;
        let var1 = sum1_sq / nf - mean1 * mean1;
        // mean within 3 sigma of 0
        assert!(mean1.abs() <= 3.0 * (lambda1 / nf).sqrt(), "mean {mean1}");
        // variance of t1 within 3 sigma of lambda_1 (var of squared normal is
        // 2 lambda^2)
        assert!(
            (var1 - lambda1).abs() <= 3.0 * (2.0 * lambda1 * lambda1 / nf).sqrt(),
            "var {var1} vs {lambda1}"
        );
        // sample correlation below 3 / sqrt(n)
        let mean2 = sum2 / nf;
        let corr = (cross / nf - mean1 * mean2)
            / (var1.sqrt() * kl_variance(2).unwrap().sqrt());
        assert!(corr.abs() <= 3.0 / nf.sqrt(), "corr {corr}");
    }

    #[test]
    fn sampler_is_deterministic_under_seed() {
        let a = gaussian_sample_mu_d(4, &mut ChaCha8Rng::seed_from_u64(9));
        let b = gaussian_sample_mu_d(4, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn path_integral_of_zero_is_exactly_zero() {
        let f = PathIntegrand::new(Arc::new(|_: &[f64]| 0.0), 1.0, 1.0).unwrap();
        let est = path_integrate(&f, 0.1, Backend::Analytic, 3).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn sin_of_path_mean_is_near_zero() {
        // Odd functional of a symmetric Gaussian: true value 0.
        let f = PathIntegrand::of_path_mean(|z| z.sin(), 1.0, 1.0).unwrap();
        let eps = 0.1;
        for seed in 0..10 {
            let est = path_integrate(&f, eps, Backend::Analytic, seed).unwrap();
            assert!(est.value.abs() <= eps, "seed {seed}: {}", est.value);
        }
    }

    #[test]
    fn cos_of_path_mean_matches_gaussian_moment() {
        // int_0^1 x(t) dt is Normal(0, 1/3) under the Wiener measure, so the
        // truth is exp(-1/6).
        let truth = (-1.0f64 / 6.0).exp();
        let f = PathIntegrand::of_path_mean(|z| z.cos(), 1.0, 1.0).unwrap();
        let eps = 0.1;
        for seed in 0..10 {
            let est = path_integrate(&f, eps, Backend::Analytic, seed).unwrap();
            assert!(
                (est.value - truth).abs() <= eps,
                "seed {seed}: {} vs {truth}",
                est.value
            );
        }
    }

    #[test]
    fn path_qubits_depend_on_eps_only() {
        // Two functionals with different Lipschitz constants get different
        // truncation dimensions but identical register widths.
        let f1 = PathIntegrand::of_path_mean(|z| z.cos(), 1.0, 1.0).unwrap();
        let f2 = PathIntegrand::of_path_mean(|z| (0.25 * z).cos(), 0.25, 1.0).unwrap();
        assert_ne!(
            truncation_dimension(0.1, f1.lipschitz()).unwrap(),
            truncation_dimension(0.1, f2.lipschitz()).unwrap()
        );
        let e1 = path_integrate(&f1, 0.1, Backend::Analytic, 4).unwrap();
        let e2 = path_integrate(&f2, 0.1, Backend::Analytic, 4).unwrap();
        assert_eq!(e1.qubits_used, e2.qubits_used);
    }

    #[test]
    fn path_rejects_out_of_range_values() {
        let f = PathIntegrand::new(Arc::new(|_: &[f64]| 1.5), 1.0, 1.0).unwrap();
        assert!(matches!(
            path_integrate(&f, 0.2, Backend::Analytic, 0),
            Err(Error::IntegrandOutOfRange(_))
        ));
    }
}
