//! Classical worst-case and randomized baselines, plus the closed-form
//! information-complexity and entropy quantities they are compared against.
//!
//! The adversarial construction certifies the worst-case failure of any
//! deterministic sample set on bounded continuous functions: it produces a
//! pair of functions vanishing on the given points whose integrals straddle
//! almost the whole range. All certificates are computed in exact rational
//! arithmetic, never by quadrature.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Plain Monte Carlo over [0,1]^d: the mean of f at n independent uniform
/// points. Unbiased for the integral.
pub fn monte_carlo(
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    assert!(n >= 1 && dim >= 1);
    let mut point = vec![0.0; dim];
    let mut acc = 0.0;
    for _ in 0..n {
        for c in point.iter_mut() {
            *c = rng.random();
        }
        acc += f(&point);
    }
    acc / n as f64
}

/// Composite midpoint rule (1/n) sum_j f((2j-1)/(2n)).
///
/// Worst-case optimal for Lipschitz-1 integrands with error 1/(4n). The
/// midpoint weights sum to one, so constants are integrated exactly.
pub fn lipschitz_quadrature(f: &dyn Fn(f64) -> f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "midpoint rule needs at least 2 nodes, got {n}"
        )));
    }
    let acc: f64 = (1..=n)
        .map(|j| f((2 * j - 1) as f64 / (2 * n) as f64))
        .sum();
    Ok(acc / n as f64)
}

/// Shift a Lipschitz function to vanish at zero: g(x) = f(x) - f(0), so
/// |g(x)| <= x, the integral of g lies in [-1/2, 1/2], and
/// S(f) = S(g) + f(0). This is what makes unbounded-range problems
/// amenable to unit-vector computation.
pub fn rescale_lipschitz<F>(f: F) -> (impl Fn(f64) -> f64, f64)
where
    F: Fn(f64) -> f64,
{
    let f0 = f(0.0);
    (move |x: f64| f(x) - f0, f0)
}

fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let scale = BigInt::from(1u128 << 62);
    let scaled = (r.numer() * &scale) / r.denom();
    let mut rest = scaled;
    let negative = rest < BigInt::from(0);
    if negative {
        rest = -rest;
    }
    let chunk = BigInt::from(u32::MAX as u64 + 1);
    let mut out = 0.0;
    let mut factor = 1.0;
    while rest > BigInt::from(0) {
        let part: BigInt = &rest % &chunk;
        out += part.to_string().parse::<f64>().unwrap() * factor;
        rest /= &chunk;
        factor *= u32::MAX as f64 + 1.0;
    }
    let out = out / (1u128 << 62) as f64;
    if negative {
        -out
    } else {
        out
    }
}

/// The certified pair (f1, f2 = -f1): continuous, sup-norm at most 1,
/// vanishing on the sample points, with integrals straddling +-(1 - gamma).
pub struct AdversarialPair {
    points: Vec<Vec<f64>>,
    dim: usize,
    radius: f64,
}

/// Exactly verified properties of an [`AdversarialPair`].
#[derive(Clone, Debug)]
pub struct AdversarialCertificate {
    /// f1 evaluates to exactly 0 at every sample point.
    pub vanishes: bool,
    /// Certified lower bound on the integral of f1. For d = 1 this is the
    /// exact piecewise-linear integral; for d >= 2 it is 1 minus the exact
    /// total volume of the tent supports. Computed rationally and reported
    /// as f64.
    pub integral_lower_bound: f64,
    /// 1 - gamma, what the bound is checked against.
    pub target: f64,
    pub valid: bool,
}

impl AdversarialPair {
    /// Build the pair for the given sample points and integral gap gamma:
    /// tents of ell-infinity radius rho = (gamma/n)^(1/d) / 2 are cut out
    /// around each point, excising total mass at most gamma.
    pub fn new(points: &[Vec<f64>], dim: usize, gamma: f64) -> Result<Self> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        for p in points {
            if p.len() != dim {
                return Err(Error::InvalidArgument(
                    "sample point dimension mismatch".into(),
                ));
            }
        }
        let radius = if points.is_empty() {
            0.0
        } else {
            let r = 0.5 * (gamma / points.len() as f64).powf(1.0 / dim as f64);
            if r < 1e-9 {
                return Err(Error::GapTooSmall(r));
            }
            r
        };
        Ok(AdversarialPair {
            points: points.to_vec(),
            dim,
            radius,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// f1(x) = min(1, dist_inf(x, points) / rho); identically 1 when the
    /// point list is empty.
    pub fn f1(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut best = f64::INFINITY;
        for p in &self.points {
            let dist = x
                .iter()
                .zip(p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            best = best.min(dist / self.radius);
        }
        best.min(1.0)
    }

    pub fn f2(&self, x: &[f64]) -> f64 {
        -self.f1(x)
    }

    /// f1 at a rational point (d = 1): nearest sample point by binary search
    /// over the sorted list.
    fn f1_rational(sorted: &[BigRational], rho: &BigRational, x: &BigRational) -> BigRational {
        let one = BigRational::from_integer(1.into());
        let idx = sorted.partition_point(|t| t <= x);
        let mut best: Option<BigRational> = None;
        for cand in [idx.checked_sub(1), Some(idx)].into_iter().flatten() {
            if let Some(t) = sorted.get(cand) {
                let dist = if x >= t { x - t } else { t - x };
                if best.as_ref().is_none_or(|b| dist < *b) {
                    best = Some(dist);
                }
            }
        }
        match best {
            Some(dist) => (dist / rho).min(one),
            None => one,
        }
    }

    /// Exact certification of the three defining properties.
    pub fn certify(&self, gamma: f64) -> AdversarialCertificate {
        let vanishes = self.points.iter().all(|p| self.f1(p) == 0.0);
        let bound = if self.points.is_empty() {
            BigRational::from_integer(1.into())
        } else if self.dim == 1 {
            self.exact_integral_1d()
        } else {
            self.volume_bound()
        };
        let target = 1.0 - gamma;
        let valid = vanishes && bound >= to_rational(target);
        AdversarialCertificate {
            vanishes,
            integral_lower_bound: rational_to_f64(&bound),
            target,
            valid,
        }
    }

    /// Exact integral of f1 on [0,1] (d = 1): f1 is piecewise linear with
    /// breakpoints at the sample points, their rho-offsets, and the
    /// midpoints of adjacent sorted neighbors (only the two nearest cones
    /// can attain the min), so trapezoids between consecutive breakpoints
    /// are exact.
    fn exact_integral_1d(&self) -> BigRational {
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        let rho = to_rational(self.radius);
        let mut ts: Vec<BigRational> = self.points.iter().map(|p| to_rational(p[0])).collect();
        ts.sort();
        ts.dedup();
        let mut cuts: Vec<BigRational> = vec![zero.clone(), one.clone()];
        for t in &ts {
            cuts.push(t.clone());
            cuts.push(t + &rho);
            cuts.push(t - &rho);
        }
        for w in ts.windows(2) {
            cuts.push((&w[0] + &w[1]) / &two);
        }
        cuts.retain(|c| *c >= zero && *c <= one);
        cuts.sort();
        cuts.dedup();
        let mut acc = BigRational::from_integer(0.into());
        for w in cuts.windows(2) {
            let fa = Self::f1_rational(&ts, &rho, &w[0]);
            let fb = Self::f1_rational(&ts, &rho, &w[1]);
            acc += (fa + fb) / &two * (&w[1] - &w[0]);
        }
        acc
    }

    /// 1 minus the exact total volume of the clipped tent supports: a valid
    /// lower bound on the integral of f1 in any dimension.
    fn volume_bound(&self) -> BigRational {
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        let rho = to_rational(self.radius);
        let mut excised = BigRational::from_integer(0.into());
        for p in &self.points {
            let mut vol = BigRational::from_integer(1.into());
            for &c in p {
                let c = to_rational(c);
                let hi = (&c + &rho).min(one.clone());
                let lo = (&c - &rho).max(zero.clone());
                vol *= hi - lo;
            }
            excised += vol;
        }
        one - excised
    }
}

/// Worst-case information complexity of the Boolean mean:
/// ceil(N (1 - 2 eps)), computed in exact rational arithmetic.
pub fn info_complexity_boolean(eps: f64, n: u64) -> Result<u64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in [0, 0.5], got {eps}"
        )));
    }
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    let value = BigRational::from_integer(n.into()) * (one - two * to_rational(eps));
    let ceiled = value.ceil().to_integer();
    Ok(ceiled.try_into().unwrap_or(0))
}

/// Covering number of an interval of the given halfwidth by sets of
/// diameter 2 eps: ceil(h / eps) cells.
pub fn interval_covering_number(eps: f64, halfwidth: f64) -> Result<u64> {
    if eps <= 0.0 || halfwidth <= 0.0 {
        return Err(Error::InvalidArgument(
            "epsilon and halfwidth must be positive".into(),
        ));
    }
    let cells = (to_rational(halfwidth) / to_rational(eps)).ceil().to_integer();
    Ok(cells.try_into().unwrap_or(u64::MAX).max(1))
}

/// The eps-entropy of an interval of the given halfwidth:
/// log2 ceil(h / eps).
pub fn entropy_interval(eps: f64, halfwidth: f64) -> Result<f64> {
    Ok((interval_covering_number(eps, halfwidth)? as f64).log2())
}

/// Number of 1/PL_GRID segments of the piecewise-linear test family.
pub const PL_GRID: usize = 64;

/// A piecewise-linear Lipschitz-1 test function on [0,1]: breakpoints on the
/// 1/64 grid, slopes in [-1,1], exact trapezoid integration.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    values: Vec<f64>,
}

impl PiecewiseLinear {
    /// Random member: start value in [-1,1], independent uniform slopes in
    /// [-1,1].
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut values = Vec::with_capacity(PL_GRID + 1);
        let mut v = rng.random::<f64>() * 2.0 - 1.0;
        values.push(v);
        for _ in 0..PL_GRID {
            let slope = rng.random::<f64>() * 2.0 - 1.0;
            v += slope / PL_GRID as f64;
            values.push(v);
        }
        PiecewiseLinear { values }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let scaled = x * PL_GRID as f64;
        let cell = (scaled.floor() as usize).min(PL_GRID - 1);
        let s = scaled - cell as f64;
        self.values[cell] * (1.0 - s) + self.values[cell + 1] * s
    }

    /// Exact integral: trapezoids over the knot grid.
    pub fn integral(&self) -> f64 {
        let h = 1.0 / PL_GRID as f64;
        (0..PL_GRID)
            .map(|i| 0.5 * (self.values[i] + self.values[i + 1]) * h)
            .sum()
    }

    pub fn at_zero(&self) -> f64 {
        self.values[0]
    }
}

#[cfg(test)]
pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let sy: f64 = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let num: f64 = pts.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - sx) * (p.0 - sx)).sum();
    num / den
}
