//! Analysis constants of the threshold distribution `f(g) ∝ exp(-b/g)` on
//! `[b, 1]`, and sampling from it.

use rand::Rng;
use serde::Serialize;

/// Default distribution parameter.
pub const DEFAULT_B: f64 = 0.6945;
/// Grid size for maximizing `theta_b`.
pub const THETA_GRID: usize = 1_000_000;
/// Absolute error target of the quadratures.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstantsError {
    #[error("b = {0} outside [1 - exp(-3/4), 1)")]
    OutOfRange(f64),
    #[error("quadrature did not converge on [{0}, {1}]")]
    NoConvergence(f64, f64),
}

/// Smallest admissible `b`.
pub fn b_min() -> f64 {
    1.0 - (-0.75f64).exp()
}

pub fn check_b(b: f64) -> Result<(), ConstantsError> {
    // The lower endpoint is accepted up to rounding of `1 - exp(-3/4)`.
    if !(b >= b_min() - 1e-15 && b < 1.0) {
        return Err(ConstantsError::OutOfRange(b));
    }
    Ok(())
}

/// Adaptive Simpson; returns the value and an error estimate.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64), ConstantsError> {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<(f64, f64)> {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Some((left + right + delta / 15.0, delta.abs() / 15.0));
        }
        if depth == 0 {
            return None;
        }
        let (l, el) = rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)?;
        let (r, er) = rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)?;
        Some((l + r, el + er))
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 48).ok_or(ConstantsError::NoConvergence(a, b))
}

/// `theta_b(y) = exp(-(3y+4b)/(3y+1)) + exp(-(3y+4b)/(y+3))`.
pub fn theta(b: f64, y: f64) -> f64 {
    (-(3.0 * y + 4.0 * b) / (3.0 * y + 1.0)).exp() + (-(3.0 * y + 4.0 * b) / (y + 3.0)).exp()
}

/// Bound on `|theta_b'|` over `[b, 1]`; both exponentials are at most 1.
pub fn theta_lipschitz(b: f64) -> f64 {
    3.0 * (1.0 - 4.0 * b).abs() / (3.0 * b + 1.0).powi(2) + (9.0 - 4.0 * b).abs() / (b + 3.0).powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub b: f64,
    /// `I_b = int_b^1 exp(-b/g) dg`.
    pub i_b: f64,
    /// `int_b^1 exp(-b/g)/g dg`.
    pub j_b: f64,
    pub quad_error: f64,
    /// Coefficient on the edge cost: `3 J_b / (2 I_b)`.
    pub tour_term: f64,
    pub theta_max: f64,
    pub theta_argmax: f64,
    pub theta_lipschitz: f64,
    pub grid_points: usize,
    /// Coefficient on the penalties: `max theta_b / (2 I_b)`.
    pub penalty_term: f64,
    pub alpha: f64,
    /// `alpha` with quadrature error and the grid certificate folded in.
    pub alpha_upper: f64,
}

pub fn verify_constants(b: f64) -> Result<Constants, ConstantsError> {
    check_b(b)?;
    let (i_b, ei) = integrate(&|g| (-b / g).exp(), b, 1.0, QUAD_TOL)?;
    let (j_b, ej) = integrate(&|g| (-b / g).exp() / g, b, 1.0, QUAD_TOL)?;
    let h = (1.0 - b) / THETA_GRID as f64;
    let (mut theta_max, mut theta_argmax) = (f64::NEG_INFINITY, b);
    for i in 0..=THETA_GRID {
        let y = b + h * i as f64;
        let t = theta(b, y);
        if t > theta_max {
            theta_max = t;
            theta_argmax = y;
        }
    }
    let lip = theta_lipschitz(b);
    let theta_upper = theta_max + lip * h / 2.0;
    let tour_term = 3.0 * j_b / (2.0 * i_b);
    let penalty_term = theta_max / (2.0 * i_b);
    let alpha = tour_term.max(penalty_term);
    let alpha_upper = (3.0 * (j_b + ej)).max(theta_upper) / (2.0 * (i_b - ei));
    Ok(Constants {
        b,
        i_b,
        j_b,
        quad_error: ei.max(ej),
        tour_term,
        theta_max,
        theta_argmax,
        theta_lipschitz: lip,
        grid_points: THETA_GRID + 1,
        penalty_term,
        alpha,
        alpha_upper,
    })
}

/// Guarantee of a fixed threshold `g`: `max{3/(2g), 1, exp(-3/4)/(1-g)}`.
pub fn fixed_threshold_alpha(g: f64) -> f64 {
    let pen = if g < 1.0 { (-0.75f64).exp() / (1.0 - g) } else { f64::INFINITY };
    (1.5 / g).max(1.0).max(pen)
}

/// The balancing threshold `1 / (1 + (2/3) exp(-3/4))`.
pub fn balanced_gamma() -> f64 {
    1.0 / (1.0 + 2.0 / 3.0 * (-0.75f64).exp())
}

/// Guarantee of classical threshold rounding: `max{3/(2g), 1/(1-g)}`.
pub fn classic_threshold_alpha(g: f64) -> f64 {
    (1.5 / g).max(1.0 / (1.0 - g))
}

/// Inverse-CDF sampler for the density `exp(-b/g) / I_b` on `[b, 1]`.
#[derive(Clone, Debug)]
pub struct ThresholdSampler {
    b: f64,
    knots: Vec<f64>,
    cdf: Vec<f64>,
    total: f64,
}

const CELLS: usize = 2048;

/// Five-point Gauss–Legendre on `[a, c]`.
fn gl5(f: impl Fn(f64) -> f64, a: f64, c: f64) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let (mid, half) = (0.5 * (a + c), 0.5 * (c - a));
    X.iter().zip(W).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

impl ThresholdSampler {
    pub fn new(b: f64) -> Result<Self, ConstantsError> {
        check_b(b)?;
        let dens = |g: f64| (-b / g).exp();
        let knots: Vec<f64> = (0..=CELLS).map(|i| b + (1.0 - b) * i as f64 / CELLS as f64).collect();
        let mut cdf = vec![0.0; CELLS + 1];
        for i in 0..CELLS {
            cdf[i + 1] = cdf[i] + gl5(dens, knots[i], knots[i + 1]);
        }
        let total = cdf[CELLS];
        cdf.iter_mut().for_each(|c| *c /= total);
        Ok(ThresholdSampler { b, knots, cdf, total })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Normalized CDF.
    pub fn cdf(&self, g: f64) -> f64 {
        if g <= self.b {
            return 0.0;
        }
        if g >= 1.0 {
            return 1.0;
        }
        let i = (((g - self.b) / (1.0 - self.b) * CELLS as f64) as usize).min(CELLS - 1);
        self.cdf[i] + gl5(|t| (-self.b / t).exp(), self.knots[i], g) / self.total
    }

    /// `F^{-1}(u)` to within `1e-12`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, CELLS) - 1;
        let (mut lo, mut hi) = (self.knots[i], self.knots[i + 1]);
        let norm = self.total;
        let mut g = 0.5 * (lo + hi);
        for _ in 0..100 {
            let f = self.cdf[i] + gl5(|t| (-self.b / t).exp(), self.knots[i], g) / norm - u;
            if f > 0.0 {
                hi = g;
            } else {
                lo = g;
            }
            let newton = g - f * norm / (-self.b / g).exp();
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - g).abs() < 1e-13 {
                return next;
            }
            g = next;
        }
        g
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

pub fn sample_threshold<R: Rng + ?Sized>(b: f64, rng: &mut R) -> Result<f64, ConstantsError> {
    Ok(ThresholdSampler::new(b)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_alpha() {
        let c = verify_constants(DEFAULT_B).unwrap();
        assert!(c.alpha_upper < 1.774, "{c:?}");
        assert!(c.alpha > 1.7);
    }

    #[test]
    fn fixed_and_classic() {
        let a = fixed_threshold_alpha(balanced_gamma());
        assert!((a - (1.5 + (-0.75f64).exp())).abs() < 1e-12);
        assert!(a < 1.973);
        assert!((classic_threshold_alpha(0.6) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn range_guard() {
        assert_eq!(verify_constants(0.5).unwrap_err(), ConstantsError::OutOfRange(0.5));
        assert!(verify_constants(b_min()).is_ok());
    }

    #[test]
    fn cdf_endpoints_and_inverse() {
        let s = ThresholdSampler::new(DEFAULT_B).unwrap();
        assert!((s.cdf(1.0) - 1.0).abs() < 1e-15);
        for u in [0.0, 0.1, 0.5, 0.93, 1.0] {
            let g = s.quantile(u);
            assert!((DEFAULT_B..=1.0).contains(&g));
            assert!((s.cdf(g) - u).abs() < 1e-10, "u={u} g={g}");
        }
    }
}
