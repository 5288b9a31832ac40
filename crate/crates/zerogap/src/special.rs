//! The analytic layer: the smooth weight W, the exponential kernel
//! F(a,b) = ∬_{u+v≤1, u,v≥0} e^{-au-bv} du dv, the gap functionals
//!
//! ```text
//! j_d(μ)  = μ + 2 ∫_0^{μ/d} (sin πv / πv)^2 dv
//! j_d*(λ) = λ - 2 ∫_0^{λ/d} (sin πv / πv)^2 dv
//! ```
//!
//! their root solvers (the small-gap constant μ_d solves j_d(μ_d) = 1 with
//! 0 < μ_d < 1, the large-gap constant λ_d is the first λ with j_d*(λ) = 1),
//! and the comparison function h(α) whose threshold h(α) > 1 forces a pair
//! of zeros closer than 2α.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, integrate_checked};

/// A smooth bump supported on \[1, 2\], carried around with its first two
/// derivatives and its Mellin value Ŵ(1) = ∫_1^2 W.
#[derive(Clone)]
pub struct SmoothWeight {
    w: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dw: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    d2w: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    mellin_at_1: f64,
}

impl fmt::Debug for SmoothWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothWeight")
            .field("mellin_at_1", &self.mellin_at_1)
            .finish_non_exhaustive()
    }
}

impl SmoothWeight {
    /// Wrap a weight with its derivatives; Ŵ(1) is computed by the two
    /// independent quadrature rules and must agree to 1e-12.
    pub fn new<W, D, D2>(w: W, dw: D, d2w: D2) -> Result<Self>
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mellin = integrate_checked(&w, 1.0, 2.0, 1e-12)?;
        Ok(SmoothWeight {
            w: Arc::new(w),
            dw: Arc::new(dw),
            d2w: Arc::new(d2w),
            mellin_at_1: mellin,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.w)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.dw)(x)
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        (self.d2w)(x)
    }

    /// Ŵ(1) = ∫_1^2 W(x) dx.
    pub fn mellin_at_1(&self) -> f64 {
        self.mellin_at_1
    }
}

/// The default bump: W(x) = exp(-1/((x-1)(2-x))) on (1,2), 0 elsewhere.
/// Derivatives are closed-form.
pub fn default_weight() -> SmoothWeight {
    let w = |x: f64| {
        if x <= 1.0 || x >= 2.0 {
            0.0
        } else {
            (-1.0 / ((x - 1.0) * (2.0 - x))).exp()
        }
    };
    let dw = move |x: f64| {
        if x <= 1.0 || x >= 2.0 {
            0.0
        } else {
            let u = (x - 1.0) * (2.0 - x);
            let du = 3.0 - 2.0 * x;
            w(x) * du / (u * u)
        }
    };
    let d2w = move |x: f64| {
        if x <= 1.0 || x >= 2.0 {
            0.0
        } else {
            let u = (x - 1.0) * (2.0 - x);
            let du = 3.0 - 2.0 * x;
            let g = du / (u * u);
            w(x) * (g * g - 2.0 / (u * u) - 2.0 * du * du / (u * u * u))
        }
    };
    SmoothWeight::new(w, dw, d2w).expect("bump weight quadrature agreement")
}

// --- the kernel F ---------------------------------------------------------

/// φ(z) = (1 - e^{-z})/z, entire with φ(0) = 1; the kernel is its divided
/// difference: F(a,b) = (φ(b) - φ(a))/(a - b).
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // Σ (-z)^k / (k+1)!
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..60 {
            sum += term;
            term *= -z / (k as f64 + 2.0);
            if term.norm() < 1e-20 {
                break;
            }
        }
        sum
    } else {
        (1.0 - (-z).exp()) / z
    }
}

/// k-th derivative of φ.  Closed form away from 0:
/// φ^(k)(z) = (-1)^k k! (1 - e^{-z} e_k(z)) / z^{k+1}
/// with e_k the exponential partial sum; power series near 0.
fn phi1_deriv(k: u32, z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // Σ_j (-1)^{j+k} (j+k)!/(j! (j+k+1)!) z^j
        let mut sum = Complex64::new(0.0, 0.0);
        // coefficient for j = 0: (-1)^k k!/(k+1)! = (-1)^k/(k+1)
        let sign0 = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut coeff = sign0 / (k as f64 + 1.0);
        let mut zpow = Complex64::new(1.0, 0.0);
        for j in 0u32..200 {
            let term = zpow * coeff;
            sum += term;
            if term.norm() < 1e-20 {
                break;
            }
            // c_{j+1}/c_j = -(j+k+1)/((j+1)(j+k+2))
            let jf = j as f64;
            let kf = k as f64;
            coeff *= -(jf + kf + 1.0) / ((jf + 1.0) * (jf + kf + 2.0));
            zpow *= z;
        }
        sum
    } else {
        // e_k(z) = Σ_{j=0}^k z^j/j!
        let mut ek = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..=k {
            ek += term;
            term *= z / (j as f64 + 1.0);
        }
        let mut kfact = 1.0f64;
        for j in 2..=k {
            kfact *= j as f64;
        }
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * kfact * (1.0 - (-z).exp() * ek) / z.powu(k + 1)
    }
}

/// Threshold below which (a, b) counts as lying on the singular set
/// {a = b} ∪ {a = 0} ∪ {b = 0} of the naive closed form.
const F_SINGULAR_EPS: f64 = 1e-4;

/// F(a,b) = ∬_{u+v≤1} e^{-au-bv} du dv.
///
/// Away from the diagonal this is the divided difference
/// (φ(b) - φ(a))/(a - b), which is stable for a = 0 or b = 0; within
/// 1e-4 of the diagonal it switches to the odd-order Taylor expansion of
/// the difference quotient about the midpoint, so all singularities are
/// removable and F(0,0) = 1/2 lands exactly on the limit branch.
pub fn kernel_f(a: Complex64, b: Complex64) -> Complex64 {
    if (a - b).norm() >= F_SINGULAR_EPS {
        (phi1(b) - phi1(a)) / (a - b)
    } else {
        let m = 0.5 * (a + b);
        let delta = 0.5 * (a - b);
        let d2 = delta * delta;
        -(phi1_deriv(1, m) + phi1_deriv(3, m) * d2 / 6.0 + phi1_deriv(5, m) * d2 * d2 / 120.0)
    }
}

/// The power-series route to the same kernel:
/// F(a,b) = Σ_{m≥1} ((-1)^{m+1}/(m+1)!) h_{m-1}(a,b)
/// with h_j the complete homogeneous symmetric polynomial of degree j.
/// An independent algebraic path used to cross-check `kernel_f`.
pub fn kernel_f_series(a: Complex64, b: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut h = Complex64::new(1.0, 0.0); // h_0
    let mut bpow = Complex64::new(1.0, 0.0);
    let mut inv_fact = 0.5; // 1/(m+1)! at m = 1
    let mut sign = 1.0;
    let mut small_streak = 0;
    for m in 1u32..300 {
        let term = h * (sign * inv_fact);
        sum += term;
        if term.norm() < 1e-19 * sum.norm().max(1.0) {
            small_streak += 1;
            if small_streak >= 3 {
                break;
            }
        } else {
            small_streak = 0;
        }
        // advance: h_m = a h_{m-1} + b^m, 1/(m+2)!, sign flip
        bpow *= b;
        h = a * h + bpow;
        inv_fact /= m as f64 + 2.0;
        sign = -sign;
    }
    sum
}

// --- gap functionals -------------------------------------------------------

fn sinc_sq(v: f64) -> f64 {
    if v.abs() < 1e-8 {
        let x = PI * v;
        let x2 = x * x;
        (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0).max(0.0)
    } else {
        let x = PI * v;
        let s = x.sin() / x;
        s * s
    }
}

/// j_d(μ) = μ + 2 ∫_0^{μ/d} (sin πv/πv)^2 dv; strictly increasing in μ with
/// derivative 1 + (2/d) sinc^2 ≥ 1.
pub fn j_small(d: u32, mu: f64) -> f64 {
    assert!(d >= 1, "degree must be positive");
    mu + 2.0 * adaptive_simpson(&sinc_sq, 0.0, mu / d as f64, 1e-13)
}

/// j_d*(λ) = λ - 2 ∫_0^{λ/d} (sin πv/πv)^2 dv.
pub fn j_large(d: u32, lam: f64) -> f64 {
    assert!(d >= 1, "degree must be positive");
    lam - 2.0 * adaptive_simpson(&sinc_sq, 0.0, lam / d as f64, 1e-13)
}

/// Which constant a solver produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    SmallGap,
    LargeGap,
}

/// A solved gap constant with its residual |j(value) - 1| and the final
/// bisection bracket.
#[derive(Debug, Clone)]
pub struct GapConstantResult {
    pub degree: u32,
    pub kind: GapKind,
    pub value: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

const MIN_TOL: f64 = 1e-12;

/// Solve j_d(μ) = 1 by bisection on [0, 1]; the bracket is always valid
/// because j_d(0) = 0 and j_d(1) > 1, and j_d is strictly increasing.
/// Stops when |j_d(μ) - 1| ≤ tol.
pub fn solve_mu(d: u32, tol: f64) -> Result<GapConstantResult> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    if tol < MIN_TOL {
        return Err(Error::ToleranceTooTight { got: tol, min: MIN_TOL });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    let mut r = j_small(d, mid) - 1.0;
    for _ in 0..200 {
        if r.abs() <= tol {
            break;
        }
        if r > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        mid = 0.5 * (lo + hi);
        r = j_small(d, mid) - 1.0;
    }
    Ok(GapConstantResult {
        degree: d,
        kind: GapKind::SmallGap,
        value: mid,
        residual: r.abs(),
        bracket: (lo, hi),
    })
}

/// Scan ceiling for the first upward crossing of j_d*.
const LAMBDA_SCAN_CEILING: f64 = 10.0;
const LAMBDA_SCAN_STEP: f64 = 0.01;

/// Smallest λ > 0 with j_d*(λ) = 1: forward scan (step 0.01) brackets the
/// first upward crossing, then bisection refines until |j_d*(λ) - 1| ≤ tol.
pub fn solve_lambda(d: u32, tol: f64) -> Result<GapConstantResult> {
    if d == 0 {
        return Err(Error::ZeroArgument);
    }
    if tol < MIN_TOL {
        return Err(Error::ToleranceTooTight { got: tol, min: MIN_TOL });
    }
    let mut x = LAMBDA_SCAN_STEP;
    let mut bracket = None;
    while x <= LAMBDA_SCAN_CEILING {
        if j_large(d, x) > 1.0 {
            bracket = Some((x - LAMBDA_SCAN_STEP, x));
            break;
        }
        x += LAMBDA_SCAN_STEP;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::ScanCeiling {
        ceiling: LAMBDA_SCAN_CEILING,
        step: LAMBDA_SCAN_STEP,
    })?;
    let mut mid = 0.5 * (lo + hi);
    let mut r = j_large(d, mid) - 1.0;
    for _ in 0..200 {
        if r.abs() <= tol {
            break;
        }
        if r > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        mid = 0.5 * (lo + hi);
        r = j_large(d, mid) - 1.0;
    }
    Ok(GapConstantResult {
        degree: d,
        kind: GapKind::LargeGap,
        value: mid,
        residual: r.abs(),
        bracket: (lo, hi),
    })
}

/// The comparison function
///
/// ```text
/// h(α) = d·α·log Q / π + (4 / (π log X)) ∫_0^α sin²(u·log X / 2) du/u²
/// ```
///
/// with the integrand extended by continuity (value (log X / 2)² at u = 0).
/// With log X = 2 log Q the substitution α = πμ/(d log Q) turns h into
/// j_d(μ), so the threshold h(α) > 1 is the root condition for μ_d.
/// log Q and log X are independent arguments so that X = Q^{2-η} regimes
/// with η > 0 can be explored; the gap constants are the η → 0 limit.
pub fn h_alpha(alpha: f64, d: u32, log_q: f64, log_x: f64) -> f64 {
    assert!(d >= 1, "degree must be positive");
    assert!(log_q > 0.0 && log_x > 0.0);
    if alpha == 0.0 {
        return 0.0;
    }
    let half_lx = 0.5 * log_x;
    let integrand = move |u: f64| {
        let x = u * half_lx;
        let s = if x.abs() < 1e-8 {
            1.0 - x * x / 3.0
        } else {
            x.sin() / x
        };
        half_lx * half_lx * s * s
    };
    let first = d as f64 * alpha * log_q / PI;
    let second = 4.0 / (PI * log_x) * adaptive_simpson(&integrand, 0.0, alpha, 1e-13);
    first + second
}
