//! Critical-line evaluation of Dirichlet L-functions and zero statistics.
//!
//! L(s,χ) is evaluated through the Hurwitz decomposition
//! L(s,χ) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q) with ζ(s, a) computed by
//! Euler-Maclaurin, which is auditable at desk scale against the duplication
//! identity and the completed functional equation.  The Hardy rotation
//! Z(t) = e^{iθ(t)} L(1/2+it, χ) turns critical-line zeros into sign changes;
//! scans bracket them and bisection refines each ordinate to 1e-6.
//!
//! Missed zeros are disclosed, not excluded: every ledger records the
//! main-term count prediction next to what the scan found.

use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::als::{a_sum, g_n_weight, r_factor, singular_constant_cached, ComparisonReport};
use crate::arith::{euler_phi, gcd, CoefficientSystem};
use crate::characters::{character_group, gauss_sum, CharacterGroup, DirichletCharacter};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_panels;
use crate::special::SmoothWeight;

/// B_{2k}/(2k)! for k = 1..=10 (corrections through B_20).
const BERNOULLI_OVER_FACT: [f64; 10] = [
    8.333333333333333e-2,
    -1.388888888888889e-3,
    3.306878306878307e-5,
    -8.267195767195768e-7,
    2.08767569878681e-8,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.389680296322583e-13,
    8.586062056277845e-15,
    -2.1748686985580617e-16,
];

/// Height ceiling the evaluators are tuned for.
pub const HEIGHT_CEILING: f64 = 1000.0;

/// (e^w - 1)/w, extended by 1 at w = 0.
fn expm1_over(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..40 {
            sum += term;
            term *= w / (k as f64 + 1.0);
            if term.norm() < 1e-20 {
                break;
            }
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// ζ(s, a) - 1/(s-1): the Hurwitz zeta with its pole subtracted, entire
/// in s.  Euler-Maclaurin with max(24, 2|Im s|) direct terms and Bernoulli
/// corrections through B_20; absolute accuracy ~1e-10 for |Im s| ≤ 1000.
pub fn hurwitz_zeta_minus_pole(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::BadShift(a));
    }
    let n = (2.0 * s.im.abs()).ceil().max(24.0) as u64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let zn = n as f64 + a;
    let ln_zn = zn.ln();
    // tail integral minus the pole: (zn^{1-s} - 1)/(s-1), stable near s = 1
    let w = (1.0 - s) * ln_zn;
    sum -= ln_zn * expm1_over(w);
    // half-term
    sum += 0.5 * (-s * ln_zn).exp();
    // Bernoulli corrections: B_{2k}/(2k)! (s)_{2k-1} zn^{-s-2k+1}
    let mut poch = s; // (s)_1
    let mut zpow = (-(s + 1.0) * ln_zn).exp(); // zn^{-s-1}
    let zn2 = (-2.0 * ln_zn).exp(); // zn^{-2}
    for (k, &coeff) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += coeff * poch * zpow;
        let j = 2.0 * (k as f64 + 1.0);
        poch *= (s + (j - 1.0)) * (s + j);
        zpow *= zn2;
    }
    Ok(sum)
}

/// Hurwitz zeta ζ(s, a) for 0 < a ≤ 1, s ≠ 1.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(Error::PoleAtOne);
    }
    Ok(hurwitz_zeta_minus_pole(s, a)? + 1.0 / (s - 1.0))
}

/// L(s,χ) = q^{-s} Σ_{a=1}^q χ(a) ζ(s, a/q).
///
/// Valid for any character.  For non-principal χ the residue-class poles
/// cancel (Σ_a χ(a) = 0), so the sum runs over the pole-subtracted Hurwitz
/// values and s = 1 is fine; the principal character keeps its pole.
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    if chi.is_principal() {
        let row = hurwitz_row(s, q)?;
        Ok(l_from_row(s, chi, &row))
    } else {
        let row: Vec<Complex64> = (1..=q)
            .map(|a| hurwitz_zeta_minus_pole(s, a as f64 / q as f64))
            .collect::<Result<_>>()?;
        Ok(l_from_row(s, chi, &row))
    }
}

fn hurwitz_row(s: Complex64, q: u64) -> Result<Vec<Complex64>> {
    (1..=q)
        .map(|a| hurwitz_zeta(s, a as f64 / q as f64))
        .collect()
}

fn l_from_row(s: Complex64, chi: &DirichletCharacter, row: &[Complex64]) -> Complex64 {
    let q = chi.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        let v = chi.eval(a);
        if v.norm_sqr() > 0.0 {
            sum += v * row[(a - 1) as usize];
        }
    }
    (-s * (q as f64).ln()).exp() * sum
}

/// Lanczos (g = 7) log-gamma, valid for Re z > 0; the imaginary part is
/// continuous along vertical lines, which keeps the Hardy rotation free of
/// spurious sign flips.
pub fn lgamma_complex(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    let mut a = Complex64::new(C[0], 0.0);
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (z + (i as f64 - 1.0));
    }
    let t = z + (G - 0.5);
    0.5 * (TAU).ln() + (z - 0.5) * t.ln() - t + a.ln()
}

/// Root number ε_χ = τ(χ) / (i^a √q) of a primitive character.
pub fn root_number(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus() as f64;
    let ia = Complex64::new(0.0, 1.0).powu(chi.parity() as u32);
    gauss_sum(chi) / (ia * q.sqrt())
}

/// Completed L-function Λ(s,χ) = (q/π)^{(s+a)/2} Γ((s+a)/2) L(s,χ),
/// satisfying Λ(s,χ) = ε_χ conj(Λ(1-conj(s), χ)).
pub fn completed_l(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus() as f64;
    let a = chi.parity() as f64;
    let z = (s + a) / 2.0;
    let factor = (z * (q / PI).ln() + lgamma_complex(z)).exp();
    Ok(factor * dirichlet_l(s, chi)?)
}

/// Per-character rotation data for the Hardy Z-function.
#[derive(Debug, Clone, Copy)]
struct Rotor {
    half_log_q_over_pi: f64,
    gamma_re: f64,
    eps_arg_half: f64,
}

impl Rotor {
    fn new(chi: &DirichletCharacter) -> Result<Rotor> {
        if !chi.is_primitive() {
            return Err(Error::NotPrimitive {
                q: chi.modulus(),
                index: chi.index(),
            });
        }
        Ok(Rotor {
            half_log_q_over_pi: 0.5 * (chi.modulus() as f64 / PI).ln(),
            gamma_re: (0.5 + chi.parity() as f64) / 2.0,
            eps_arg_half: 0.5 * root_number(chi).arg(),
        })
    }

    fn theta(&self, t: f64) -> f64 {
        t * self.half_log_q_over_pi
            + lgamma_complex(Complex64::new(self.gamma_re, 0.5 * t)).im
            - self.eps_arg_half
    }

    fn rotate(&self, t: f64, l: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(t)) * l
    }
}

/// Z(t) = e^{iθ(t)} L(1/2+it, χ) before taking the real part; the imaginary
/// part is the rotation residual (≤ 1e-8 in the supported range).
pub fn hardy_z_rotated(t: f64, chi: &DirichletCharacter) -> Result<Complex64> {
    let rotor = Rotor::new(chi)?;
    let s = Complex64::new(0.5, t);
    Ok(rotor.rotate(t, dirichlet_l(s, chi)?))
}

/// The real-valued Hardy Z-function; |Z(t)| = |L(1/2+it, χ)| and
/// critical-line zeros are sign changes.
pub fn hardy_z(t: f64, chi: &DirichletCharacter) -> Result<f64> {
    Ok(hardy_z_rotated(t, chi)?.re)
}

/// A refined critical-line ordinate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Zero {
    pub gamma: f64,
    pub halfwidth: f64,
}

/// Ordered critical-line ordinates for one character with the scan window
/// and the main-term count prediction.  Serialized field order is part of
/// the file contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroLedger {
    pub q: u64,
    pub chi_index: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub zeros: Vec<Zero>,
    pub expected_count: f64,
}

impl ZeroLedger {
    pub fn ordinates(&self) -> impl Iterator<Item = f64> + '_ {
        self.zeros.iter().map(|z| z.gamma)
    }
}

/// Main-term zero count for the window: F(t_max) - F(t_min) with
/// F(t) = sign(t) (|t|/2π) log(q|t|/(2πe)) and F(0) = 0.  The constant-order
/// choice (no arg-ε term) is a documented convention, not a sharp count.
pub fn expected_zero_count(q: u64, t_min: f64, t_max: f64) -> f64 {
    let f = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let x = t.abs();
        t.signum() * x / TAU * (q as f64 * x / (TAU * E)).ln()
    };
    f(t_max) - f(t_min)
}

const STEP_CEILING: f64 = 0.05;
const REFINE_HALFWIDTH: f64 = 1e-6;

/// Scan [t_min, t_max] for sign changes of Z and refine each bracket by
/// bisection to half-width 1e-6.  Requires a primitive χ, step ≤ 0.05 and a
/// window of width ≤ 1000 inside |t| ≤ 1000.
pub fn scan_zeros(
    chi: &DirichletCharacter,
    t_min: f64,
    t_max: f64,
    step: f64,
) -> Result<ZeroLedger> {
    let chars = [chi];
    let mut ledgers = scan_many(chi.modulus(), &chars, t_min, t_max, step)?;
    Ok(ledgers.pop().expect("one ledger per scanned character"))
}

/// Scan all primitive characters mod q at once; the Hurwitz row at each grid
/// point is shared across characters.  Ledgers come back in character-index
/// order.
pub fn scan_zeros_group(
    group: &CharacterGroup,
    t_min: f64,
    t_max: f64,
    step: f64,
) -> Result<Vec<ZeroLedger>> {
    let prims: Vec<&DirichletCharacter> = group.primitive_characters().collect();
    scan_many(group.modulus(), &prims, t_min, t_max, step)
}

fn scan_many(
    q: u64,
    chars: &[&DirichletCharacter],
    t_min: f64,
    t_max: f64,
    step: f64,
) -> Result<Vec<ZeroLedger>> {
    if !(step > 0.0 && step <= STEP_CEILING) {
        return Err(Error::CeilingExceeded {
            what: "scan step",
            got: step,
            ceiling: STEP_CEILING,
        });
    }
    if t_max < t_min || t_max - t_min > HEIGHT_CEILING {
        return Err(Error::CeilingExceeded {
            what: "window width",
            got: t_max - t_min,
            ceiling: HEIGHT_CEILING,
        });
    }
    if t_min.abs() > HEIGHT_CEILING || t_max.abs() > HEIGHT_CEILING {
        return Err(Error::CeilingExceeded {
            what: "|t|",
            got: t_min.abs().max(t_max.abs()),
            ceiling: HEIGHT_CEILING,
        });
    }
    let rotors: Vec<Rotor> = chars.iter().map(|c| Rotor::new(c)).collect::<Result<_>>()?;

    let nsteps = ((t_max - t_min) / step).ceil() as usize;
    let mut grid = Vec::with_capacity(nsteps + 1);
    for i in 0..=nsteps {
        grid.push((t_min + i as f64 * step).min(t_max));
    }

    let mut prev: Vec<f64> = Vec::with_capacity(chars.len());
    let mut zeros: Vec<Vec<Zero>> = vec![Vec::new(); chars.len()];
    for (i, &t) in grid.iter().enumerate() {
        let s = Complex64::new(0.5, t);
        let row = hurwitz_row(s, q)?;
        for (j, (&chi, rotor)) in chars.iter().zip(&rotors).enumerate() {
            let z = rotor.rotate(t, l_from_row(s, chi, &row)).re;
            if i > 0 {
                let z0 = prev[j];
                let t0 = grid[i - 1];
                if z0 == 0.0 {
                    zeros[j].push(Zero { gamma: t0, halfwidth: 0.0 });
                } else if z0 * z < 0.0 {
                    zeros[j].push(refine(chi, &rotors[j], t0, t, z0)?);
                }
                if i == grid.len() - 1 && z == 0.0 {
                    zeros[j].push(Zero { gamma: t, halfwidth: 0.0 });
                }
                prev[j] = z;
            } else {
                prev.push(z);
            }
        }
    }

    Ok(chars
        .iter()
        .zip(zeros)
        .map(|(chi, zs)| ZeroLedger {
            q,
            chi_index: chi.index(),
            t_min,
            t_max,
            zeros: zs,
            expected_count: expected_zero_count(q, t_min, t_max),
        })
        .collect())
}

fn refine(
    chi: &DirichletCharacter,
    rotor: &Rotor,
    mut lo: f64,
    mut hi: f64,
    z_lo: f64,
) -> Result<Zero> {
    let sign_lo = z_lo.signum();
    while hi - lo > 2.0 * REFINE_HALFWIDTH {
        let mid = 0.5 * (lo + hi);
        let s = Complex64::new(0.5, mid);
        let z = rotor.rotate(mid, dirichlet_l(s, chi)?).re;
        if z == 0.0 {
            return Ok(Zero { gamma: mid, halfwidth: 0.0 });
        }
        if z.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Zero {
        gamma: 0.5 * (lo + hi),
        halfwidth: 0.5 * (hi - lo),
    })
}

/// How consecutive-gap lengths are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Multiply by d·log q / 2π (the reciprocal of the global average
    /// spacing at height ~1 for modulus q and degree d).
    GlobalAverage { degree: u32 },
    /// Multiply by the local density log(q(|t|+3)/2π)/2π at the gap midpoint.
    LocalDensity,
}

/// Normalized consecutive gaps plus summary statistics.
#[derive(Debug, Clone)]
pub struct GapStatistics {
    pub normalized: Vec<f64>,
    pub mode: Normalization,
    pub minimum: f64,
    pub mean: f64,
}

fn normalized_gaps(ledger: &ZeroLedger, mode: Normalization, out: &mut Vec<f64>) {
    let q = ledger.q as f64;
    for pair in ledger.zeros.windows(2) {
        let raw = pair[1].gamma - pair[0].gamma;
        let factor = match mode {
            Normalization::GlobalAverage { degree } => degree as f64 * q.ln() / TAU,
            Normalization::LocalDensity => {
                let mid = 0.5 * (pair[0].gamma + pair[1].gamma);
                (q * (mid.abs() + 3.0) / TAU).ln() / TAU
            }
        };
        out.push(raw * factor);
    }
}

/// Consecutive-gap statistics for one ledger.
pub fn gap_statistics(ledger: &ZeroLedger, mode: Normalization) -> Result<GapStatistics> {
    if ledger.zeros.len() < 2 {
        return Err(Error::TooFewOrdinates {
            need: 2,
            got: ledger.zeros.len(),
        });
    }
    let mut normalized = Vec::with_capacity(ledger.zeros.len() - 1);
    normalized_gaps(ledger, mode, &mut normalized);
    summarize(normalized, mode)
}

/// Gap statistics pooled across several ledgers (gaps never straddle
/// ledgers).
pub fn aggregate_gap_statistics(
    ledgers: &[ZeroLedger],
    mode: Normalization,
) -> Result<GapStatistics> {
    let mut normalized = Vec::new();
    for ledger in ledgers {
        normalized_gaps(ledger, mode, &mut normalized);
    }
    if normalized.is_empty() {
        return Err(Error::TooFewOrdinates { need: 2, got: 0 });
    }
    summarize(normalized, mode)
}

fn summarize(normalized: Vec<f64>, mode: Normalization) -> Result<GapStatistics> {
    let minimum = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = normalized.iter().sum::<f64>() / normalized.len() as f64;
    Ok(GapStatistics { normalized, mode, minimum, mean })
}

const M_BIG_Q_CEILING: f64 = 60.0;
const M_X_CEILING: f64 = 1000.0;
const M_ALPHA_CEILING: f64 = 0.5;

/// |H_X(1/2+it, χ)|² for the mollifier H_X(s,χ) = Σ_{n≤X} μ_f(n)χ(n)n^{-s},
/// as a function of t, with the coefficient table precomputed.
struct MollifierSq {
    coeffs: Vec<(f64, Complex64)>, // (log n, μ_f(n)χ(n)/√n)
}

impl MollifierSq {
    fn new(x: f64, chi: &DirichletCharacter, cs: &CoefficientSystem) -> Self {
        let top = x.floor().max(1.0) as u64;
        let mut coeffs = Vec::new();
        for n in 1..=top {
            let c = cs.mu(n) * chi.eval(n);
            if c.norm_sqr() > 0.0 {
                coeffs.push(((n as f64).ln(), c / (n as f64).sqrt()));
            }
        }
        MollifierSq { coeffs }
    }

    fn eval(&self, t: f64) -> f64 {
        let mut h = Complex64::new(0.0, 0.0);
        for &(ln_n, c) in &self.coeffs {
            h += c * Complex64::from_polar(1.0, -t * ln_n);
        }
        h.norm_sqr()
    }

    /// ∫_lo^hi |H|² dt by Gauss-Legendre panels, doubling until two
    /// consecutive panel counts agree to 1e-8.
    fn integrate(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let f = |t: f64| self.eval(t);
        let mut panels = 2;
        let mut prev = gauss_legendre_panels(&f, lo, hi, panels, 24);
        loop {
            panels *= 2;
            let next = gauss_legendre_panels(&f, lo, hi, panels, 24);
            if (next - prev).abs() <= 1e-8 || panels >= 64 {
                return next;
            }
            prev = next;
        }
    }
}

/// Exact mean
/// 𝓜 = Σ_{(q,N)=1} (W(q/Q)/φ(q)) Σ*_χ ∫_0^1 |H_X(1/2+it,χ)|² dt
/// by character enumeration and t-quadrature, compared to the diagonal main
/// term c · Ŵ(1) · r(N) · Q · A(X, g_N) (the A-sum playing the role of
/// c_f c_{f,g_N} log X; at X = 1 it degenerates to the primitive-character
/// count identity and the asymptotic comparison is moot).
///
/// Cost grows like Σ_q (#primitive χ mod q) · X ≈ Q · φ(q) · X over
/// q ∈ [Q, 2Q], all of it parallel over q.
pub fn exact_m(
    big_q: f64,
    x: f64,
    w: &SmoothWeight,
    cs: &CoefficientSystem,
) -> Result<ComparisonReport> {
    check_m_ceilings(big_q, x)?;
    let exact = m_integrals(big_q, x, w, cs, None)?;
    let level = cs.level();
    let g_n = g_n_weight(level);
    let a_x = a_sum(x, &g_n, cs, Complex64::new(0.0, 0.0)).re;
    let main =
        singular_constant_cached() * w.mellin_at_1() * r_factor(level) * big_q * a_x;
    Ok(ComparisonReport::new(
        Complex64::new(exact, 0.0),
        Complex64::new(main, 0.0),
        vec![
            ("Q", format!("{big_q}")),
            ("X", format!("{x}")),
            ("N", level.to_string()),
        ],
    ))
}

/// Exact zero-window mean
/// 𝓜(α) = Σ_{(q,N)=1} (W(q/Q)/φ(q)) Σ*_χ Σ_{0≤γ<1}
///          ∫_{max(0,γ-α)}^{min(1,γ+α)} |H_X(1/2+it,χ)|² dt,
/// windows of distinct zeros overlapping freely (no union is taken).
pub fn exact_m_alpha(
    big_q: f64,
    x: f64,
    alpha: f64,
    w: &SmoothWeight,
    cs: &CoefficientSystem,
) -> Result<f64> {
    check_m_ceilings(big_q, x)?;
    if !(0.0..=M_ALPHA_CEILING).contains(&alpha) {
        return Err(Error::CeilingExceeded {
            what: "alpha",
            got: alpha,
            ceiling: M_ALPHA_CEILING,
        });
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    m_integrals(big_q, x, w, cs, Some(alpha))
}

fn check_m_ceilings(big_q: f64, x: f64) -> Result<()> {
    if !(2.0..=M_BIG_Q_CEILING).contains(&big_q) {
        return Err(Error::CeilingExceeded {
            what: "Q",
            got: big_q,
            ceiling: M_BIG_Q_CEILING,
        });
    }
    if !(1.0..=M_X_CEILING).contains(&x) {
        return Err(Error::CeilingExceeded {
            what: "X",
            got: x,
            ceiling: M_X_CEILING,
        });
    }
    Ok(())
}

/// Shared driver: with `alpha = None` integrate over [0,1] per character;
/// with `Some(α)` scan each character's zeros on \[0,1) and integrate the
/// clipped windows.
fn m_integrals(
    big_q: f64,
    x: f64,
    w: &SmoothWeight,
    cs: &CoefficientSystem,
    alpha: Option<f64>,
) -> Result<f64> {
    let level = cs.level();
    let q_lo = big_q.ceil() as u64;
    let q_hi = (2.0 * big_q).floor() as u64;
    let mut terms: Vec<(u64, f64)> = (q_lo..=q_hi)
        .into_par_iter()
        .map(|q| -> Result<(u64, f64)> {
            if gcd(q, level) != 1 {
                return Ok((q, 0.0));
            }
            let weight = w.eval(q as f64 / big_q);
            if weight == 0.0 {
                return Ok((q, 0.0));
            }
            let group = character_group(q)?;
            let mut acc = 0.0;
            match alpha {
                None => {
                    for chi in group.primitive_characters() {
                        let h = MollifierSq::new(x, chi, cs);
                        acc += h.integrate(0.0, 1.0);
                    }
                }
                Some(alpha) => {
                    let ledgers = scan_zeros_group(&group, 0.0, 1.0, 0.01)?;
                    for (chi, ledger) in group.primitive_characters().zip(&ledgers) {
                        debug_assert_eq!(chi.index(), ledger.chi_index);
                        let h = MollifierSq::new(x, chi, cs);
                        for z in &ledger.zeros {
                            if z.gamma < 1.0 {
                                let lo = (z.gamma - alpha).max(0.0);
                                let hi = (z.gamma + alpha).min(1.0);
                                acc += h.integrate(lo, hi);
                            }
                        }
                    }
                }
            }
            Ok((q, weight / euler_phi(q) as f64 * acc))
        })
        .collect::<Result<Vec<_>>>()?;
    terms.sort_unstable_by_key(|&(q, _)| q);
    Ok(terms.into_iter().map(|(_, v)| v).sum())
}
