//! Dirichlet characters mod q: group enumeration, conductors, Gauss sums,
//! the orthogonality identity over primitive characters, and the weighted
//! character average
//!
//! ```text
//! Δ(m,n) = Σ_q (W(q/Q)/φ(q)) Σ*_{χ mod q} χ(m) conj(χ(n))
//! ```
//!
//! where Σ* runs over primitive characters and W is supported on \[1,2\].
//!
//! Characters are stored as explicit value tables built from unit-group
//! generators (CRT over the prime-power parts of q; the 2-power part uses
//! the {-1, 5} generator pair).  Phases are tracked as exact rationals
//! num/den, so conductor and parity computations never compare floats.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::arith::{divisors, euler_phi, factorize, gcd, moebius};
use crate::error::{Error, Result};
use crate::special::SmoothWeight;

/// Enumeration ceiling for character groups.
pub const MODULUS_CEILING: u64 = 10_000;

/// One cyclic factor of the unit group mod a prime power.
#[derive(Debug, Clone)]
struct CyclicFactor {
    /// Modulus of the component this factor belongs to.
    component: u64,
    /// Order of the generator.
    order: u64,
    /// Discrete log of each residue mod `component` w.r.t. this generator
    /// (u32::MAX on non-units).
    dlog: Vec<u32>,
}

/// A Dirichlet character mod q with its value table and invariants.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: usize,
    values: Vec<Complex64>,
    /// Exact phase numerators: χ(a) = e(phase[a]/phase_den), u32::MAX off units.
    phase_num: Vec<u32>,
    phase_den: u64,
    conductor: u64,
    primitive: bool,
    parity: u8,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in the canonical (mixed-radix) enumeration of the group;
    /// index 0 is the principal character.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// Parity a ∈ {0, 1} with χ(-1) = (-1)^a.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// χ(n), zero when gcd(n, q) > 1.
    pub fn eval(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Pointwise complex conjugate (the inverse character).  The returned
    /// character keeps this one's `index`; look it up in its group by value
    /// table when the canonical position matters.
    pub fn conjugate(&self) -> DirichletCharacter {
        let mut c = self.clone();
        for v in &mut c.values {
            *v = v.conj();
        }
        for p in &mut c.phase_num {
            if *p != u32::MAX && *p != 0 {
                *p = (self.phase_den as u32) - *p;
            }
        }
        c
    }

    fn phase_is_trivial(&self, a: u64) -> bool {
        self.phase_num[(a % self.modulus) as usize] == 0
    }
}

/// All φ(q) characters mod q plus the generator data used to build them.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    characters: Vec<DirichletCharacter>,
    /// (generator residue mod q-component, order) pairs.
    generators: Vec<(u64, u64)>,
}

impl CharacterGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn primitive_characters(&self) -> impl Iterator<Item = &DirichletCharacter> {
        self.characters.iter().filter(|c| c.is_primitive())
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Smallest primitive root mod p (p odd prime).
fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors: Vec<u64> = factorize(p - 1).expect("p-1 >= 1").primes().collect();
    'cand: for g in 2..p {
        for &q in &factors {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root")
}

/// Generator of (Z/p^e)^* for odd p: a primitive root mod p lifted so that
/// g^{p-1} is not 1 mod p^2.
fn primitive_root_mod_pe(p: u64, pe: u64) -> u64 {
    let g = primitive_root_mod_p(p);
    if pe == p {
        return g;
    }
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// Cyclic factors of (Z/pe)^* with discrete-log tables.
fn component_factors(p: u64, e: u32) -> Vec<CyclicFactor> {
    let pe = p.pow(e);
    if p == 2 {
        match e {
            1 => vec![],
            2 => {
                // (Z/4)^* = <3>
                let mut dlog = vec![u32::MAX; 4];
                dlog[1] = 0;
                dlog[3] = 1;
                vec![CyclicFactor { component: 4, order: 2, dlog }]
            }
            _ => {
                // (Z/2^e)^* = <-1> x <5>
                let half = pe / 4;
                let mut dlog_sign = vec![u32::MAX; pe as usize];
                let mut dlog_five = vec![u32::MAX; pe as usize];
                for s in 0..2u64 {
                    let mut r = if s == 0 { 1 } else { pe - 1 };
                    for k in 0..half {
                        dlog_sign[r as usize] = s as u32;
                        dlog_five[r as usize] = k as u32;
                        r = r * 5 % pe;
                    }
                }
                vec![
                    CyclicFactor { component: pe, order: 2, dlog: dlog_sign },
                    CyclicFactor { component: pe, order: half, dlog: dlog_five },
                ]
            }
        }
    } else {
        let g = primitive_root_mod_pe(p, pe);
        let order = pe / p * (p - 1); // φ(p^e)
        let mut dlog = vec![u32::MAX; pe as usize];
        let mut r = 1u64;
        for k in 0..order {
            dlog[r as usize] = k as u32;
            r = r * g % pe;
        }
        vec![CyclicFactor { component: pe, order, dlog }]
    }
}

/// Build the full character group mod q (q ≤ 1e4).
pub fn character_group(q: u64) -> Result<CharacterGroup> {
    if q == 0 {
        return Err(Error::ZeroArgument);
    }
    if q > MODULUS_CEILING {
        return Err(Error::CeilingExceeded {
            what: "modulus q",
            got: q as f64,
            ceiling: MODULUS_CEILING as f64,
        });
    }

    let mut factors: Vec<CyclicFactor> = Vec::new();
    for &(p, e) in factorize(q)?.factors() {
        factors.extend(component_factors(p, e));
    }
    let orders: Vec<u64> = factors.iter().map(|f| f.order).collect();
    let phi_q: u64 = orders.iter().product::<u64>().max(1);
    debug_assert_eq!(phi_q, euler_phi(q));

    // common denominator for all phases
    let den = orders.iter().fold(1u64, |acc, &o| acc / gcd(acc, o) * o);

    // per-residue generator exponents; None marks non-units (the explicit
    // gcd test matters when a component contributes no cyclic factor, e.g.
    // the prime 2 exactly dividing q)
    let unit_exponents: Vec<Option<Vec<u64>>> = (0..q)
        .map(|a| {
            if gcd(a, q) != 1 {
                return None;
            }
            let mut exps = Vec::with_capacity(factors.len());
            for f in &factors {
                let r = (a % f.component) as usize;
                match f.dlog[r] {
                    u32::MAX => return None,
                    k => exps.push(k as u64),
                }
            }
            Some(exps)
        })
        .collect();

    let q_divisors = divisors(q);
    // residues a ≡ 1 (mod d) with gcd(a, q) = 1, per divisor of q
    let residues_one_mod: Vec<(u64, Vec<u64>)> = q_divisors
        .iter()
        .map(|&d| {
            let list: Vec<u64> = (0..q)
                .filter(|&a| a % d == 1 % d && unit_exponents[a as usize].is_some())
                .collect();
            (d, list)
        })
        .collect();

    let sin_cos_table: Vec<Complex64> = (0..den)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / den as f64))
        .collect();

    let mut characters = Vec::with_capacity(phi_q as usize);
    let mut tuple = vec![0u64; factors.len()];
    for index in 0..phi_q as usize {
        // phases for every residue
        let mut phase_num = vec![u32::MAX; q as usize];
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        for a in 0..q as usize {
            if let Some(exps) = &unit_exponents[a] {
                let mut num = 0u64;
                for (j, &e) in exps.iter().enumerate() {
                    num = (num + tuple[j] * e % den * (den / orders[j])) % den;
                }
                phase_num[a] = num as u32;
                values[a] = sin_cos_table[num as usize];
            }
        }
        if q == 1 {
            // the single character mod 1 is identically 1
            phase_num[0] = 0;
            values[0] = Complex64::new(1.0, 0.0);
        }

        let mut chi = DirichletCharacter {
            modulus: q,
            index,
            values,
            phase_num,
            phase_den: den,
            conductor: q,
            primitive: true,
            parity: 0,
        };

        // conductor: smallest divisor d of q such that chi is trivial on
        // every unit a ≡ 1 (mod d)
        for (d, residues) in &residues_one_mod {
            if residues.iter().all(|&a| chi.phase_is_trivial(a)) {
                chi.conductor = *d;
                break;
            }
        }
        chi.primitive = chi.conductor == q;
        chi.parity = if q > 2 && !chi.phase_is_trivial(q - 1) { 1 } else { 0 };

        characters.push(chi);

        // next mixed-radix tuple
        for j in 0..tuple.len() {
            tuple[j] += 1;
            if tuple[j] < orders[j] {
                break;
            }
            tuple[j] = 0;
        }
    }

    let generators = factors
        .iter()
        .map(|f| {
            // recover the generator residue: the one with dlog 1 (order 1 factors have none)
            let g = f
                .dlog
                .iter()
                .position(|&k| k == 1)
                .map(|r| r as u64)
                .unwrap_or(1);
            (g, f.order)
        })
        .collect();

    Ok(CharacterGroup { modulus: q, characters, generators })
}

/// Number of primitive characters mod q: Σ_{d|q} φ(d) μ(q/d).
pub fn primitive_character_count(q: u64) -> i64 {
    divisors(q)
        .into_iter()
        .map(|d| euler_phi(d) as i64 * moebius(q / d) as i64)
        .sum()
}

/// Both sides of the orthogonality identity for primitive characters:
/// enumerated Σ*_{χ mod q} χ(m) conj(χ(n)) against the divisor-sum formula
/// Σ_{d|q, d|(m-n)} φ(d) μ(q/d).
#[derive(Debug, Clone, Copy)]
pub struct OrthogonalityCheck {
    /// LHS by explicit enumeration of primitive characters.
    pub enumerated: Complex64,
    /// RHS divisor sum, an exact integer.
    pub formula: i64,
}

/// Requires gcd(mn, q) = 1.
pub fn orthogonality_check(q: u64, m: u64, n: u64) -> Result<OrthogonalityCheck> {
    if q == 0 {
        return Err(Error::ZeroArgument);
    }
    let group = character_group(q)?;
    orthogonality_check_in(&group, m, n)
}

/// Same identity against an already-built group (the exhaustive sweeps
/// build each group once and iterate pairs).
pub fn orthogonality_check_in(
    group: &CharacterGroup,
    m: u64,
    n: u64,
) -> Result<OrthogonalityCheck> {
    let q = group.modulus();
    if m == 0 || n == 0 {
        return Err(Error::ZeroArgument);
    }
    if gcd(m, q) != 1 || gcd(n, q) != 1 {
        return Err(Error::NotCoprime { m, n, q });
    }
    let mut lhs = Complex64::new(0.0, 0.0);
    for chi in group.primitive_characters() {
        lhs += chi.eval(m) * chi.eval(n).conj();
    }
    let diff = m.abs_diff(n);
    let rhs: i64 = divisors(q)
        .into_iter()
        .filter(|&d| diff.is_multiple_of(d))
        .map(|d| euler_phi(d) as i64 * moebius(q / d) as i64)
        .sum();
    Ok(OrthogonalityCheck { enumerated: lhs, formula: rhs })
}

/// Both sides of the totient-ratio identity
/// φ(d)/φ(cd) = (1/φ(c)) Σ_{a|c, a|d} μ(a)/a, as exact rationals.
pub fn phi_ratio_identity(c: u64, d: u64) -> (Rational64, Rational64) {
    let lhs = Rational64::new(euler_phi(d) as i64, euler_phi(c * d) as i64);
    let mut sum = Rational64::new(0, 1);
    for a in divisors(c) {
        if d.is_multiple_of(a) {
            sum += Rational64::new(moebius(a) as i64, a as i64);
        }
    }
    let rhs = sum / Rational64::new(euler_phi(c) as i64, 1);
    (lhs, rhs)
}

/// Gauss sum τ(χ) = Σ_{a mod q} χ(a) e^{2πi a/q}.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus();
    let mut tau = Complex64::new(0.0, 0.0);
    for a in 0..q {
        let v = chi.eval(a);
        if v.norm_sqr() > 0.0 {
            tau += v * Complex64::from_polar(1.0, TAU * a as f64 / q as f64);
        }
    }
    if q == 1 {
        tau = Complex64::new(1.0, 0.0);
    }
    tau
}

/// The weighted bilinear character average
/// Σ_q (W(q/Q)/φ(q)) Σ*_χ (Σ_m a_m χ(m)) conj(Σ_n b_n χ(n)),
/// q running over the integer support [Q, 2Q] of W.
///
/// The q-terms are computed in parallel and reduced in increasing-q order,
/// so results are bit-reproducible.
pub fn bilinear_character_sum(
    big_q: f64,
    w: &SmoothWeight,
    a_coeffs: &[(u64, Complex64)],
    b_coeffs: &[(u64, Complex64)],
) -> Result<Complex64> {
    if big_q < 2.0 {
        return Err(Error::CeilingExceeded {
            what: "Q (must be >= 2)",
            got: big_q,
            ceiling: f64::INFINITY,
        });
    }
    let q_hi = (2.0 * big_q).floor() as u64;
    if q_hi > MODULUS_CEILING {
        return Err(Error::CeilingExceeded {
            what: "2Q",
            got: q_hi as f64,
            ceiling: MODULUS_CEILING as f64,
        });
    }
    let q_lo = big_q.ceil() as u64;
    let mut terms: Vec<(u64, Complex64)> = (q_lo..=q_hi)
        .into_par_iter()
        .map(|q| {
            let weight = w.eval(q as f64 / big_q);
            if weight == 0.0 {
                return Ok((q, Complex64::new(0.0, 0.0)));
            }
            let group = character_group(q)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for chi in group.primitive_characters() {
                let mut a_sum = Complex64::new(0.0, 0.0);
                for &(m, coef) in a_coeffs {
                    a_sum += coef * chi.eval(m);
                }
                if a_sum.norm_sqr() == 0.0 {
                    continue;
                }
                let mut b_sum = Complex64::new(0.0, 0.0);
                for &(n, coef) in b_coeffs {
                    b_sum += coef * chi.eval(n);
                }
                acc += a_sum * b_sum.conj();
            }
            Ok((q, acc * (weight / euler_phi(q) as f64)))
        })
        .collect::<Result<Vec<_>>>()?;
    terms.sort_unstable_by_key(|&(q, _)| q);
    Ok(terms.into_iter().map(|(_, v)| v).sum())
}

/// Exact evaluation of Δ(m,n) = Σ_q (W(q/Q)/φ(q)) Σ*_χ χ(m) conj(χ(n)).
pub fn delta_exact(m: u64, n: u64, big_q: f64, w: &SmoothWeight) -> Result<Complex64> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroArgument);
    }
    let one = Complex64::new(1.0, 0.0);
    bilinear_character_sum(big_q, w, &[(m, one)], &[(n, one)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::default_weight;
    use approx::assert_abs_diff_eq;

    #[test]
    fn group_mod_1() {
        let g = character_group(1).unwrap();
        assert_eq!(g.len(), 1);
        let chi = &g.characters()[0];
        assert!(chi.is_primitive());
        assert_eq!(chi.conductor(), 1);
        assert_eq!(chi.eval(7), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn group_mod_5() {
        let g = character_group(5).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.primitive_characters().count(), 3);
        // one character of conductor 1 (the principal)
        assert_eq!(
            g.characters().iter().filter(|c| c.conductor() == 1).count(),
            1
        );
    }

    #[test]
    fn group_mod_8() {
        let g = character_group(8).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.primitive_characters().count(), 2);
        let mut conductors: Vec<u64> = g.characters().iter().map(|c| c.conductor()).collect();
        conductors.sort_unstable();
        assert_eq!(conductors, vec![1, 4, 8, 8]);
    }

    #[test]
    fn group_rejections() {
        assert!(character_group(0).is_err());
        assert!(character_group(MODULUS_CEILING + 1).is_err());
    }

    #[test]
    fn value_tables_are_multiplicative() {
        for q in [7u64, 12, 16, 45, 100] {
            let g = character_group(q).unwrap();
            assert_eq!(g.len() as u64, euler_phi(q));
            for chi in g.characters() {
                for m in 1..q {
                    for n in 1..q {
                        let lhs = chi.eval(m * n);
                        let rhs = chi.eval(m) * chi.eval(n);
                        assert!(
                            (lhs - rhs).norm() < 1e-12,
                            "q={q} chi={} m={m} n={n}",
                            chi.index()
                        );
                    }
                }
                assert_abs_diff_eq!(chi.eval(1).re, 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn tables_pairwise_distinct() {
        let g = character_group(45).unwrap();
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                let a = &g.characters()[i];
                let b = &g.characters()[j];
                let differ = (0..45u64).any(|n| (a.eval(n) - b.eval(n)).norm() > 1e-9);
                assert!(differ, "characters {i} and {j} coincide");
            }
        }
    }

    #[test]
    fn closed_under_conjugation() {
        let g = character_group(35).unwrap();
        for chi in g.characters() {
            let conj = chi.conjugate();
            let found = g.characters().iter().any(|other| {
                (0..35u64).all(|n| (other.eval(n) - conj.eval(n)).norm() < 1e-9)
            });
            assert!(found);
        }
    }

    #[test]
    fn parity_matches_eval_at_minus_one() {
        for q in [3u64, 4, 5, 8, 21] {
            let g = character_group(q).unwrap();
            for chi in g.characters() {
                let v = chi.eval(q - 1);
                let expect = if chi.parity() == 0 { 1.0 } else { -1.0 };
                assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        let c = orthogonality_check(5, 1, 1).unwrap();
        assert_eq!(c.formula, 3);
        assert_abs_diff_eq!(c.enumerated.re, 3.0, epsilon = 1e-10);

        let c = orthogonality_check(4, 3, 1).unwrap();
        assert_eq!(c.formula, -1);
        assert_abs_diff_eq!(c.enumerated.re, -1.0, epsilon = 1e-10);

        let c = orthogonality_check(3, 2, 2).unwrap();
        assert_eq!(c.formula, 1);
        assert_abs_diff_eq!(c.enumerated.re, 1.0, epsilon = 1e-10);

        assert!(orthogonality_check(6, 2, 1).is_err());
    }

    #[test]
    fn phi_ratio_examples() {
        let (l, r) = phi_ratio_identity(1, 7);
        assert_eq!(l, Rational64::new(1, 1));
        assert_eq!(l, r);

        let (l, r) = phi_ratio_identity(2, 2);
        assert_eq!(l, Rational64::new(1, 2));
        assert_eq!(l, r);

        let (l, r) = phi_ratio_identity(3, 2);
        assert_eq!(l, Rational64::new(1, 2));
        assert_eq!(l, r);
    }

    #[test]
    fn gauss_sum_magnitudes() {
        let g = character_group(1).unwrap();
        assert_abs_diff_eq!(gauss_sum(&g.characters()[0]).re, 1.0, epsilon = 1e-15);

        let g = character_group(4).unwrap();
        for chi in g.primitive_characters() {
            assert_abs_diff_eq!(gauss_sum(chi).norm(), 2.0, epsilon = 1e-10);
        }

        let g = character_group(5).unwrap();
        for chi in g.primitive_characters() {
            assert_abs_diff_eq!(gauss_sum(chi).norm(), 5f64.sqrt(), epsilon = 1e-10);
        }
    }

    #[test]
    fn delta_diagonal_positive_and_real() {
        let w = default_weight();
        let d = delta_exact(1, 1, 30.0, &w).unwrap();
        assert!(d.re > 0.0);
        assert!(d.im.abs() < 1e-9);
    }

    #[test]
    fn delta_cross_validates_against_divisor_formula() {
        let w = default_weight();
        let (m, n, big_q) = (2u64, 3u64, 50.0);
        let enumerated = delta_exact(m, n, big_q, &w).unwrap();
        let mut formula = 0.0;
        for q in 50..=100u64 {
            if gcd(m * n, q) != 1 {
                continue;
            }
            let weight = w.eval(q as f64 / big_q);
            if weight == 0.0 {
                continue;
            }
            let rhs: i64 = divisors(q)
                .into_iter()
                .filter(|&d| (n - m) % d == 0)
                .map(|d| euler_phi(d) as i64 * moebius(q / d) as i64)
                .sum();
            formula += weight / euler_phi(q) as f64 * rhs as f64;
        }
        assert_abs_diff_eq!(enumerated.re, formula, epsilon = 1e-9);
        assert_abs_diff_eq!(enumerated.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn delta_conjugate_symmetry() {
        let w = default_weight();
        for &(m, n) in &[(2u64, 3u64), (7, 11), (4, 9)] {
            let ab = delta_exact(m, n, 20.0, &w).unwrap();
            let ba = delta_exact(n, m, 20.0, &w).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-9);
        }
    }
}
