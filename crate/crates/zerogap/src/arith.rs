//! Integer arithmetic and multiplicative functions.
//!
//! Everything else in the crate sits on top of this module: deterministic
//! factorization, the Möbius function μ, Euler's totient φ, von Mangoldt Λ,
//! and the pluggable coefficient interface for an L-function of degree `d`
//! and level `N` (the shipped instance is the Riemann zeta function, where
//! λ(n) = 1, μ_f = μ and Λ_f = Λ).

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Trial division uses a cached sieve of primes up to this bound; beyond it
/// factorization falls back to Miller-Rabin plus Brent's rho.
pub const SIEVE_LIMIT: u64 = 1_000_000;

static SMALL_PRIMES: OnceLock<Vec<u64>> = OnceLock::new();

/// Primes up to [`SIEVE_LIMIT`], sieved once and cached.
pub fn small_primes() -> &'static [u64] {
    SMALL_PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// A positive integer together with its prime factorization,
/// primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs in increasing prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct prime divisors, increasing.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn num_prime_factors(&self) -> usize {
        self.factors.len()
    }

    /// All divisors of `n`, sorted increasing.
    pub fn divisors(&self) -> Vec<u64> {
        let mut ds = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = ds.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                ds.extend(prev.iter().map(|d| d * pe));
            }
        }
        ds.sort_unstable();
        ds
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (fixed witness set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be odd composite with no factor
/// found by the sieve.
fn brent_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 22 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Factor `n` deterministically.  Errors on `n = 0`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rem = n;
    for &p in small_primes() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0u32;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rem > 1 {
        // Cofactor has no prime factor <= 1e6; split what is left.
        let mut stack = vec![rem];
        let mut big: Vec<u64> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime(m) {
                big.push(m);
            } else {
                let d = brent_rho(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        big.sort_unstable();
        let mut i = 0;
        while i < big.len() {
            let p = big[i];
            let mut e = 0u32;
            while i < big.len() && big[i] == p {
                e += 1;
                i += 1;
            }
            factors.push((p, e));
        }
    }
    factors.sort_unstable();
    Ok(Factorization { n, factors })
}

/// Möbius function: 0 unless squarefree, otherwise (-1)^(number of primes).
pub fn moebius(n: u64) -> i32 {
    let f = factorize(n).expect("n >= 1");
    if !f.is_squarefree() {
        0
    } else if f.num_prime_factors().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let f = factorize(n).expect("n >= 1");
    let mut phi = n;
    for p in f.primes() {
        phi = phi / p * (p - 1);
    }
    phi
}

/// von Mangoldt: log p on prime powers p^k, 0 elsewhere.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let f = factorize(n).expect("n >= 2");
    if f.num_prime_factors() == 1 {
        (f.factors()[0].0 as f64).ln()
    } else {
        0.0
    }
}

/// All divisors of `n`, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    factorize(n).expect("n >= 1").divisors()
}

/// Coefficient streams of an L-function of degree `d` and level `N`:
/// the Dirichlet coefficients λ(n), their Dirichlet inverse μ_f(n), and the
/// logarithmic-derivative coefficients Λ_f(n).
///
/// User-supplied systems are validated against the convolution identities
/// (Σ_{ab=n} λ(a)μ_f(b) = [n=1] and μ_f ∗ (λ·log) = Λ_f, the latter
/// reducing to μ_f ∗ log in degree 1) up to a caller-chosen bound before
/// use; nothing deeper than the convolutions is checked.
#[derive(Clone)]
pub struct CoefficientSystem {
    degree: u32,
    level: u64,
    lambda: Arc<dyn Fn(u64) -> Complex64 + Send + Sync>,
    mu: Arc<dyn Fn(u64) -> Complex64 + Send + Sync>,
    von_mangoldt: Arc<dyn Fn(u64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for CoefficientSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSystem")
            .field("degree", &self.degree)
            .field("level", &self.level)
            .finish_non_exhaustive()
    }
}

impl CoefficientSystem {
    /// The shipped instance: λ(n) = 1 for all n, μ_f = μ, Λ_f = Λ
    /// (degree 1, level 1).
    pub fn zeta() -> Self {
        CoefficientSystem {
            degree: 1,
            level: 1,
            lambda: Arc::new(|_| Complex64::new(1.0, 0.0)),
            mu: Arc::new(|n| Complex64::new(moebius(n) as f64, 0.0)),
            von_mangoldt: Arc::new(|n| Complex64::new(von_mangoldt(n), 0.0)),
        }
    }

    /// Wrap user-supplied streams, validating the convolution identities for
    /// all n ≤ `validate_to` (tolerance 1e-9) plus the support constraints
    /// μ_f(p^a) = 0 for a > d and Λ_f supported on prime powers.
    pub fn new<L, M, V>(
        degree: u32,
        level: u64,
        lambda: L,
        mu: M,
        von_mangoldt: V,
        validate_to: u64,
    ) -> Result<Self>
    where
        L: Fn(u64) -> Complex64 + Send + Sync + 'static,
        M: Fn(u64) -> Complex64 + Send + Sync + 'static,
        V: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        let cs = CoefficientSystem {
            degree,
            level,
            lambda: Arc::new(lambda),
            mu: Arc::new(mu),
            von_mangoldt: Arc::new(von_mangoldt),
        };
        cs.validate(validate_to)?;
        Ok(cs)
    }

    fn validate(&self, x: u64) -> Result<()> {
        const TOL: f64 = 1e-9;
        for n in 1..=x {
            let mut inv = Complex64::new(0.0, 0.0);
            let mut conv = Complex64::new(0.0, 0.0);
            for a in divisors(n) {
                let b = n / a;
                inv += self.lambda(a) * self.mu(b);
                // -L'/L = (1/L)(-L'): Λ_f = μ_f ∗ (λ_f·log), which is
                // μ_f ∗ log exactly when λ ≡ 1 (degree 1)
                conv += self.mu(a) * self.lambda(b) * (b as f64).ln();
            }
            let target = if n == 1 { 1.0 } else { 0.0 };
            let r1 = (inv - target).norm();
            if r1 > TOL {
                return Err(Error::BadCoefficientSystem {
                    identity: "lambda * mu = [n=1]",
                    n,
                    residual: r1,
                });
            }
            let r2 = (conv - self.von_mangoldt(n)).norm();
            if r2 > TOL {
                return Err(Error::BadCoefficientSystem {
                    identity: "mu * (lambda log) = vonMangoldt",
                    n,
                    residual: r2,
                });
            }
            let f = factorize(n)?;
            if f.num_prime_factors() == 1 {
                let e = f.factors()[0].1;
                if e > self.degree && self.mu(n).norm() > TOL {
                    return Err(Error::BadCoefficientSystem {
                        identity: "mu(p^a) = 0 for a > degree",
                        n,
                        residual: self.mu(n).norm(),
                    });
                }
            } else if n > 1 && self.von_mangoldt(n).norm() > TOL {
                return Err(Error::BadCoefficientSystem {
                    identity: "vonMangoldt supported on prime powers",
                    n,
                    residual: self.von_mangoldt(n).norm(),
                });
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn lambda(&self, n: u64) -> Complex64 {
        (self.lambda)(n)
    }

    pub fn mu(&self, n: u64) -> Complex64 {
        (self.mu)(n)
    }

    pub fn von_mangoldt(&self, n: u64) -> Complex64 {
        (self.von_mangoldt)(n)
    }
}

/// The shipped ζ coefficient system.
pub fn zeta_coefficient_system() -> CoefficientSystem {
    CoefficientSystem::zeta()
}

/// Σ_{p≤x} |λ(p)|² (log p)/p − log x.
///
/// For a system with the expected Mertens-type prime sum this stays in a
/// bounded interval as x grows; for ζ it lies in [−2, 1] for all x ≤ 1e6.
pub fn mertens_residual(x: f64, cs: &CoefficientSystem) -> f64 {
    let mut sum = 0.0;
    for &p in primes_up_to(x.floor() as u64).iter() {
        let lam = cs.lambda(p).norm_sqr();
        sum += lam * (p as f64).ln() / p as f64;
    }
    sum - x.ln()
}

/// A multiplicative weight determined by its values on primes:
/// g(n) = Π_{p|n} g(p), so g depends only on the radical of n and g(1) = 1.
#[derive(Clone)]
pub struct MultiplicativeWeight {
    on_prime: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl fmt::Debug for MultiplicativeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeWeight").finish_non_exhaustive()
    }
}

impl MultiplicativeWeight {
    pub fn from_prime_fn<F>(f: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        MultiplicativeWeight { on_prime: Arc::new(f) }
    }

    /// The trivial weight g ≡ 1.
    pub fn one() -> Self {
        Self::from_prime_fn(|_| 1.0)
    }

    pub fn on_prime(&self, p: u64) -> f64 {
        (self.on_prime)(p)
    }

    pub fn eval(&self, n: u64) -> f64 {
        let f = factorize(n).expect("n >= 1");
        f.primes().map(|p| (self.on_prime)(p)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn factorize_units_and_small() {
        assert!(factorize(0).is_err());
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
    }

    #[test]
    fn factorize_large_semiprimes() {
        // 600851475143 = 71 * 839 * 1471 * 6857 (checked below by an
        // independent trial-division oracle).
        let f = factorize(600_851_475_143).unwrap();
        assert_eq!(f.factors(), &[(71, 1), (839, 1), (1471, 1), (6857, 1)]);

        let mut n = 600_851_475_143u64;
        let mut oracle = Vec::new();
        let mut p = 2u64;
        while p * p <= n {
            while n.is_multiple_of(p) {
                oracle.push(p);
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            oracle.push(n);
        }
        assert_eq!(oracle, vec![71, 839, 1471, 6857]);

        // product of two 6-digit primes exercises the rho path
        let big = 999_983u64 * 999_979u64;
        let f = factorize(big).unwrap();
        assert_eq!(f.factors(), &[(999_979, 1), (999_983, 1)]);
    }

    #[test]
    fn factorization_invariants() {
        for n in 1..=3000u64 {
            let f = factorize(n).unwrap();
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn moebius_and_phi_against_naive_oracles() {
        // per-definition oracles on a modest range; the full 1e5 sweep lives
        // in the property suite
        for n in 1..=2000u64 {
            let naive_phi = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), naive_phi, "phi({n})");

            let mut m = n;
            let mut square = false;
            let mut count = 0;
            let mut p = 2;
            while p * p <= m {
                if m % p == 0 {
                    let mut e = 0;
                    while m % p == 0 {
                        m /= p;
                        e += 1;
                    }
                    if e > 1 {
                        square = true;
                    }
                    count += 1;
                }
                p += 1;
            }
            if m > 1 {
                count += 1;
            }
            let naive_mu = if square { 0 } else if count % 2 == 0 { 1 } else { -1 };
            assert_eq!(moebius(n), naive_mu, "mu({n})");
        }
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(10), 4);
        assert_eq!(euler_phi(5040), 1152);
    }

    #[test]
    fn zeta_system_coefficients() {
        let cs = zeta_coefficient_system();
        assert_eq!(cs.degree(), 1);
        assert_eq!(cs.level(), 1);
        assert_eq!(cs.lambda(7).re, 1.0);
        assert_eq!(cs.mu(30).re, -1.0);
        assert_abs_diff_eq!(cs.von_mangoldt(8).re, 2f64.ln(), epsilon = 1e-15);
        assert_eq!(cs.von_mangoldt(6).re, 0.0);
    }

    #[test]
    fn zeta_system_validates() {
        let cs = CoefficientSystem::new(
            1,
            1,
            |_| Complex64::new(1.0, 0.0),
            |n| Complex64::new(moebius(n) as f64, 0.0),
            |n| Complex64::new(von_mangoldt(n), 0.0),
            500,
        );
        assert!(cs.is_ok());
    }

    #[test]
    fn bad_system_rejected() {
        let cs = CoefficientSystem::new(
            1,
            1,
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(1.0, 0.0), // not the Dirichlet inverse
            |n| Complex64::new(von_mangoldt(n), 0.0),
            50,
        );
        assert!(matches!(cs, Err(Error::BadCoefficientSystem { .. })));
    }

    #[test]
    fn mertens_residual_small_values() {
        let cs = zeta_coefficient_system();
        let two: f64 = 2.0;
        assert_abs_diff_eq!(
            mertens_residual(2.0, &cs),
            two.ln() / 2.0 - two.ln(),
            epsilon = 1e-14
        );
        let expected = 2f64.ln() / 2.0 + 3f64.ln() / 3.0 + 5f64.ln() / 5.0 + 7f64.ln() / 7.0
            - 10f64.ln();
        assert_abs_diff_eq!(mertens_residual(10.0, &cs), expected, epsilon = 1e-14);
    }

    #[test]
    fn multiplicative_weight_eval() {
        let g = MultiplicativeWeight::from_prime_fn(|p| 1.0 + 1.0 / p as f64);
        assert_eq!(g.eval(1), 1.0);
        assert_abs_diff_eq!(g.eval(12), (1.5) * (1.0 + 1.0 / 3.0), epsilon = 1e-15);
        // depends only on the radical
        assert_abs_diff_eq!(g.eval(8), g.eval(2), epsilon = 1e-15);
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }
}
