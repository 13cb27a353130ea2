//! Quantitative layer: the symmetric-matrix full-rank probability p(t-1), the
//! asymptotic count pi_k(x) of square-free integers with k prime factors, the
//! predicted density of certified members of the q = 7 (mod 8) family, and the
//! matching empirical range scan.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, quartic, sieve_primes, Factored, Sign};
use crate::descent::{legendre_matrix, legendre_matrix_of_primes};

/// Scan budget for `empirical_scan`.
pub const MAX_SCAN_X: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantError {
    /// log log x is undefined or the formula's range requirement fails.
    DomainError { x: f64, min: f64 },
    BudgetExceeded { x: u64, max: u64 },
}

impl fmt::Display for QuantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantError::DomainError { x, min } => write!(f, "x = {x} below the domain bound {min}"),
            QuantError::BudgetExceeded { x, max } => write!(f, "x = {x} above the scan budget {max}"),
        }
    }
}

impl std::error::Error for QuantError {}

/// An exact nonnegative rational with small terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u128,
    pub den: u128,
}

impl Rational {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Comparison of an empirical family count against the predicted asymptotic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub t: usize,
    pub x: u64,
    /// Members n <= x passing the rank condition, the residue hypothesis, and
    /// the quartic-symbol test (8-rank zero, hence certified non-congruent).
    pub empirical: u64,
    pub predicted: f64,
    pub ratio: f64,
    /// Seed recorded for reproducibility of any accompanying sampling.
    pub seed: u64,
}

/// Probability that the symbol matrix of t random primes has rank t - 1:
/// 1 for t = 1, and the product of (1 - 2^{-i}) over odd i <= t - 1 otherwise.
/// This is the chance that a random (t-1) x (t-1) symmetric matrix over F_2
/// is invertible.
pub fn p_rank_prob(t: usize) -> Rational {
    assert!(t >= 1, "t must be positive");
    assert!(t <= 22, "denominator would overflow u128");
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in (1..t).step_by(2) {
        num *= (1u128 << i) - 1;
        den <<= i;
    }
    Rational { num, den }
}

/// The asymptotic count of square-free n <= x with exactly k prime factors:
/// x / ln x for k = 1, and x (ln ln x)^{k-1} / ((k-1)! ln x) for k >= 2.
pub fn pi_k_asymptotic(x: f64, k: usize) -> Result<f64, QuantError> {
    assert!(k >= 1, "k must be positive");
    if x < 16.0 {
        return Err(QuantError::DomainError { x, min: 16.0 });
    }
    let log_x = x.ln();
    if k == 1 {
        return Ok(x / log_x);
    }
    let loglog_x = log_x.ln();
    let factorial: f64 = (1..k).map(|i| i as f64).product();
    Ok(x * loglog_x.powi(k as i32 - 1) / (factorial * log_x))
}

/// Predicted count of certified non-congruent members n <= x with t primes
/// = 5 (mod 8): pi_{t+1}(x) p(t-1) / 2^{2t+3}.
pub fn predicted_count(t: usize, x: f64) -> Result<f64, QuantError> {
    let scale = (1u64 << (2 * t + 3)) as f64;
    Ok(pi_k_asymptotic(x, t + 1)? * p_rank_prob(t).to_f64() / scale)
}

/// Exhaustively counts n = p_1 ... p_t q <= x with all p_i = 5 (mod 8) and
/// q = 7 (mod 8) that pass the rank condition, have every p_i a residue mod q,
/// and have quartic symbol (q/P)_4 = +1 (8-rank zero). Deterministic.
pub fn empirical_scan(t: usize, x: u64, seed: u64) -> Result<DensityReport, QuantError> {
    assert!(t >= 1);
    if x > MAX_SCAN_X {
        return Err(QuantError::BudgetExceeded { x, max: MAX_SCAN_X });
    }
    let primes = sieve_primes(x / 7);
    let class5: Vec<u64> = primes.iter().copied().filter(|p| p % 8 == 5).collect();
    let class7: Vec<u64> = primes.iter().copied().filter(|p| p % 8 == 7).collect();

    let mut empirical = 0u64;
    let mut chosen = Vec::with_capacity(t);
    scan_products(&class5, &class7, t, x, 0, 1, &mut chosen, &mut empirical);

    let predicted = predicted_count(t, x as f64)?;
    Ok(DensityReport {
        t,
        x,
        empirical,
        predicted,
        ratio: empirical as f64 / predicted,
        seed,
    })
}

/// Recursively chooses ascending primes = 5 (mod 8), then runs the q loop.
fn scan_products(
    class5: &[u64],
    class7: &[u64],
    remaining: usize,
    x: u64,
    start: usize,
    product: u64,
    chosen: &mut Vec<u64>,
    count: &mut u64,
) {
    if remaining == 0 {
        let p = Factored::from_primes(chosen.clone()).expect("distinct primes");
        if legendre_matrix(&p).rank() != chosen.len() - 1 {
            return;
        }
        for &q in class7 {
            if product.saturating_mul(q) > x {
                break;
            }
            // hypothesis (b): every p_i a residue mod q; then the quartic sign
            if chosen.iter().any(|&pi| legendre(pi as i128, q).unwrap() == Sign::Minus) {
                continue;
            }
            if quartic(q as i128, p.primes()).expect("residue checked") == Sign::Plus {
                *count += 1;
            }
        }
        return;
    }
    for (i, &pi) in class5.iter().enumerate().skip(start) {
        // need room for `remaining - 1` more primes and the smallest q = 7
        if product.saturating_mul(pi).saturating_mul(7) > x {
            break;
        }
        chosen.push(pi);
        scan_products(class5, class7, remaining - 1, x, i + 1, product * pi, chosen, count);
        chosen.pop();
    }
}

/// Monte-Carlo frequency of rank(A) = t - 1 over random sets of t distinct
/// primes = 5 (mod 8) below 10^5, seeded for reproducibility. The product of
/// the sampled primes is never formed, only their symbol matrix.
pub fn monte_carlo_rank_prob(t: usize, samples: usize, seed: u64) -> f64 {
    assert!(t >= 1);
    let pool: Vec<u64> = sieve_primes(100_000)
        .into_iter()
        .filter(|p| p % 8 == 5)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut picks: Vec<u64> = pool.choose_multiple(&mut rng, t).copied().collect();
        picks.sort_unstable();
        if legendre_matrix_of_primes(&picks).rank() == t - 1 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_probabilities() {
        assert_eq!(p_rank_prob(1), Rational { num: 1, den: 1 });
        assert_eq!(p_rank_prob(2), Rational { num: 1, den: 2 });
        assert_eq!(p_rank_prob(3), Rational { num: 1, den: 2 });
        assert_eq!(p_rank_prob(4), Rational { num: 7, den: 16 });
        assert_eq!(p_rank_prob(5), Rational { num: 7, den: 16 });
        assert_eq!(p_rank_prob(6), Rational { num: 7 * 31, den: 16 * 32 });
    }

    #[test]
    fn pi_k_values() {
        let x = 1e6;
        assert!((pi_k_asymptotic(x, 1).unwrap() - x / x.ln()).abs() < 1e-9);
        let expect = x * x.ln().ln() / x.ln();
        let got = pi_k_asymptotic(x, 2).unwrap();
        assert!((got - expect).abs() < 1e-6);
        assert!((got - 1.901e5).abs() < 1e3);
        assert!(pi_k_asymptotic(10.0, 1).is_err());
        for k in 1..6 {
            assert!(pi_k_asymptotic(1e4, k).unwrap() > 0.0);
        }
    }

    #[test]
    fn predicted_count_shape() {
        let p1 = predicted_count(1, 1e6).unwrap();
        assert!((p1 - pi_k_asymptotic(1e6, 2).unwrap() / 32.0).abs() < 1e-9);
        // monotone in x
        assert!(predicted_count(1, 2e6).unwrap() > p1);
        // t = 3 multiplies by p(2) = 1/2 and 1/2^9
        let p3 = predicted_count(3, 1e6).unwrap();
        let expect = pi_k_asymptotic(1e6, 4).unwrap() / 2.0 / 512.0;
        assert!((p3 - expect).abs() < 1e-9);
    }

    #[test]
    fn empirical_scan_small() {
        let report = empirical_scan(1, 100_000, 42).unwrap();
        assert!(report.empirical > 0);
        assert!(report.predicted > 0.0);
        // determinism
        let again = empirical_scan(1, 100_000, 42).unwrap();
        assert_eq!(report, again);
        assert!(empirical_scan(1, MAX_SCAN_X + 1, 0).is_err());
    }

    #[test]
    fn monte_carlo_matches_formula_roughly() {
        let p = monte_carlo_rank_prob(2, 400, 7);
        assert!((p - 0.5).abs() < 0.1, "got {p}");
    }
}
