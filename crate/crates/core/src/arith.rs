//! Exact integer number theory primitives: deterministic primality, square-free
//! factorization, and the residue symbols (Legendre, Jacobi, quartic, Hilbert)
//! used by every other module.
//!
//! All inputs are capped at 63 bits; intermediate products go through `u128`/`i128`
//! so nothing here needs arbitrary precision.

use std::fmt;

/// Largest `n` accepted anywhere (so that `-n` always fits in `i64`).
pub const MAX_N: u64 = i64::MAX as u64;

/// Iteration budget for the rho factorization loop before giving up.
const RHO_BUDGET: u64 = 1 << 26;

/// Trial division covers all factors below this bound before rho starts.
const TRIAL_BOUND: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Input was even where an odd integer is required.
    EvenInput(u64),
    /// Input out of the supported range (odd, 3 ..= 2^63 - 1).
    OutOfRange(u64),
    /// A repeated prime factor was found; `factor_squarefree` rejects it.
    NotSquarefree { n: u64, repeated: u64 },
    /// The rho loop exceeded its iteration budget.
    FactorizationTimeout(u64),
    /// Legendre symbol requested with p | a.
    DivisibleInput { a: i128, p: u64 },
    /// Jacobi symbol requested with gcd(a, m) > 1.
    NotCoprime { a: i128, m: u64 },
    /// Quartic symbol requested for a non-residue base.
    NotQuadraticResidue { a: i128, l: u64 },
    /// Quartic symbol modulus has a factor that is not a prime = 1 (mod 4).
    BadModulus(u64),
    /// Hilbert symbol arguments must be nonzero.
    ZeroInput,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::EvenInput(n) => write!(f, "{n} is even"),
            ArithError::OutOfRange(n) => write!(f, "{n} is outside the supported range"),
            ArithError::NotSquarefree { n, repeated } => {
                write!(f, "{n} is not square-free ({repeated}^2 divides it)")
            }
            ArithError::FactorizationTimeout(n) => {
                write!(f, "factorization of {n} exceeded the work budget")
            }
            ArithError::DivisibleInput { a, p } => write!(f, "({a}/{p}) undefined: {p} | {a}"),
            ArithError::NotCoprime { a, m } => write!(f, "({a}/{m}) undefined: gcd > 1"),
            ArithError::NotQuadraticResidue { a, l } => {
                write!(f, "quartic symbol undefined: {a} is a non-residue mod {l}")
            }
            ArithError::BadModulus(l) => {
                write!(f, "quartic modulus factor {l} is not a prime = 1 (mod 4)")
            }
            ArithError::ZeroInput => write!(f, "Hilbert symbol arguments must be nonzero"),
        }
    }
}

impl std::error::Error for ArithError {}

/// An element of {+1, -1}, the value group of all residue symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// The isomorphism ({+1,-1}, *) -> ({0,1}, xor): +1 -> false, -1 -> true.
pub fn phi_map(s: Sign) -> bool {
    s == Sign::Minus
}

/// An odd square-free positive integer together with its ascending prime
/// factorization and the residues of each prime mod 8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    n: u64,
    primes: Vec<u64>,
    residues8: Vec<u8>,
}

impl Factored {
    /// Builds a `Factored` from an explicit list of distinct odd primes.
    /// The list is sorted; primality and distinctness are checked.
    pub fn from_primes(mut primes: Vec<u64>) -> Result<Factored, ArithError> {
        primes.sort_unstable();
        let mut n: u128 = 1;
        for (i, &p) in primes.iter().enumerate() {
            if p % 2 == 0 {
                return Err(ArithError::EvenInput(p));
            }
            if !is_prime(p) {
                return Err(ArithError::OutOfRange(p));
            }
            if i > 0 && primes[i - 1] == p {
                return Err(ArithError::NotSquarefree { n: p, repeated: p });
            }
            n *= p as u128;
            if n > MAX_N as u128 {
                return Err(ArithError::OutOfRange(MAX_N));
            }
        }
        if primes.is_empty() {
            return Err(ArithError::OutOfRange(1));
        }
        let residues8 = primes.iter().map(|&p| (p % 8) as u8).collect();
        Ok(Factored { n: n as u64, primes, residues8 })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn residues8(&self) -> &[u8] {
        &self.residues8
    }

    /// Number of prime factors.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The sub-product over the primes selected by `mask` (bit i = i-th prime).
    pub fn subproduct(&self, mask: u64) -> u64 {
        let mut d: u64 = 1;
        for (i, &p) in self.primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p;
            }
        }
        d
    }

    /// Restriction of the factorization to the primes dividing `d` (d | n).
    pub fn restrict(&self, d: u64) -> Result<Factored, ArithError> {
        if d == 0 || self.n % d != 0 {
            return Err(ArithError::OutOfRange(d));
        }
        let primes: Vec<u64> = self.primes.iter().copied().filter(|p| d % p == 0).collect();
        Factored::from_primes(primes)
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
        write!(f, "{} = {}", self.n, parts.join(" * "))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for the whole `u64` range.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if m == p {
            return true;
        }
        if m % p == 0 {
            return false;
        }
    }
    // These twelve bases are a proven witness set for all n < 3.3 * 10^24.
    let d = (m - 1) >> (m - 1).trailing_zeros();
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        let mut e = d;
        while e != m - 1 {
            x = mod_mul(x, x, m);
            e <<= 1;
            if x == m - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Brent-style rho with fixed parameter schedule, so runs are reproducible.
fn rho(n: u64, budget: &mut u64) -> Result<u64, ArithError> {
    debug_assert!(n % 2 == 1 && !is_prime(n));
    for c in 1..64u64 {
        let mut x: u64 = 2;
        let mut y: u64 = 2;
        let mut d: u64 = 1;
        let step = |v: u64| (mod_mul(v, v, n) + c) % n;
        while d == 1 {
            if *budget == 0 {
                return Err(ArithError::FactorizationTimeout(n));
            }
            *budget -= 1;
            x = step(x);
            y = step(step(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return Ok(d);
        }
    }
    Err(ArithError::FactorizationTimeout(n))
}

/// Factors an odd square-free integer m (3 <= m < 2^63).
///
/// Trial division below a fixed bound, then rho splitting with Miller-Rabin
/// certification of every factor. A repeated prime is an error, not a panic:
/// the callers only make sense for square-free input.
pub fn factor_squarefree(m: u64) -> Result<Factored, ArithError> {
    if m % 2 == 0 {
        return Err(ArithError::EvenInput(m));
    }
    if m < 3 || m > MAX_N {
        return Err(ArithError::OutOfRange(m));
    }
    let mut primes = Vec::new();
    let mut rest = m;
    let mut p = 3u64;
    while p <= TRIAL_BOUND && p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return Err(ArithError::NotSquarefree { n: m, repeated: p });
            }
            primes.push(p);
        }
        p += 2;
    }
    // Whatever is left has no factor below TRIAL_BOUND; split it with rho.
    let mut budget = RHO_BUDGET;
    let mut stack = vec![rest];
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime(v) {
            primes.push(v);
            continue;
        }
        if let Some(r) = exact_sqrt(v as u128) {
            return Err(ArithError::NotSquarefree { n: m, repeated: r });
        }
        let d = rho(v, &mut budget)?;
        stack.push(d);
        stack.push(v / d);
    }
    primes.sort_unstable();
    for w in primes.windows(2) {
        if w[0] == w[1] {
            return Err(ArithError::NotSquarefree { n: m, repeated: w[0] });
        }
    }
    Factored::from_primes(primes)
}

/// Returns r with r^2 = v, if v is a perfect square.
pub fn exact_sqrt(v: u128) -> Option<u64> {
    let r = v.isqrt();
    if r * r == v {
        Some(r as u64)
    } else {
        None
    }
}

/// Legendre symbol (a/p) for an odd prime p not dividing a, by Euler's criterion.
pub fn legendre(a: i128, p: u64) -> Result<Sign, ArithError> {
    debug_assert!(p > 2 && is_prime(p), "legendre: modulus must be an odd prime");
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return Err(ArithError::DivisibleInput { a, p });
    }
    let e = mod_pow(r, (p - 1) / 2, p);
    if e == 1 {
        Ok(Sign::Plus)
    } else {
        Ok(Sign::Minus)
    }
}

/// Jacobi symbol (a/m) for odd m >= 1, gcd(a, m) = 1, by the reciprocity loop.
pub fn jacobi(a: i128, m: u64) -> Result<Sign, ArithError> {
    if m == 0 || m % 2 == 0 {
        return Err(ArithError::OutOfRange(m));
    }
    let mut num = a.rem_euclid(m as i128) as u64;
    let mut den = m;
    let mut sign = Sign::Plus;
    while num != 0 {
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut num, &mut den);
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        num %= den;
    }
    if den == 1 {
        Ok(sign)
    } else {
        Err(ArithError::NotCoprime { a, m })
    }
}

/// Quartic residue symbol (a/L)_4 where L is the product of the given distinct
/// primes, each = 1 (mod 4), and a is a quadratic residue mod every factor:
/// the product over l | L of a^((l-1)/4) mod l read as +/-1.
pub fn quartic(a: i128, l_primes: &[u64]) -> Result<Sign, ArithError> {
    let mut sign = Sign::Plus;
    for &l in l_primes {
        if l % 4 != 1 || !is_prime(l) {
            return Err(ArithError::BadModulus(l));
        }
        let r = a.rem_euclid(l as i128) as u64;
        if r == 0 {
            return Err(ArithError::NotCoprime { a, m: l });
        }
        let e = mod_pow(r, (l - 1) / 4, l);
        if e == 1 {
            // quartic residue: factor +1
        } else if e == l - 1 {
            sign = -sign;
        } else {
            return Err(ArithError::NotQuadraticResidue { a, l });
        }
    }
    Ok(sign)
}

/// (a-1)/2 mod 2 for odd a of either sign.
fn eps2(a: i64) -> u32 {
    debug_assert!(a % 2 != 0);
    if a.rem_euclid(4) == 1 {
        0
    } else {
        1
    }
}

/// (a^2-1)/8 mod 2 for odd a of either sign.
fn omega2(a: i64) -> u32 {
    debug_assert!(a % 2 != 0);
    match a.rem_euclid(8) {
        1 | 7 => 0,
        _ => 1,
    }
}

/// Hilbert symbol (a, b)_p for nonzero integers and a prime p (p = 2 allowed).
///
/// With a = p^alpha u, b = p^beta v and p coprime to uv:
/// odd p:  (-1)^(alpha beta eps(p)) (u/p)^beta (v/p)^alpha,
/// p = 2:  (-1)^(alpha omega(v) + beta omega(u) + eps(u) eps(v)),
/// where eps(x) = (x-1)/2 and omega(x) = (x^2-1)/8, reduced mod 2.
pub fn hilbert(a: i64, b: i64, p: u64) -> Result<Sign, ArithError> {
    if a == 0 || b == 0 {
        return Err(ArithError::ZeroInput);
    }
    debug_assert!(is_prime(p), "hilbert: modulus must be prime");
    let split = |mut v: i64| -> (u32, i64) {
        let mut k = 0;
        while v % p as i64 == 0 {
            v /= p as i64;
            k += 1;
        }
        (k, v)
    };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    if p == 2 {
        let e = alpha * omega2(v) + beta * omega2(u) + eps2(u) * eps2(v);
        return Ok(if e % 2 == 0 { Sign::Plus } else { Sign::Minus });
    }
    let mut sign = if (alpha * beta * eps2(p as i64)) % 2 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    };
    if beta % 2 == 1 {
        sign = sign * legendre(u as i128, p)?;
    }
    if alpha % 2 == 1 {
        sign = sign * legendre(v as i128, p)?;
    }
    Ok(sign)
}

/// All primes <= limit, by a simple odd sieve.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; (n + 1) / 2]; // index i <-> odd number 2i+1
    let mut primes = vec![2u64];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < composite.len() {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate().skip(1) {
        if !c {
            primes.push(2 * i as u64 + 1);
        }
    }
    primes
}
