//! The 2-descent layer for the curve y^2 = x^3 - n^2 x with n odd square-free:
//! the divisor group G(n), the Monsky matrix and the 2-Selmer rank derived from
//! its corank, the kernel set Z of everywhere-locally-solvable pairs, the
//! odd-place solvability conditions, and a bounded global witness search.

use std::fmt;

use crate::arith::{legendre, phi_map, Factored, Sign};
use crate::gf2::{block_assemble, BitMatrix, BitVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescentError {
    /// The given integer does not divide n.
    NotDivisor { d: u64, n: u64 },
    /// Kernel enumeration would exceed the configured cap.
    CapExceeded { selmer_rank: usize, cap: usize },
    /// The all-ones vector is not in the column space of the symbol matrix.
    NoSolution,
}

impl fmt::Display for DescentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescentError::NotDivisor { d, n } => write!(f, "{d} does not divide {n}"),
            DescentError::CapExceeded { selmer_rank, cap } => {
                write!(f, "kernel of size 2^{selmer_rank} exceeds the enumeration cap {cap}")
            }
            DescentError::NoSolution => write!(f, "no solution of A v = 1"),
        }
    }
}

impl std::error::Error for DescentError {}

/// A pair (u, u') of positive divisors of n, indexing one homogeneous-space
/// system u u' x^2 + n y^2 = u z^2, u u' x^2 - n y^2 = u' w^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorPair {
    pub u: u64,
    pub u_prime: u64,
}

impl DivisorPair {
    pub fn new(u: u64, u_prime: u64) -> DivisorPair {
        DivisorPair { u, u_prime }
    }
}

impl fmt::Display for DivisorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.u_prime)
    }
}

/// The Monsky matrix of n together with its blocks and the 2-Selmer rank
/// read off from its corank.
#[derive(Debug, Clone)]
pub struct MonskyData {
    factored: Factored,
    a: BitMatrix,
    d2: BitMatrix,
    dm2: BitMatrix,
    m: BitMatrix,
    selmer_rank: usize,
}

impl MonskyData {
    pub fn factored(&self) -> &Factored {
        &self.factored
    }

    /// The symmetric symbol block A.
    pub fn a(&self) -> &BitMatrix {
        &self.a
    }

    pub fn d2(&self) -> &BitMatrix {
        &self.d2
    }

    pub fn dm2(&self) -> &BitMatrix {
        &self.dm2
    }

    /// The assembled 2r x 2r Monsky matrix.
    pub fn matrix(&self) -> &BitMatrix {
        &self.m
    }

    pub fn selmer_rank(&self) -> usize {
        self.selmer_rank
    }
}

/// An integer solution of one homogeneous-space system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolutionTuple {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub w: u64,
}

/// All 2^r positive divisors of n, ascending.
pub fn divisor_group(n: &Factored) -> Vec<u64> {
    let r = n.len();
    let mut divs: Vec<u64> = (0..1u64 << r).map(|mask| n.subproduct(mask)).collect();
    divs.sort_unstable();
    divs
}

/// The group law on divisors of n: u * u' = u u' / gcd(u, u')^2.
pub fn star(u: u64, u_prime: u64, n: &Factored) -> Result<u64, DescentError> {
    check_divisor(u, n)?;
    check_divisor(u_prime, n)?;
    let g = crate::arith::gcd(u, u_prime);
    Ok(u / g * (u_prime / g))
}

fn check_divisor(d: u64, n: &Factored) -> Result<(), DescentError> {
    if d == 0 || n.n() % d != 0 {
        return Err(DescentError::NotDivisor { d, n: n.n() });
    }
    Ok(())
}

/// Indicator vector of the prime support of u, indexed by the ascending
/// primes of n.
pub fn varphi(u: u64, n: &Factored) -> Result<BitVec, DescentError> {
    check_divisor(u, n)?;
    Ok(BitVec::from_bits(
        &n.primes().iter().map(|&p| u % p == 0).collect::<Vec<_>>(),
    ))
}

/// The concatenation (varphi(u), varphi(u')) of length 2r.
pub fn psi(pair: DivisorPair, n: &Factored) -> Result<BitVec, DescentError> {
    let r = n.len();
    let a = varphi(pair.u, n)?;
    let b = varphi(pair.u_prime, n)?;
    let mut out = BitVec::zeros(2 * r);
    for i in 0..r {
        out.set(i, a.get(i));
        out.set(r + i, b.get(i));
    }
    Ok(out)
}

/// Inverse of `psi`: reads a length-2r vector back into a divisor pair.
pub fn psi_inverse(v: &BitVec, n: &Factored) -> DivisorPair {
    let r = n.len();
    debug_assert_eq!(v.len(), 2 * r);
    let mut u = 1u64;
    let mut u_prime = 1u64;
    for (i, &p) in n.primes().iter().enumerate() {
        if v.get(i) {
            u *= p;
        }
        if v.get(r + i) {
            u_prime *= p;
        }
    }
    DivisorPair::new(u, u_prime)
}

/// The r x r symbol matrix: off the diagonal the bit of (p_j / p_i), on the
/// diagonal the XOR of the rest of the row (so every row sums to zero).
/// For a single prime this is the 1 x 1 zero matrix.
pub fn legendre_matrix(n: &Factored) -> BitMatrix {
    legendre_matrix_of_primes(n.primes())
}

/// Same matrix built from a bare list of distinct odd primes (their product
/// need not fit in 64 bits).
pub fn legendre_matrix_of_primes(ps: &[u64]) -> BitMatrix {
    let r = ps.len();
    let mut m = BitMatrix::zeros(r, r);
    for i in 0..r {
        let mut diag = false;
        for j in 0..r {
            if i == j {
                continue;
            }
            let bit = phi_map(legendre(ps[j] as i128, ps[i]).expect("distinct primes"));
            m.set(i, j, bit);
            diag ^= bit;
        }
        m.set(i, i, diag);
    }
    m
}

/// Builds the Monsky matrix [[A + D2, D2], [D2, A + D-2]] and derives the
/// 2-Selmer rank s_n = 2r - rank(M).
pub fn monsky(n: &Factored) -> MonskyData {
    let ps = n.primes();
    let r = ps.len();
    let a = legendre_matrix(n);
    let diag = |l: i128| {
        let mut d = BitMatrix::zeros(r, r);
        for (i, &p) in ps.iter().enumerate() {
            d.set(i, i, phi_map(legendre(l, p).expect("odd prime")));
        }
        d
    };
    let d2 = diag(2);
    let dm2 = diag(-2);
    let a_d2 = a.add(&d2).expect("same shape");
    let a_dm2 = a.add(&dm2).expect("same shape");
    let m = block_assemble([[&a_d2, &d2], [&d2, &a_dm2]]).expect("conformable");
    let selmer_rank = 2 * r - m.rank();
    MonskyData { factored: n.clone(), a, d2, dm2, m, selmer_rank }
}

/// The set Z of pairs whose image under psi lies in the null space of the
/// Monsky matrix; exactly 2^{s_n} pairs, always containing (1, 1). The result
/// is sorted, so the enumeration order is deterministic.
pub fn z_set(n: &Factored, cap: usize) -> Result<Vec<DivisorPair>, DescentError> {
    let data = monsky(n);
    let basis = data.m.nullspace();
    debug_assert_eq!(basis.len(), data.selmer_rank);
    if basis.len() > cap {
        return Err(DescentError::CapExceeded { selmer_rank: basis.len(), cap });
    }
    let mut out = Vec::with_capacity(1 << basis.len());
    for mask in 0u64..1 << basis.len() {
        let mut v = BitVec::zeros(2 * n.len());
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v.xor_assign(b);
            }
        }
        out.push(psi_inverse(&v, n));
    }
    out.sort_unstable();
    Ok(out)
}

/// Solvability of the system for (u, u') in Q_p for every odd prime p | n:
///   p coprime to u u':   (u/p) = (u'/p) = 1
///   p | u only:          (2n/u / p) = (2u'/p) = 1
///   p | u' only:         (2u/p) = (-2n/u' / p) = 1
///   p | u and p | u':    (n/u / p) = (-n/u' / p) = 1
pub fn odd_local_ok(pair: DivisorPair, n: &Factored) -> Result<bool, DescentError> {
    check_divisor(pair.u, n)?;
    check_divisor(pair.u_prime, n)?;
    let (u, up) = (pair.u, pair.u_prime);
    let ok = |v: i128, p: u64| legendre(v, p).expect("coprime by construction") == Sign::Plus;
    for &p in n.primes() {
        let div_u = u % p == 0;
        let div_up = up % p == 0;
        let good = match (div_u, div_up) {
            (false, false) => ok(u as i128, p) && ok(up as i128, p),
            (true, false) => ok(2 * (n.n() / u) as i128, p) && ok(2 * up as i128, p),
            (false, true) => ok(2 * u as i128, p) && ok(-2 * (n.n() / up) as i128, p),
            (true, true) => ok((n.n() / u) as i128, p) && ok(-((n.n() / up) as i128), p),
        };
        if !good {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Splits P into (P_v, P / P_v) from the canonical solution of A v = 1,
/// where A is the symbol matrix of P. Deterministic: free variables are zero.
pub fn p_v_split(p: &Factored) -> Result<(u64, u64), DescentError> {
    let a = legendre_matrix(p);
    let ones = BitVec::ones(p.len());
    let v = a
        .solve(&ones)
        .expect("square system")
        .ok_or(DescentError::NoSolution)?;
    let mut p_v = 1u64;
    for (i, &q) in p.primes().iter().enumerate() {
        if v.get(i) {
            p_v *= q;
        }
    }
    Ok((p_v, p.n() / p_v))
}

/// Exhaustive search for a primitive solution of the system attached to
/// (u, u') with 0 <= x, y <= bound, in lexicographic (x, y) order. `None`
/// only means nothing was found within the bound.
pub fn witness_search(pair: DivisorPair, n: &Factored, bound: u64) -> Option<SolutionTuple> {
    let u = pair.u as u128;
    let up = pair.u_prime as u128;
    if n.n() % pair.u != 0 || n.n() % pair.u_prime != 0 {
        return None;
    }
    let nn = n.n() as u128;
    for x in 0..=bound {
        let xs = (x as u128) * (x as u128);
        for y in 0..=bound {
            if x == 0 && y == 0 {
                continue;
            }
            let ys = (y as u128) * (y as u128);
            let lhs_plus = u * up * xs + nn * ys;
            let lhs_minus = match (u * up * xs).checked_sub(nn * ys) {
                Some(v) => v,
                None => break, // y too large for this x; larger y only worse
            };
            if lhs_plus % u != 0 || lhs_minus % up != 0 {
                continue;
            }
            let (zz, ww) = (lhs_plus / u, lhs_minus / up);
            let (Some(z), Some(w)) = (crate::arith::exact_sqrt(zz), crate::arith::exact_sqrt(ww))
            else {
                continue;
            };
            let g = [x, y, z, w].into_iter().fold(0, crate::arith::gcd);
            if g == 1 {
                return Some(SolutionTuple { x, y, z, w });
            }
        }
    }
    None
}
