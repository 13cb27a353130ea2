//! Family detection and non-congruence certificates.
//!
//! For n = p_1 ... p_t q with every p_i = 5 (mod 8) the two certified cases are
//!   q = 7 (mod 8), t odd  (F5557): if the rank and residue hypotheses hold and
//!       2^{t+2} does not divide h(-n), then n is not congruent, unconditionally;
//!   q = 3 (mod 8), t even (F553):  if the hypotheses hold and
//!       h(-n) != h(-P) + 2^{t+1} (mod 2^{t+2}), then n is not congruent,
//!       conditionally on finiteness of the 2-torsion of the Tate-Shafarevich
//!       group.
//! Certificates record the full evidence trail; the quartic fast paths are run
//! alongside the class-number route and cross-checked whenever both apply.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{legendre, Factored, Sign};
use crate::classgroup::{
    class_number_with_budget, discriminant, eight_rank_jung_yue, eight_rank_quartic_553,
    eight_rank_quartic_5557, ClassGroupError, DEFAULT_CLASS_BUDGET,
};
use crate::descent::{legendre_matrix, monsky};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    ClassGroup(ClassGroupError),
    Arith(crate::arith::ArithError),
    /// Tunnell counting refused: n above the configured budget.
    BudgetExceeded { n: u64, budget: u64 },
    /// Root number undefined: n = 0 (mod 4) is not square-free.
    BadResidue(u64),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::ClassGroup(e) => write!(f, "{e}"),
            CertifyError::Arith(e) => write!(f, "{e}"),
            CertifyError::BudgetExceeded { n, budget } => {
                write!(f, "{n} exceeds the lattice-count budget {budget}")
            }
            CertifyError::BadResidue(n) => write!(f, "{n} = 0 (mod 4) is not square-free"),
        }
    }
}

impl std::error::Error for CertifyError {}

impl From<ClassGroupError> for CertifyError {
    fn from(e: ClassGroupError) -> Self {
        CertifyError::ClassGroup(e)
    }
}

impl From<crate::arith::ArithError> for CertifyError {
    fn from(e: crate::arith::ArithError) -> Self {
        CertifyError::Arith(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// All p_i = 5 (mod 8), q = 7 (mod 8), t odd.
    F5557,
    /// All p_i = 5 (mod 8), q = 3 (mod 8), t even (forces n = 3 mod 8).
    F553,
    NotApplicable,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::F5557 => write!(f, "F5557"),
            FamilyKind::F553 => write!(f, "F553"),
            FamilyKind::NotApplicable => write!(f, "not-applicable"),
        }
    }
}

/// The detected family split n = P q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub kind: FamilyKind,
    /// Number of primes = 5 (mod 8).
    pub t: usize,
    pub p_primes: Vec<u64>,
    pub q: Option<u64>,
}

impl FamilyInfo {
    fn not_applicable() -> FamilyInfo {
        FamilyInfo { kind: FamilyKind::NotApplicable, t: 0, p_primes: Vec::new(), q: None }
    }

    /// The factorization of P, available when the family applies.
    pub fn p_factored(&self) -> Option<Factored> {
        if self.kind == FamilyKind::NotApplicable {
            return None;
        }
        Factored::from_primes(self.p_primes.clone()).ok()
    }

    pub fn p(&self) -> Option<u64> {
        self.p_factored().map(|f| f.n())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonCongruent,
    NonCongruentConditionalSha,
    Inconclusive,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NonCongruent => write!(f, "non-congruent"),
            Verdict::NonCongruentConditionalSha => write!(f, "non-congruent-conditional-sha"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
            Verdict::NotApplicable => write!(f, "not-applicable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClassNumber,
    QuarticFastPath,
    Both,
}

/// The per-n verdict with its full evidence trail. Fields that do not apply
/// (wrong family, hypotheses failed) are None and serialize to null.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u64,
    pub family: FamilyInfo,
    pub hyp_rank_ok: Option<bool>,
    pub hyp_qr_ok: Option<bool>,
    pub selmer_rank: Option<usize>,
    pub h_n: Option<u64>,
    pub v2_h_n: Option<u32>,
    #[serde(rename = "h_P")]
    pub h_p: Option<u64>,
    pub eight_rank_n: Option<u8>,
    #[serde(rename = "eight_rank_P")]
    pub eight_rank_p: Option<u8>,
    pub verdict: Verdict,
    pub method: Method,
}

/// Detects the family of n: exactly one prime not = 5 (mod 8), and that prime
/// = 7 (mod 8) with t odd, or = 3 (mod 8) with t >= 2 even. Everything else,
/// including a bare prime q, is NotApplicable.
pub fn detect_family(n: &Factored) -> FamilyInfo {
    let mut p_primes = Vec::with_capacity(n.len());
    let mut q = None;
    for (&p, &r) in n.primes().iter().zip(n.residues8()) {
        if r == 5 {
            p_primes.push(p);
        } else if q.is_none() {
            q = Some((p, r));
        } else {
            return FamilyInfo::not_applicable();
        }
    }
    let t = p_primes.len();
    match q {
        Some((q, 7)) if t % 2 == 1 => {
            FamilyInfo { kind: FamilyKind::F5557, t, p_primes, q: Some(q) }
        }
        Some((q, 3)) if t >= 2 && t % 2 == 0 => {
            FamilyInfo { kind: FamilyKind::F553, t, p_primes, q: Some(q) }
        }
        _ => FamilyInfo::not_applicable(),
    }
}

/// Checks the two theorem hypotheses: (a) the symbol matrix of P has rank
/// t - 1, (b) every p_i is a quadratic residue mod q.
pub fn check_hypotheses(fam: &FamilyInfo) -> (bool, bool) {
    let Some(p) = fam.p_factored() else {
        return (false, false);
    };
    let q = fam.q.expect("family applies");
    let rank_ok = legendre_matrix(&p).rank() == fam.t - 1;
    let qr_ok = fam
        .p_primes
        .iter()
        .all(|&pi| legendre(pi as i128, q).expect("distinct primes") == Sign::Plus);
    (rank_ok, qr_ok)
}

/// Options for `certify`.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Work budget for class numbers (bound on |D|).
    pub class_budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { class_budget: DEFAULT_CLASS_BUDGET }
    }
}

pub fn certify(n: &Factored) -> Result<Certificate, CertifyError> {
    certify_with(n, &CertifyOptions::default())
}

/// Produces the certificate for n: family detection, hypothesis checks,
/// 2-Selmer rank, class numbers, 8-ranks, and the verdict. Pure: identical
/// input gives a bit-identical certificate.
pub fn certify_with(n: &Factored, opts: &CertifyOptions) -> Result<Certificate, CertifyError> {
    let family = detect_family(n);
    if family.kind == FamilyKind::NotApplicable {
        return Ok(Certificate {
            n: n.n(),
            family,
            hyp_rank_ok: None,
            hyp_qr_ok: None,
            selmer_rank: None,
            h_n: None,
            v2_h_n: None,
            h_p: None,
            eight_rank_n: None,
            eight_rank_p: None,
            verdict: Verdict::NotApplicable,
            method: Method::ClassNumber,
        });
    }

    let (rank_ok, qr_ok) = check_hypotheses(&family);
    let hyps = rank_ok && qr_ok;
    let selmer = monsky(n).selmer_rank();
    let t = family.t;
    let p = family.p_factored().expect("family applies");
    let q = family.q.expect("family applies");

    let h_n = class_number_with_budget(&discriminant(n.n())?, opts.class_budget)?;
    let modulus = 1u64 << (t + 2); // 2^{t+2}
    let step = 1u64 << (t + 1); // 2^{t+1}

    let mut cert = Certificate {
        n: n.n(),
        family: family.clone(),
        hyp_rank_ok: Some(rank_ok),
        hyp_qr_ok: Some(qr_ok),
        selmer_rank: Some(selmer),
        h_n: Some(h_n.h),
        v2_h_n: Some(h_n.v2),
        h_p: None,
        eight_rank_n: None,
        eight_rank_p: None,
        verdict: Verdict::Inconclusive,
        method: Method::ClassNumber,
    };

    match family.kind {
        FamilyKind::F5557 => {
            let divisible = h_n.h % modulus == 0;
            if hyps {
                // quartic fast path; must agree with the class-number route
                let r8 = eight_rank_quartic_5557(&p, q)?;
                assert_eq!(
                    r8 == 1,
                    divisible,
                    "quartic fast path disagrees with h(-n) for n = {}",
                    n.n()
                );
                cert.eight_rank_n = Some(r8);
                cert.method = Method::Both;
                cert.verdict =
                    if divisible { Verdict::Inconclusive } else { Verdict::NonCongruent };
            }
        }
        FamilyKind::F553 => {
            let h_p = class_number_with_budget(&discriminant(p.n())?, opts.class_budget)?;
            cert.h_p = Some(h_p.h);
            // h(-n) = h(-P) + 2^{t+1} (mod 2^{t+2})?
            let congruent_cls =
                (h_n.h % modulus) == ((h_p.h % modulus) + step) % modulus;
            if hyps {
                let r8_n = eight_rank_quartic_553(&p, q)?;
                let r8_p = eight_rank_jung_yue(&p)?;
                assert_eq!(
                    r8_n == 1,
                    h_n.v2 as usize >= t + 2,
                    "quartic fast path disagrees with h(-n) for n = {}",
                    n.n()
                );
                assert_eq!(
                    r8_p == 1,
                    h_p.v2 as usize >= t + 2,
                    "Jung-Yue fast path disagrees with h(-P) for n = {}",
                    n.n()
                );
                cert.eight_rank_n = Some(r8_n);
                cert.eight_rank_p = Some(r8_p);
                cert.method = Method::Both;
                cert.verdict = if congruent_cls {
                    Verdict::Inconclusive
                } else {
                    Verdict::NonCongruentConditionalSha
                };
            }
        }
        FamilyKind::NotApplicable => unreachable!(),
    }
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TunnellVerdict {
    ConsistentWithCongruent,
    NotCongruentByTunnell,
}

/// The two lattice counts of the Tunnell criterion for odd square-free n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunnellCounts {
    /// #{(x, y, z) : x^2 + 2y^2 + 8z^2 = n}
    pub a: u64,
    /// #{(x, y, z) : x^2 + 2y^2 + 32z^2 = n}
    pub b: u64,
    pub verdict: TunnellVerdict,
}

/// Default budget for the Tunnell lattice count (covers the bundled tables).
pub const DEFAULT_TUNNELL_BUDGET: u64 = 5_000_000_000;

/// Counts A = #{x^2 + 2y^2 + 8z^2 = n} and B = #{x^2 + 2y^2 + 32z^2 = n} over
/// all integer triples. A != 2B certifies, unconditionally, that odd
/// square-free n is not congruent; A = 2B is merely consistent with it.
pub fn tunnell_check(n: u64, budget: u64) -> Result<TunnellCounts, CertifyError> {
    if n % 2 == 0 || n == 0 {
        return Err(CertifyError::Arith(crate::arith::ArithError::EvenInput(n)));
    }
    if n > budget {
        return Err(CertifyError::BudgetExceeded { n, budget });
    }
    let a = count_xyz(n, 8);
    let b = count_xyz(n, 32);
    let verdict = if a == 2 * b {
        TunnellVerdict::ConsistentWithCongruent
    } else {
        TunnellVerdict::NotCongruentByTunnell
    };
    Ok(TunnellCounts { a, b, verdict })
}

/// #{(x, y, z) in Z^3 : x^2 + 2y^2 + c z^2 = n} for odd n and c in {8, 32}.
fn count_xyz(n: u64, c: u64) -> u64 {
    let half_c = c / 2;
    let mut count = 0u64;
    // n odd forces x odd; count x > 0 and double.
    let mut x = 1u64;
    while x * x <= n {
        let m = (n - x * x) / 2; // y^2 + (c/2) z^2 = (n - x^2) / 2
        let mut z = 0u64;
        while let Some(rest) = m.checked_sub(half_c * z * z) {
            let y = rest.isqrt();
            if y * y == rest {
                let y_ways = if y == 0 { 1 } else { 2 };
                let z_ways = if z == 0 { 1 } else { 2 };
                count += 2 * y_ways * z_ways; // the factor 2 is +/- x
            }
            z += 1;
        }
        x += 2;
    }
    count
}

/// Root number of the curve y^2 = x^3 - n^2 x for square-free n:
/// +1 for n = 1, 2, 3 (mod 8) and -1 for n = 5, 6, 7 (mod 8).
/// Reported as commentary only; no verdict rests on it.
pub fn root_number(n: u64) -> Result<Sign, CertifyError> {
    match n % 8 {
        1 | 2 | 3 => Ok(Sign::Plus),
        5 | 6 | 7 => Ok(Sign::Minus),
        _ => Err(CertifyError::BadResidue(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_squarefree;

    fn fac(n: u64) -> Factored {
        factor_squarefree(n).unwrap()
    }

    #[test]
    fn family_detection() {
        let f = detect_family(&fac(3_789_955));
        assert_eq!(f.kind, FamilyKind::F5557);
        assert_eq!((f.t, f.q), (3, Some(199)));
        assert_eq!(f.p_primes, vec![5, 13, 293]);

        let f = detect_family(&fac(2035));
        assert_eq!(f.kind, FamilyKind::F553);
        assert_eq!((f.t, f.q), (2, Some(11)));

        assert_eq!(detect_family(&fac(21)).kind, FamilyKind::NotApplicable);
        // two primes outside class 5
        assert_eq!(detect_family(&fac(3 * 7 * 5)).kind, FamilyKind::NotApplicable);
        // parity of t wrong: q = 7 (mod 8) with t = 2
        assert_eq!(detect_family(&fac(5 * 13 * 7)).kind, FamilyKind::NotApplicable);
        // bare prime q = 3 (mod 8): t = 0 stays out of scope
        assert_eq!(detect_family(&fac(11)).kind, FamilyKind::NotApplicable);
    }

    #[test]
    fn hypothesis_checks() {
        let f = detect_family(&fac(3_789_955));
        assert_eq!(check_hypotheses(&f), (true, true));

        // t = 1: the 1x1 zero matrix has rank 0 = t - 1, and (5/31) = 1
        let f = detect_family(&fac(155));
        assert_eq!(f.kind, FamilyKind::F5557);
        assert_eq!(check_hypotheses(&f), (true, true));

        // 5 * 29 * 109: all pairwise symbols +1, so rank 0 < t - 1 = 2
        // (29 = 5 + 24 and 109 = 100 + 9 are residues of each other and of 5)
        let n = fac(5 * 29 * 109 * 7);
        let f = detect_family(&n);
        assert_eq!(f.kind, FamilyKind::F5557);
        let (rank_ok, _) = check_hypotheses(&f);
        assert!(!rank_ok);
    }

    #[test]
    fn certify_table_rows() {
        let c = certify(&fac(2_445_755)).unwrap();
        assert_eq!(c.verdict, Verdict::NonCongruent);
        assert_eq!(c.h_n, Some(368));
        assert_eq!(c.method, Method::Both);
        assert_eq!(c.eight_rank_n, Some(0));
        assert_eq!(c.selmer_rank, Some(2));

        let c = certify(&fac(4251)).unwrap();
        assert_eq!(c.verdict, Verdict::NonCongruentConditionalSha);
        assert_eq!((c.h_n, c.h_p), (Some(16), Some(16)));

        let c = certify(&fac(21)).unwrap();
        assert_eq!(c.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn certify_remark_counterexamples() {
        // both satisfy their hypotheses yet stay inconclusive
        let c = certify(&fac(42_090_427)).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.h_n, Some(704));
        assert_eq!((c.hyp_rank_ok, c.hyp_qr_ok), (Some(true), Some(true)));

        let c = certify(&fac(70_115)).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!((c.h_n, c.h_p), (Some(88), Some(16)));
    }

    #[test]
    fn certify_is_pure() {
        let n = fac(2035);
        assert_eq!(certify(&n).unwrap(), certify(&n).unwrap());
    }

    #[test]
    fn tunnell_small_values() {
        let t = tunnell_check(5, DEFAULT_TUNNELL_BUDGET).unwrap();
        assert_eq!((t.a, t.b), (0, 0));
        assert_eq!(t.verdict, TunnellVerdict::ConsistentWithCongruent);

        let t = tunnell_check(3, DEFAULT_TUNNELL_BUDGET).unwrap();
        assert_eq!((t.a, t.b), (4, 4));
        assert_eq!(t.verdict, TunnellVerdict::NotCongruentByTunnell);

        // n = 1: only (+-1, 0, 0), so A = B = 2 and the count rules it out
        let t = tunnell_check(1, DEFAULT_TUNNELL_BUDGET).unwrap();
        assert_eq!((t.a, t.b), (2, 2));
        assert_eq!(t.verdict, TunnellVerdict::NotCongruentByTunnell);

        // 41 is congruent; 11 and 33 are not
        assert_eq!(
            tunnell_check(41, DEFAULT_TUNNELL_BUDGET).unwrap().verdict,
            TunnellVerdict::ConsistentWithCongruent
        );
        for n in [11u64, 33] {
            assert_eq!(
                tunnell_check(n, DEFAULT_TUNNELL_BUDGET).unwrap().verdict,
                TunnellVerdict::NotCongruentByTunnell
            );
        }

        assert!(matches!(
            tunnell_check(1001, 100),
            Err(CertifyError::BudgetExceeded { .. })
        ));
        assert!(tunnell_check(12, DEFAULT_TUNNELL_BUDGET).is_err());
    }

    #[test]
    fn root_numbers() {
        assert_eq!(root_number(1).unwrap(), Sign::Plus);
        assert_eq!(root_number(7).unwrap(), Sign::Minus);
        assert_eq!(root_number(13).unwrap(), Sign::Minus);
        assert_eq!(root_number(2).unwrap(), Sign::Plus);
        assert!(matches!(root_number(4), Err(CertifyError::BadResidue(4))));
    }
}
