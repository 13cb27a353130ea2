//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities (run with `--nocapture` to see them).

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noncong::arith::{factor_squarefree, legendre, quartic, sieve_primes, Factored, Sign};
use noncong::classgroup::{
    class_number, discriminant, eight_rank_jung_yue, eight_rank_quartic_553,
    eight_rank_quartic_5557, eight_rank_waterhouse_with_witness, redei, ternary_witnesses,
    waterhouse_divisor,
};
use noncong::descent::{
    legendre_matrix, monsky, odd_local_ok, p_v_split, z_set, DivisorPair,
};
use noncong::fixtures::{rows, rows_in, FixtureSet};
use noncong::gf2::{block_assemble, schur_rank, BitMatrix};
use noncong::quant::{empirical_scan, monte_carlo_rank_prob, p_rank_prob};
use noncong::theorems::{certify, detect_family, tunnell_check, FamilyKind, Verdict};

fn fac(n: u64) -> Factored {
    factor_squarefree(n).unwrap()
}

fn h(m: u64) -> (u64, u32) {
    let r = class_number(&discriminant(m).unwrap()).unwrap();
    (r.h, r.v2)
}

/// All family members n = p_1...p_t q <= max with t primes = 5 (mod 8) and q
/// in the class the family requires, keeping only those satisfying the rank
/// and residue hypotheses. Ascending by n.
fn family_members(kind: FamilyKind, t: usize, max: u64) -> Vec<Factored> {
    let q_class = match kind {
        FamilyKind::F5557 => 7,
        FamilyKind::F553 => 3,
        FamilyKind::NotApplicable => unreachable!(),
    };
    let primes = sieve_primes(max / 3);
    let class5: Vec<u64> = primes.iter().copied().filter(|p| p % 8 == 5).collect();
    let class_q: Vec<u64> = primes.iter().copied().filter(|p| p % 8 == q_class).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(t);
    fn rec(
        class5: &[u64],
        class_q: &[u64],
        remaining: usize,
        max: u64,
        start: usize,
        product: u64,
        chosen: &mut Vec<u64>,
        out: &mut Vec<Factored>,
    ) {
        if remaining == 0 {
            let p = Factored::from_primes(chosen.clone()).unwrap();
            if legendre_matrix(&p).rank() != chosen.len() - 1 {
                return;
            }
            for &q in class_q {
                if product.saturating_mul(q) > max {
                    break;
                }
                if chosen.iter().any(|&pi| legendre(pi as i128, q).unwrap() == Sign::Minus) {
                    continue;
                }
                let mut all = chosen.clone();
                all.push(q);
                out.push(Factored::from_primes(all).unwrap());
            }
            return;
        }
        for (i, &pi) in class5.iter().enumerate().skip(start) {
            if product.saturating_mul(pi).saturating_mul(3) > max {
                break;
            }
            chosen.push(pi);
            rec(class5, class_q, remaining - 1, max, i + 1, product * pi, chosen, out);
            chosen.pop();
        }
    }
    rec(&class5, &class_q, t, max, 0, 1, &mut chosen, &mut out);
    out.sort_by_key(|f| f.n());
    out
}

#[test]
fn criterion_01_golden_class_numbers() {
    let start = Instant::now();
    for row in rows() {
        let (h_n, _) = h(row.n);
        assert_eq!(h_n, row.h_n, "h(-{}) mismatch", row.n);
        if let Some(h_p_expect) = row.h_p {
            let (h_p, _) = h(row.p());
            assert_eq!(h_p, h_p_expect, "h(-P) mismatch for n = {}", row.n);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 120.0, "class-number recomputation took {secs:.1}s");
    println!("criterion 01 golden class numbers: pass (42 rows exact, {secs:.1}s)");
}

#[test]
fn criterion_02_unconditional_family() {
    // Asserted exactly as specified: every t1 row satisfies the hypotheses
    // with 2^5 | h(-n); every t2 row satisfies them with 2^5 not dividing
    // h(-n) and verdict non-congruent. Known to fail on the published row
    // n = 13788827: its (independently recomputed) h = 1568 = 2^5 * 49 is
    // divisible by 2^5, so the class-number test cannot certify it even
    // though the number itself is non-congruent (the Tunnell count in
    // criterion 11 confirms that). The row contradicts the selection rule
    // of its own table.
    let mut violations = Vec::new();
    for row in rows_in(FixtureSet::T1) {
        let f = fac(row.n);
        let fam = detect_family(&f);
        assert_eq!(fam.kind, FamilyKind::F5557);
        let cert = certify(&f).unwrap();
        if (cert.hyp_rank_ok, cert.hyp_qr_ok) != (Some(true), Some(true)) {
            violations.push(format!("n = {}: hypotheses fail", row.n));
        }
        if row.h_n % 32 != 0 {
            violations.push(format!("n = {}: 2^5 does not divide h = {}", row.n, row.h_n));
        }
        if cert.verdict != Verdict::Inconclusive {
            violations.push(format!("n = {}: verdict {:?}", row.n, cert.verdict));
        }
    }
    for row in rows_in(FixtureSet::T2) {
        let cert = certify(&fac(row.n)).unwrap();
        if (cert.hyp_rank_ok, cert.hyp_qr_ok) != (Some(true), Some(true)) {
            violations.push(format!("n = {}: hypotheses fail", row.n));
        }
        if row.h_n % 32 == 0 {
            violations.push(format!(
                "n = {}: h = {} = 2^{} * {} is divisible by 2^5, criterion inapplicable",
                row.n,
                row.h_n,
                row.h_n.trailing_zeros(),
                row.h_n >> row.h_n.trailing_zeros()
            ));
        }
        if cert.verdict != Verdict::NonCongruent {
            violations.push(format!("n = {}: verdict {:?}, not NonCongruent", row.n, cert.verdict));
        }
    }
    assert!(
        violations.is_empty(),
        "criterion 02 unconditional family: FAIL\n  {}",
        violations.join("\n  ")
    );
    println!("criterion 02 unconditional family: pass (9 + 10 rows)");
}

#[test]
fn criterion_03_conditional_family_congruence() {
    for row in rows_in(FixtureSet::T3) {
        let h_p = row.h_p.unwrap();
        assert_eq!(row.h_n % 16, (h_p + 8) % 16, "congruence must hold for n = {}", row.n);
        assert_eq!(certify(&fac(row.n)).unwrap().verdict, Verdict::Inconclusive);
    }
    for row in rows_in(FixtureSet::T4) {
        let h_p = row.h_p.unwrap();
        assert_ne!(row.h_n % 16, (h_p + 8) % 16, "congruence must fail for n = {}", row.n);
        let cert = certify(&fac(row.n)).unwrap();
        assert_eq!(cert.verdict, Verdict::NonCongruentConditionalSha);
    }
    println!("criterion 03 conditional family congruence: pass (11 + 10 rows)");
}

#[test]
fn criterion_04_kernel_size_and_local_solvability() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1_4e2);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(3..=100_000u64) | 1;
        let Ok(f) = factor_squarefree(n) else { continue };
        let data = monsky(&f);
        let z = z_set(&f, 24).unwrap();
        assert_eq!(
            z.len(),
            1 << (2 * f.len() - data.matrix().rank()),
            "kernel size for n = {n}"
        );
        for pair in &z {
            assert!(odd_local_ok(*pair, &f).unwrap(), "odd-place conditions for n = {n} {pair}");
        }
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 30.0);
    println!("criterion 04 kernel size and local solvability: pass (200 random n, {secs:.1}s)");
}

#[test]
fn criterion_05_z_sets_of_both_families() {
    let mut counts = [0usize; 2];
    // F5557 with t = 1 and t = 3, F553 with t = 2 and t = 4
    for (idx, (kind, ts)) in [
        (FamilyKind::F5557, vec![1usize, 3]),
        (FamilyKind::F553, vec![2usize, 4]),
    ]
    .into_iter()
    .enumerate()
    {
        for t in ts {
            for f in family_members(kind, t, 1_000_000) {
                let fam = detect_family(&f);
                let p = fam.p().unwrap();
                let q = fam.q.unwrap();
                let data = monsky(&f);
                assert_eq!(data.selmer_rank(), 2, "s_n for n = {}", f.n());
                let expect: BTreeSet<DivisorPair> = match kind {
                    FamilyKind::F5557 => [
                        (1, 1),
                        (p, p),
                        (q, 1),
                        (f.n(), p),
                    ],
                    FamilyKind::F553 => {
                        let (pv, pv2) = p_v_split(&fam.p_factored().unwrap()).unwrap();
                        [(1, 1), (p, p), (pv, pv2), (pv2, pv)]
                    }
                    FamilyKind::NotApplicable => unreachable!(),
                }
                .into_iter()
                .map(|(u, up)| DivisorPair::new(u, up))
                .collect();
                let got: BTreeSet<DivisorPair> = z_set(&f, 24).unwrap().into_iter().collect();
                assert_eq!(got, expect, "Z for n = {}", f.n());
                counts[idx] += 1;
            }
        }
    }
    assert!(counts[0] >= 100, "only {} F5557 members", counts[0]);
    assert!(counts[1] >= 100, "only {} F553 members", counts[1]);
    println!(
        "criterion 05 z-sets of both families: pass ({} F5557 + {} F553 members)",
        counts[0], counts[1]
    );
}

#[test]
fn criterion_06_symmetric_square_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2e6);
    let mut done = 0;
    while done < 500 {
        let r = rng.gen_range(2..=16usize);
        // random symmetric matrix with zero row sums
        let mut m = BitMatrix::zeros(r, r);
        for i in 0..r {
            for j in (i + 1)..r {
                let bit = rng.gen::<bool>();
                m.set(i, j, bit);
                if bit {
                    m.set(j, i, true);
                    m.set(i, i, m.get(i, i) ^ true);
                    m.set(j, j, m.get(j, j) ^ true);
                }
            }
        }
        if m.rank() != r - 1 {
            continue; // rejection: corank must be exactly 1
        }
        let sq = m.mul(&m).unwrap();
        let expect = if r % 2 == 1 { r - 1 } else { r - 2 };
        assert_eq!(sq.rank(), expect, "rank(A^2) for r = {r}");
        done += 1;
    }
    println!("criterion 06 symmetric square rank: pass (500 matrices)");
}

#[test]
fn criterion_07_schur_rank_against_assembly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2e7);
    let mut done = 0;
    while done < 500 {
        let k = rng.gen_range(1..=6usize);
        let l = rng.gen_range(1..=6usize);
        let rand_mat = |rng: &mut ChaCha8Rng, r: usize, c: usize| {
            let mut m = BitMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, rng.gen::<bool>());
                }
            }
            m
        };
        let c1 = rand_mat(&mut rng, k, k);
        if c1.inverse().is_err() {
            continue;
        }
        let c2 = rand_mat(&mut rng, k, l);
        let c3 = rand_mat(&mut rng, l, k);
        let c4 = rand_mat(&mut rng, l, l);
        let assembled = block_assemble([[&c1, &c2], [&c3, &c4]]).unwrap();
        assert_eq!(schur_rank(&c1, &c2, &c3, &c4).unwrap(), assembled.rank());
        done += 1;
    }
    println!("criterion 07 schur rank against assembly: pass (500 instances)");
}

#[test]
fn criterion_08_four_rank_of_family_members() {
    let mut total = 0;
    for (kind, ts) in [(FamilyKind::F5557, vec![1usize, 3]), (FamilyKind::F553, vec![2usize, 4])] {
        for t in ts {
            for f in family_members(kind, t, 1_000_000) {
                let rd = redei(&f).unwrap();
                assert_eq!(rd.four_rank(), 1, "r4(-n) for n = {}", f.n());
                if kind == FamilyKind::F553 {
                    let p = detect_family(&f).p_factored().unwrap();
                    let rd_p = redei(&p).unwrap();
                    assert_eq!(rd_p.four_rank(), 1, "r4(-P) for n = {}", f.n());
                }
                total += 1;
            }
        }
    }
    println!("criterion 08 four-rank of family members: pass ({total} members)");
}

#[test]
fn criterion_09_eight_rank_bridge() {
    // quartic criteria against the 2-adic valuation of the class number
    let f5557: Vec<Factored> = family_members(FamilyKind::F5557, 1, 1_000_000)
        .into_iter()
        .take(120)
        .collect();
    assert!(f5557.len() >= 100);
    for f in &f5557 {
        let fam = detect_family(f);
        let p = fam.p_factored().unwrap();
        let r8 = eight_rank_quartic_5557(&p, fam.q.unwrap()).unwrap();
        let (_, v2) = h(f.n());
        assert_eq!(r8 == 1, v2 as usize >= fam.t + 2, "bridge for n = {}", f.n());
    }

    let f553: Vec<Factored> = family_members(FamilyKind::F553, 2, 1_000_000)
        .into_iter()
        .take(120)
        .collect();
    assert!(f553.len() >= 100);
    let mut p_values = BTreeSet::new();
    for f in &f553 {
        let fam = detect_family(f);
        let p = fam.p_factored().unwrap();
        let r8 = eight_rank_quartic_553(&p, fam.q.unwrap()).unwrap();
        let (_, v2) = h(f.n());
        assert_eq!(r8 == 1, v2 as usize >= fam.t + 2, "bridge for n = {}", f.n());
        p_values.insert(p.n());
    }
    // Jung-Yue on each distinct P against h(-4P)
    for &p_n in &p_values {
        let p = fac(p_n);
        let r8 = eight_rank_jung_yue(&p).unwrap();
        let (_, v2) = h(p_n);
        assert_eq!(r8 == 1, v2 as usize >= p.len() + 2, "Jung-Yue bridge for P = {p_n}");
    }
    println!(
        "criterion 09 eight-rank bridge: pass ({} + {} members, {} split values)",
        f5557.len(),
        f553.len(),
        p_values.len()
    );
}

#[test]
fn criterion_10_waterhouse_procedure() {
    let start = Instant::now();
    let mut members: Vec<Factored> = family_members(FamilyKind::F5557, 1, 10_000_000)
        .into_iter()
        .take(30)
        .collect();
    members.extend(family_members(FamilyKind::F553, 2, 10_000_000).into_iter().take(30));
    assert!(members.len() >= 50);
    for f in &members {
        let fam = detect_family(f);
        let p = fam.p_factored().unwrap();
        let q = fam.q.unwrap();
        let fast = match fam.kind {
            FamilyKind::F5557 => eight_rank_quartic_5557(&p, q).unwrap(),
            FamilyKind::F553 => eight_rank_quartic_553(&p, q).unwrap(),
            FamilyKind::NotApplicable => unreachable!(),
        };
        let rd = redei(f).unwrap();
        let d = waterhouse_divisor(&rd).unwrap();
        let witnesses = ternary_witnesses(d, rd.disc(), 3, None).unwrap();
        assert_eq!(witnesses.len(), 3, "witnesses for n = {}", f.n());
        for w in &witnesses {
            assert!(w.verify(rd.disc()));
            let got = eight_rank_waterhouse_with_witness(&rd, w).unwrap();
            assert_eq!(got, fast, "n = {} witness {:?}", f.n(), w);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "Waterhouse check took {secs:.1}s");
    println!(
        "criterion 10 waterhouse procedure: pass ({} members x 3 witnesses, {secs:.1}s)",
        members.len()
    );
}

#[test]
fn criterion_11_tunnell_counts() {
    let start = Instant::now();
    for row in rows() {
        if row.set == FixtureSet::Extra {
            continue;
        }
        let counts = tunnell_check(row.n, u64::MAX).unwrap();
        if row.congruent {
            assert_eq!(counts.a, 2 * counts.b, "A = 2B must hold for congruent n = {}", row.n);
        } else {
            assert_ne!(counts.a, 2 * counts.b, "A != 2B must hold for n = {}", row.n);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!("criterion 11 tunnell counts: pass (40 rows, {secs:.1}s)");
}

#[test]
fn criterion_12_density_at_five_million() {
    let start = Instant::now();
    let report = empirical_scan(1, 5_000_000, 42).unwrap();
    assert!(
        report.ratio >= 0.6 && report.ratio <= 1.4,
        "ratio {} outside [0.6, 1.4] (empirical {}, predicted {:.1})",
        report.ratio,
        report.empirical,
        report.predicted
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 300.0);
    println!(
        "criterion 12 density at five million: pass (empirical {}, predicted {:.1}, ratio {:.3}, {secs:.1}s)",
        report.empirical, report.predicted, report.ratio
    );
}

#[test]
fn criterion_13_monte_carlo_rank_probability() {
    for t in [2usize, 3, 4] {
        let expect = p_rank_prob(t).to_f64();
        let got = monte_carlo_rank_prob(t, 2000, 0xacc_13);
        assert!(
            (got - expect).abs() <= 0.05,
            "t = {t}: frequency {got:.4} vs p = {expect:.4}"
        );
    }
    println!("criterion 13 monte-carlo rank probability: pass (t = 2, 3, 4 within 0.05)");
}
