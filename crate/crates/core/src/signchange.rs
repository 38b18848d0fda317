//! Certificates that `λ(f(n))` changes sign infinitely often.
//!
//! Past the threshold `A0 = ⌊(|b| + (|D|+1)/2) / (2a)⌋ + 1`, every value
//! `f(n) = l·m²` has `a·l` non-square, so a single pair of opposite-sign
//! values can be expanded into two infinite families of opposite sign.

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::family::{
    family_pell_modulus, generate_family_past_with_budget, verify_member, FamilyMember,
    QuadraticPoly, SeedSolution, SolutionFamily, DEFAULT_PELL_BUDGET,
};
use crate::integer::{factorize, is_perfect_square, is_prime};
use crate::liouville::{lambda_point, Sign};
use crate::pell::pell_fundamental;

/// Members past the scan horizon attached to each certificate family.
pub const DEFAULT_MEMBERS_BEYOND: usize = 3;

/// Monic identity check stops at this `n`.
pub const MONIC_IDENTITY_CAP: u64 = 1000;

/// `⌊(2|b| + |D| + 1) / (4a)⌋ + 1`; rejects `D = 0`.
pub fn compute_a0(poly: &QuadraticPoly) -> Result<u128> {
    let d = poly.discriminant().unsigned_abs();
    if d == 0 {
        return Err(Error::ExcludedForm);
    }
    let b = u128::from(poly.b().unsigned_abs());
    let a = u128::from(poly.a().unsigned_abs());
    let numer = 2 * b + d + 1;
    Ok(numer / (4 * a) + 1)
}

/// `f(n) = l·m²` with `l` squarefree, and `λ(l) = λ(f(n))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub value: BigUint,
    pub l: BigUint,
    pub m: BigUint,
    pub lambda: Sign,
}

pub fn decompose_value(poly: &QuadraticPoly, n: &BigInt) -> Result<Decomposition> {
    let value = poly.eval(n);
    if !value.is_positive() {
        return Err(Error::NotPositive(value));
    }
    let f = factorize(&value)?;
    let (l, m) = f.squarefree_parts();
    Ok(Decomposition {
        value: value.magnitude().clone(),
        l,
        m,
        lambda: Sign::from_parity(f.big_omega()),
    })
}

/// One side of a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: u64,
    pub value: BigUint,
    pub l: BigUint,
    pub m: BigUint,
    pub lambda: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateMetadata {
    /// Last `n` examined by the scan.
    pub n_limit: u64,
    /// First `n` examined by the scan.
    pub scan_start: u64,
    /// Family members required past `n_limit`.
    pub members_beyond: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignChangeCertificate {
    pub poly: QuadraticPoly,
    pub a0: u128,
    pub witnesses: [Witness; 2],
    pub families: [SolutionFamily; 2],
    pub metadata: CertificateMetadata,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanOutcome {
    Certificate(Box<SignChangeCertificate>),
    /// Every scanned value had the same sign. `sign` is `None` when the range
    /// held no positive value at all.
    ConstantSoFar {
        sign: Option<Sign>,
        range: RangeInclusive<u64>,
        /// `n` in range with `f(n) <= 0`, which λ does not see.
        skipped: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub members_beyond: usize,
    pub pell_budget: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            members_beyond: DEFAULT_MEMBERS_BEYOND,
            pell_budget: DEFAULT_PELL_BUDGET,
        }
    }
}

pub fn scan_certificate(poly: &QuadraticPoly, n_limit: u64) -> Result<ScanOutcome> {
    scan_certificate_with(poly, n_limit, &ScanOptions::default())
}

/// Scans `n` from `A0` to `n_limit`; the witnesses are the first scanned `n`
/// and the first later `n` whose sign differs from it.
pub fn scan_certificate_with(
    poly: &QuadraticPoly,
    n_limit: u64,
    options: &ScanOptions,
) -> Result<ScanOutcome> {
    let a0 = compute_a0(poly)?;
    let start = u64::try_from(a0)
        .map_err(|_| Error::Defect(format!("A0 = {a0} exceeds the scannable range")))?;
    let mut first: Option<(u64, Sign)> = None;
    let mut skipped = 0;
    for n in start..=n_limit {
        let value = poly.eval(&BigInt::from(n));
        if !value.is_positive() {
            skipped += 1;
            continue;
        }
        let sign = lambda_point(&value)?;
        match first {
            None => first = Some((n, sign)),
            Some((n1, s1)) if s1 != sign => {
                let cert = build_certificate(poly, a0, [n1, n], start, n_limit, options)?;
                return Ok(ScanOutcome::Certificate(Box::new(cert)));
            }
            Some(_) => {}
        }
    }
    Ok(ScanOutcome::ConstantSoFar {
        sign: first.map(|(_, s)| s),
        range: start..=n_limit,
        skipped,
    })
}

fn build_certificate(
    poly: &QuadraticPoly,
    a0: u128,
    ns: [u64; 2],
    scan_start: u64,
    n_limit: u64,
    options: &ScanOptions,
) -> Result<SignChangeCertificate> {
    let horizon = BigUint::from(n_limit);
    let mut witnesses = Vec::with_capacity(2);
    let mut families = Vec::with_capacity(2);
    for n in ns {
        let d = decompose_value(poly, &BigInt::from(n))?;
        let al = BigInt::from(poly.a()) * BigInt::from(d.l.clone());
        if is_perfect_square(&al) {
            return Err(Error::Defect(format!(
                "a*l = {al} is a square at n = {n} >= A0"
            )));
        }
        let seed = SeedSolution::new(*poly, d.l.clone(), BigInt::from(n), d.m.clone())?;
        families.push(generate_family_past_with_budget(
            &seed,
            &horizon,
            options.members_beyond,
            options.pell_budget,
        )?);
        witnesses.push(Witness {
            n,
            value: d.value,
            l: d.l,
            m: d.m,
            lambda: d.lambda,
        });
    }
    let witnesses: [Witness; 2] = witnesses.try_into().expect("two witnesses");
    let families: [SolutionFamily; 2] = families.try_into().expect("two families");
    Ok(SignChangeCertificate {
        poly: *poly,
        a0,
        witnesses,
        families,
        metadata: CertificateMetadata {
            n_limit,
            scan_start,
            members_beyond: options.members_beyond,
        },
    })
}

/// Result of re-checking a certificate; valid iff `failures` is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub failures: Vec<String>,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, reason: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(reason());
        }
    }
}

/// Recomputes every claim in the certificate from scratch.
pub fn verify_certificate(cert: &SignChangeCertificate) -> Verification {
    let mut v = Verification::default();
    let poly = &cert.poly;

    match compute_a0(poly) {
        Ok(a0) => v.check(a0 == cert.a0, || {
            format!("A0 is {a0}, certificate says {}", cert.a0)
        }),
        Err(e) => v.check(false, || format!("A0: {e}")),
    }
    v.check(cert.witnesses[0].lambda != cert.witnesses[1].lambda, || {
        "witness signs are equal".to_string()
    });

    for (i, (w, fam)) in cert.witnesses.iter().zip(&cert.families).enumerate() {
        let n = BigInt::from(w.n);
        let l = BigInt::from(w.l.clone());
        let m = BigInt::from(w.m.clone());
        v.check(u128::from(w.n) >= cert.a0, || {
            format!("witness {i}: n = {} < A0", w.n)
        });
        v.check(poly.eval(&n) == BigInt::from(w.value.clone()), || {
            format!("witness {i}: f({}) != {}", w.n, w.value)
        });
        v.check(verify_member(poly, &l, &n, &m), || {
            format!(
                "witness {i}: f({}) != l*m^2 with l = {}, m = {}",
                w.n, w.l, w.m
            )
        });
        match factorize(&l) {
            Ok(f) => {
                v.check(f.factors().values().all(|&e| e == 1), || {
                    format!("witness {i}: l = {} is not squarefree", w.l)
                });
                v.check(Sign::from_parity(f.big_omega()) == w.lambda, || {
                    format!("witness {i}: lambda(l) != {}", w.lambda)
                });
            }
            Err(e) => v.check(false, || format!("witness {i}: cannot factor l: {e}")),
        }
        v.check(!is_perfect_square(&(BigInt::from(poly.a()) * &l)), || {
            format!("witness {i}: a*l is a perfect square")
        });
        verify_family(
            &mut v,
            i,
            poly,
            w,
            fam,
            cert.metadata.n_limit,
            cert.metadata.members_beyond,
        );
    }
    v
}

fn verify_family(
    v: &mut Verification,
    i: usize,
    poly: &QuadraticPoly,
    w: &Witness,
    fam: &SolutionFamily,
    n_limit: u64,
    beyond: usize,
) {
    let seed = fam.seed();
    v.check(seed.poly() == poly, || {
        format!("family {i}: seed polynomial differs")
    });
    v.check(seed.l() == &w.l, || {
        format!("family {i}: l differs from witness")
    });
    v.check(seed.n0() == &BigInt::from(w.n), || {
        format!("family {i}: n0 differs from witness")
    });
    v.check(seed.m0() == &w.m, || {
        format!("family {i}: m0 differs from witness")
    });
    v.check(
        seed.t0() == &(BigInt::from(2 * poly.a()) * BigInt::from(w.n) + poly.b()),
        || format!("family {i}: t0 != 2a*n0 + b"),
    );
    match family_pell_modulus(poly, &w.l) {
        Ok(pn) => {
            v.check(fam.pell_modulus() == &pn, || {
                format!("family {i}: pellN != 16a^3 l")
            });
            match pell_fundamental(&pn) {
                Ok(f) => v.check(
                    f.x() == fam.fundamental().x() && f.y() == fam.fundamental().y(),
                    || format!("family {i}: fundamental solution is not the minimal one"),
                ),
                Err(e) => v.check(false, || format!("family {i}: {e}")),
            }
        }
        Err(e) => v.check(false, || format!("family {i}: {e}")),
    }
    let l = BigInt::from(w.l.clone());
    for mem in fam.members() {
        v.check(!mem.n.is_zero() && !mem.m.is_zero(), || {
            format!("family {i}: member ({}, {}) is not positive", mem.n, mem.m)
        });
        v.check(
            verify_member(
                poly,
                &l,
                &BigInt::from(mem.n.clone()),
                &BigInt::from(mem.m.clone()),
            ),
            || format!("family {i}: f({}) != l*{}^2", mem.n, mem.m),
        );
    }
    v.check(fam.members().windows(2).all(|p| p[0].n < p[1].n), || {
        format!("family {i}: members not strictly increasing")
    });
    let past = fam
        .members()
        .iter()
        .filter(|m| m.n > BigUint::from(n_limit))
        .count();
    v.check(past >= beyond, || {
        format!("family {i}: {past} members past n_limit, need {beyond}")
    });
}

/// What the monic search found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicReport {
    /// `n` values for which `f(n)·f(n+1) = f(f(n)+n)` was checked.
    pub identity_checked: RangeInclusive<u64>,
    /// First `n0 >= A0` with `f(n0) >= 1` and `λ(f(n0)) = -1`.
    pub witness: Option<u64>,
}

/// For monic `f`: checks `f(n)·f(n+1) = f(f(n)+n)` on `1..=min(n_limit, 1000)`
/// and looks for `n0` in `[A0, n_limit]` with `λ(f(n0)) = -1`. Such an `n0`
/// means the sign changes infinitely often; `None` means every scanned value
/// had `λ = +1`.
pub fn monic_witness_conclude(poly: &QuadraticPoly, n_limit: u64) -> Result<MonicReport> {
    if poly.a() != 1 {
        return Err(Error::NotMonic(poly.a()));
    }
    let cap = n_limit.min(MONIC_IDENTITY_CAP);
    for n in 1..=cap {
        if !monic_identity_holds(poly, &BigInt::from(n)) {
            return Err(Error::Defect(format!("f(n)f(n+1) != f(f(n)+n) at n = {n}")));
        }
    }
    let a0 = compute_a0(poly)?;
    let mut witness = None;
    if let Ok(start) = u64::try_from(a0) {
        for n in start..=n_limit {
            let value = poly.eval(&BigInt::from(n));
            if value.is_positive() && lambda_point(&value)? == Sign::Minus {
                witness = Some(n);
                break;
            }
        }
    }
    Ok(MonicReport {
        identity_checked: 1..=cap,
        witness,
    })
}

/// `f(n)·f(n+1) = f(f(n) + n)`.
pub fn monic_identity_holds(poly: &QuadraticPoly, n: &BigInt) -> bool {
    let fn_ = poly.eval(n);
    poly.eval(n) * poly.eval(&(n + BigInt::one())) == poly.eval(&(fn_ + n))
}

/// Solutions of `f(n) = l·m²` for `f = p·x² + b·x + c`, `p` prime and
/// `D = q² > 0`: each Pell solution `X² - 4pl·Y² = 1` yields the candidates
/// `n = (-b ± qX) / (2p)`, `m = qY`, kept when `n` is a positive integer and
/// the equation holds.
pub fn prime_square_disc_solutions(
    poly: &QuadraticPoly,
    l: &BigUint,
    count: usize,
) -> Result<Vec<FamilyMember>> {
    prime_square_disc_solutions_with_budget(poly, l, count, DEFAULT_PELL_BUDGET)
}

pub fn prime_square_disc_solutions_with_budget(
    poly: &QuadraticPoly,
    l: &BigUint,
    count: usize,
    budget: usize,
) -> Result<Vec<FamilyMember>> {
    let p = poly.a();
    if !is_prime(&BigInt::from(p)) {
        return Err(Error::LeadingNotPrime(p));
    }
    let disc = BigInt::from(poly.discriminant());
    if !disc.is_positive() || !is_perfect_square(&disc) {
        return Err(Error::DiscriminantNotSquare(poly.discriminant()));
    }
    if l.is_zero() {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    let q = disc.sqrt();
    let modulus = BigUint::from(4u32) * BigUint::from(p.unsigned_abs()) * l;
    if is_perfect_square(&BigInt::from(modulus.clone())) {
        return Err(Error::PellDegenerate(modulus.into()));
    }
    let fund = pell_fundamental(&modulus)?;
    let two_p = BigInt::from(2 * p);
    let l_int = BigInt::from(l.clone());
    let mut out: Vec<FamilyMember> = Vec::new();
    for sol in fund.powers().take(budget) {
        let qx = &q * BigInt::from(sol.x().clone());
        let m = &q * BigInt::from(sol.y().clone());
        for num in [&qx - poly.b(), -&qx - poly.b()] {
            if !num.is_positive() || !(&num % &two_p).is_zero() {
                continue;
            }
            let n = &num / &two_p;
            if verify_member(poly, &l_int, &n, &m) {
                out.push(FamilyMember {
                    n: n.magnitude().clone(),
                    m: m.magnitude().clone(),
                });
            }
        }
        if out.len() >= count {
            out.truncate(count);
            return Ok(out);
        }
    }
    if out.is_empty() {
        return Err(Error::NoIntegralSolution(budget));
    }
    Ok(out)
}

/// Convenience for callers holding machine integers.
pub fn decompose_value_u64(poly: &QuadraticPoly, n: u64) -> Result<(u64, u64, Sign)> {
    let d = decompose_value(poly, &BigInt::from(n))?;
    match (d.l.to_u64(), d.m.to_u64()) {
        (Some(l), Some(m)) => Ok((l, m, d.lambda)),
        _ => Err(Error::Defect(format!(
            "decomposition of f({n}) exceeds u64"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(a: i64, b: i64, c: i64) -> QuadraticPoly {
        QuadraticPoly::new(a, b, c).unwrap()
    }

    fn bu(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn certificate(p: QuadraticPoly, limit: u64) -> SignChangeCertificate {
        match scan_certificate(&p, limit).unwrap() {
            ScanOutcome::Certificate(c) => *c,
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn a0_examples() {
        assert_eq!(compute_a0(&poly(1, 1, 0)).unwrap(), 2);
        assert_eq!(compute_a0(&poly(1, 0, 1)).unwrap(), 2);
        assert_eq!(compute_a0(&poly(2, 3, 1)).unwrap(), 2);
        assert_eq!(compute_a0(&poly(1, 3, 2)).unwrap(), 3);
        assert!(matches!(
            compute_a0(&poly(1, 2, 1)),
            Err(Error::ExcludedForm)
        ));
    }

    #[test]
    fn a0_matches_rational_definition() {
        // floor((|b| + (|D|+1)/2) / (2a)) + 1 evaluated with fractions over 4a.
        for a in 1..=6i64 {
            for b in -15..=15i64 {
                for c in -15..=15i64 {
                    let p = poly(a, b, c);
                    if p.discriminant() == 0 {
                        continue;
                    }
                    let d = p.discriminant().unsigned_abs() as f64;
                    let expect =
                        ((b.abs() as f64 + (d + 1.0) / 2.0) / (2.0 * a as f64)).floor() as u128 + 1;
                    assert_eq!(compute_a0(&p).unwrap(), expect, "{p}");
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            decompose_value_u64(&poly(1, 1, 0), 49).unwrap(),
            (2, 35, Sign::Minus)
        );
        assert_eq!(
            decompose_value_u64(&poly(1, 0, 1), 1).unwrap(),
            (2, 1, Sign::Minus)
        );
        assert_eq!(
            decompose_value_u64(&poly(1, 1, 0), 1).unwrap(),
            (2, 1, Sign::Minus)
        );
        assert!(matches!(
            decompose_value(&poly(1, 0, -4), &BigInt::from(1)),
            Err(Error::NotPositive(_))
        ));
        assert!(decompose_value(&poly(1, 0, -4), &BigInt::from(2)).is_err());
    }

    #[test]
    fn scan_examples() {
        let c = certificate(poly(1, 0, 1), 100);
        let w: Vec<_> = c
            .witnesses
            .iter()
            .map(|w| (w.n, w.l.clone(), w.lambda))
            .collect();
        assert_eq!(w, vec![(2, bu(5), Sign::Minus), (3, bu(10), Sign::Plus)]);
        assert!(verify_certificate(&c).is_valid());

        let c = certificate(poly(1, 1, 0), 100);
        let w: Vec<_> = c
            .witnesses
            .iter()
            .map(|w| (w.n, w.l.clone(), w.lambda))
            .collect();
        assert_eq!(w, vec![(2, bu(6), Sign::Plus), (3, bu(3), Sign::Minus)]);
        assert!(verify_certificate(&c).is_valid());

        assert!(matches!(
            scan_certificate(&poly(1, 2, 1), 100),
            Err(Error::ExcludedForm)
        ));
    }

    #[test]
    fn constant_scan() {
        // A0 = 2 for x^2 + 1; only n = 2 scanned.
        match scan_certificate(&poly(1, 0, 1), 2).unwrap() {
            ScanOutcome::ConstantSoFar {
                sign,
                range,
                skipped,
            } => {
                assert_eq!(sign, Some(Sign::Minus));
                assert_eq!(range, 2..=2);
                assert_eq!(skipped, 0);
            }
            other => panic!("{other:?}"),
        }
        match scan_certificate(&poly(1, 0, 1), 1).unwrap() {
            ScanOutcome::ConstantSoFar { sign, .. } => assert_eq!(sign, None),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn families_reach_past_horizon() {
        for p in [poly(1, 0, 1), poly(1, 1, 0), poly(2, 3, 1), poly(3, -5, -7)] {
            let c = certificate(p, 100);
            for fam in &c.families {
                let past = fam.members().iter().filter(|m| m.n > bu(100)).count();
                assert!(past >= 3, "{p}");
            }
        }
    }

    #[test]
    fn corrupted_certificates_fail() {
        let c = certificate(poly(1, 0, 1), 100);

        let mut bad = c.clone();
        bad.witnesses[0].m += 1u32;
        let v = verify_certificate(&bad);
        assert!(!v.is_valid());

        let mut bad = c.clone();
        bad.witnesses[1].lambda = bad.witnesses[0].lambda;
        assert!(!verify_certificate(&bad).is_valid());

        let mut bad = c.clone();
        bad.a0 = 1;
        assert!(!verify_certificate(&bad).is_valid());

        let mut bad = c;
        bad.families[1].members[2].m += 1u32;
        let v = verify_certificate(&bad);
        assert_eq!(v.failures.len(), 1, "{:?}", v.failures);
    }

    #[test]
    fn monic_examples() {
        let p = poly(1, 0, 1);
        assert_eq!(p.eval_i64(1) * p.eval_i64(2), p.eval_i64(3));
        let r = monic_witness_conclude(&p, 10).unwrap();
        assert_eq!(r.witness, Some(2));
        assert_eq!(r.identity_checked, 1..=10);

        // (x+1)(x+2): A0 = 3, f(3) = 20 and λ(20) = -1.
        let r = monic_witness_conclude(&poly(1, 3, 2), 10).unwrap();
        assert_eq!(r.witness, Some(3));

        assert!(matches!(
            monic_witness_conclude(&poly(2, 0, 1), 10),
            Err(Error::NotMonic(2))
        ));
    }

    #[test]
    fn monic_identity_grid() {
        for b in -20..=20 {
            for c in -20..=20 {
                let p = poly(1, b, c);
                for n in 1..=200 {
                    assert!(monic_identity_holds(&p, &BigInt::from(n)), "{p} at {n}");
                }
            }
        }
    }

    #[test]
    fn prime_square_examples() {
        let p = poly(2, 3, 1);
        let six = prime_square_disc_solutions(&p, &bu(6), 3).unwrap();
        assert_eq!(six[0], FamilyMember { n: bu(1), m: bu(1) });
        let five = prime_square_disc_solutions(&p, &bu(5), 3).unwrap();
        assert_eq!(five[0], FamilyMember { n: bu(4), m: bu(3) });
        for (l, sols) in [(6, &six), (5, &five)] {
            for s in sols.iter() {
                assert!(verify_member(
                    &p,
                    &BigInt::from(l),
                    &s.n.clone().into(),
                    &s.m.clone().into()
                ));
            }
        }
        assert!(matches!(
            prime_square_disc_solutions(&p, &bu(2), 3),
            Err(Error::PellDegenerate(_))
        ));
        assert!(matches!(
            prime_square_disc_solutions(&p, &bu(4), 3),
            Err(Error::NoIntegralSolution(_))
        ));
        assert!(matches!(
            prime_square_disc_solutions(&p, &bu(3), 3),
            Err(Error::NoIntegralSolution(_))
        ));
        assert!(matches!(
            prime_square_disc_solutions(&poly(4, 3, 0), &bu(5), 3),
            Err(Error::LeadingNotPrime(4))
        ));
        assert!(matches!(
            prime_square_disc_solutions(&poly(2, 0, 1), &bu(5), 3),
            Err(Error::DiscriminantNotSquare(-8))
        ));
    }

    #[test]
    fn a_l_never_square_past_a0() {
        for a in 1..=4i64 {
            for b in -12..=12i64 {
                for c in -12..=12i64 {
                    let p = poly(a, b, c);
                    let Ok(a0) = compute_a0(&p) else { continue };
                    for n in a0 as u64..a0 as u64 + 30 {
                        let d = decompose_value(&p, &BigInt::from(n)).unwrap();
                        let al = BigInt::from(a) * BigInt::from(d.l);
                        assert!(!is_perfect_square(&al), "{p} at n = {n}");
                    }
                }
            }
        }
    }
}
