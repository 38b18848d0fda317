//! Infinite families of solutions of `f(n) = l·m²` grown from a single seed.
//!
//! With `t = 2a·n + b` the equation becomes `t² - 4al·m² = D`. For every
//! solution `(r, s)` of `r² - 16a³l·s² = 1` the map
//!
//! ```text
//! m' = (r² + 16a³l·s²)·m0 + 4a·r·s·t0
//! t' = (r² + 16a³l·s²)·t0 + 16a²l·r·s·m0
//! ```
//!
//! sends a solution `(t0, m0)` to another one with `m' ≡ m0` and
//! `t' ≡ t0 (mod 2a)`, so `n' = (t' - b)/(2a)` stays integral. The multiplier
//! `(r² + 16a³l·s²) + 4ars·√(4al)` is the square of `r + 4as·√(al)` and has
//! norm `(r² - 16a³l·s²)² = 1`.
//!
//! Every member emitted here has been checked against `f(n) = l·m²` directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer::is_perfect_square;
use crate::pell::{pell_fundamental, PellSolution};

/// Number of Pell solutions tried before family generation is declared stuck.
pub const DEFAULT_PELL_BUDGET: usize = 64;

/// `f(x) = a·x² + b·x + c` with `a >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct QuadraticPoly {
    a: i64,
    b: i64,
    c: i64,
    discriminant: i128,
}

#[derive(Serialize, Deserialize)]
// Field order is the sorted key order of the canonical JSON.
struct PolyRepr {
    #[serde(rename = "D")]
    d: i128,
    a: i64,
    b: i64,
    c: i64,
}

impl TryFrom<PolyRepr> for QuadraticPoly {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        let poly = QuadraticPoly::new(r.a, r.b, r.c)?;
        if poly.discriminant != r.d {
            return Err(Error::Certificate(format!(
                "discriminant {} does not match b^2 - 4ac = {}",
                r.d, poly.discriminant
            )));
        }
        Ok(poly)
    }
}

impl From<QuadraticPoly> for PolyRepr {
    fn from(p: QuadraticPoly) -> Self {
        PolyRepr {
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.discriminant,
        }
    }
}

impl QuadraticPoly {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a < 1 {
            return Err(Error::LeadingCoefficient(a));
        }
        let (a128, b128, c128) = (i128::from(a), i128::from(b), i128::from(c));
        let discriminant = b128
            .checked_mul(b128)
            .zip(a128.checked_mul(c128).and_then(|ac| ac.checked_mul(4)))
            .and_then(|(bb, ac4)| bb.checked_sub(ac4))
            .ok_or(Error::DiscriminantOverflow)?;
        Ok(QuadraticPoly {
            a,
            b,
            c,
            discriminant,
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// `D = b² - 4ac`.
    pub fn discriminant(&self) -> i128 {
        self.discriminant
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        (n * self.a + self.b) * n + self.c
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }
}

impl FromStr for QuadraticPoly {
    type Err = String;

    /// Parses `"a,b,c"`; whitespace around the numbers is ignored.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(format!(
                "expected three comma-separated integers a,b,c, got {s:?}"
            ));
        };
        let parse = |name: &str, v: &str| {
            v.parse::<i64>()
                .map_err(|e| format!("coefficient {name} = {v:?}: {e}"))
        };
        QuadraticPoly::new(parse("a", a)?, parse("b", b)?, parse("c", c)?)
            .map_err(|e| e.to_string())
    }
}

impl fmt::Display for QuadraticPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.a {
            1 => write!(f, "x^2")?,
            a => write!(f, "{a}x^2")?,
        }
        match self.b {
            0 => {}
            1 => write!(f, " + x")?,
            -1 => write!(f, " - x")?,
            b if b < 0 => write!(f, " - {}x", b.unsigned_abs())?,
            b => write!(f, " + {b}x")?,
        }
        match self.c {
            0 => Ok(()),
            c if c < 0 => write!(f, " - {}", c.unsigned_abs()),
            c => write!(f, " + {c}"),
        }
    }
}

/// `t0 = 2a·n0 + b`, so that `t0 ≡ b (mod 2a)` and `n0 = (t0 - b)/(2a)`.
pub fn derive_t0(poly: &QuadraticPoly, n0: &BigInt) -> BigInt {
    n0 * (2 * poly.a) + poly.b
}

/// `f(n) = l·m²` in exact arithmetic.
pub fn verify_member(poly: &QuadraticPoly, l: &BigInt, n: &BigInt, m: &BigInt) -> bool {
    poly.eval(n) == l * m * m
}

/// One known solution `f(n0) = l·m0²`, with `t0 = 2a·n0 + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSolution {
    poly: QuadraticPoly,
    l: BigUint,
    n0: BigInt,
    m0: BigUint,
    t0: BigInt,
}

impl SeedSolution {
    pub fn new(poly: QuadraticPoly, l: BigUint, n0: BigInt, m0: BigUint) -> Result<Self> {
        if l.is_zero() {
            return Err(Error::InvalidSeed("l must be positive".into()));
        }
        let (l_int, m_int) = (BigInt::from(l.clone()), BigInt::from(m0.clone()));
        if !verify_member(&poly, &l_int, &n0, &m_int) {
            return Err(Error::InvalidSeed(format!(
                "f({n0}) = {} but l*m0^2 = {}",
                poly.eval(&n0),
                &l_int * &m_int * &m_int
            )));
        }
        let t0 = derive_t0(&poly, &n0);
        let rhs =
            BigInt::from(poly.discriminant) + BigInt::from(4 * poly.a) * &l_int * &m_int * &m_int;
        if &t0 * &t0 != rhs {
            return Err(Error::Defect(format!("t0^2 != D + 4al*m0^2 for n0 = {n0}")));
        }
        Ok(SeedSolution {
            poly,
            l,
            n0,
            m0,
            t0,
        })
    }

    /// No checks; used when reading certificates that are verified separately.
    pub(crate) fn from_parts_unchecked(
        poly: QuadraticPoly,
        l: BigUint,
        n0: BigInt,
        m0: BigUint,
        t0: BigInt,
    ) -> Self {
        SeedSolution {
            poly,
            l,
            n0,
            m0,
            t0,
        }
    }

    pub fn poly(&self) -> &QuadraticPoly {
        &self.poly
    }

    pub fn l(&self) -> &BigUint {
        &self.l
    }

    pub fn n0(&self) -> &BigInt {
        &self.n0
    }

    pub fn m0(&self) -> &BigUint {
        &self.m0
    }

    pub fn t0(&self) -> &BigInt {
        &self.t0
    }
}

/// Scans `n = 1, 2, ..., n_max` for the first `n` with `f(n) > 0` and
/// `f(n)/l` a perfect square. Roots of `f` are skipped: an `m0 = 0` seed
/// need not produce any positive member.
pub fn find_seed(poly: &QuadraticPoly, l: &BigUint, n_max: u64) -> Result<Option<SeedSolution>> {
    if l.is_zero() {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    let l_int = BigInt::from(l.clone());
    for n in 1..=n_max {
        let n = BigInt::from(n);
        let v = poly.eval(&n);
        if !v.is_positive() {
            continue;
        }
        let (q, r) = v.div_rem(&l_int);
        if r.is_zero() && is_perfect_square(&q) {
            let m0 = q.magnitude().sqrt();
            return SeedSolution::new(*poly, l.clone(), n, m0).map(Some);
        }
    }
    Ok(None)
}

/// Which signs of `(t0, m0)` are fed through the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub negate_t0: bool,
    pub negate_m0: bool,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch {
            negate_t0: false,
            negate_m0: false,
        },
        Branch {
            negate_t0: true,
            negate_m0: false,
        },
        Branch {
            negate_t0: false,
            negate_m0: true,
        },
        Branch {
            negate_t0: true,
            negate_m0: true,
        },
    ];
}

/// Raw output of the closed forms, before sign normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub branch: Branch,
    pub m: BigInt,
    pub t: BigInt,
}

/// Applies the closed forms to one branch of the seed.
pub fn transform(seed: &SeedSolution, r: &BigInt, s: &BigInt, branch: Branch) -> Candidate {
    let a = BigInt::from(seed.poly.a);
    let l = BigInt::from(seed.l.clone());
    let mut t0 = seed.t0.clone();
    let mut m0 = BigInt::from(seed.m0.clone());
    if branch.negate_t0 {
        t0 = -t0;
    }
    if branch.negate_m0 {
        m0 = -m0;
    }
    let a2l = &a * &a * &l;
    let a3l = &a2l * &a;
    let rr = r * r;
    let ss = s * s;
    let rs = r * s;
    let m = &rr * &m0 + 16 * &a3l * &ss * &m0 + 4 * &a * &rs * &t0;
    let t = &rr * &t0 + 16 * &a2l * &rs * &m0 + 16 * &a3l * &ss * &t0;
    Candidate { branch, m, t }
}

/// A verified positive solution `f(n) = l·m²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyMember {
    pub n: BigUint,
    pub m: BigUint,
}

/// `m ← |m|`, then each sign of `t` giving a positive integral
/// `n = (t - b)/(2a)` that satisfies the equation.
fn normalize(poly: &QuadraticPoly, l: &BigInt, cand: &Candidate) -> Vec<FamilyMember> {
    if cand.m.is_zero() {
        return Vec::new();
    }
    let m = cand.m.abs();
    let two_a = BigInt::from(2 * poly.a);
    let mut out = Vec::new();
    for t in [cand.t.clone(), -cand.t.clone()] {
        let num = t - poly.b;
        if num.sign() != Sign::Plus {
            continue;
        }
        let (n, rem) = num.div_rem(&two_a);
        if rem.is_zero() && verify_member(poly, l, &n, &m) {
            out.push(FamilyMember {
                n: n.into_parts().1,
                m: m.magnitude().clone(),
            });
        }
    }
    out
}

/// Seed plus verified members for the Pell modulus `N = 16a³l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFamily {
    pub(crate) seed: SeedSolution,
    pub(crate) pell_modulus: BigUint,
    pub(crate) fundamental: PellSolution,
    pub(crate) members: Vec<FamilyMember>,
}

impl SolutionFamily {
    pub fn seed(&self) -> &SeedSolution {
        &self.seed
    }

    /// `16a³l`.
    pub fn pell_modulus(&self) -> &BigUint {
        &self.pell_modulus
    }

    pub fn fundamental(&self) -> &PellSolution {
        &self.fundamental
    }

    /// Sorted by strictly increasing `n`.
    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }
}

/// `16a³l`, or an error if it is a perfect square.
pub fn family_pell_modulus(poly: &QuadraticPoly, l: &BigUint) -> Result<BigUint> {
    let a = BigUint::from(poly.a.unsigned_abs());
    let n = BigUint::from(16u32) * &a * &a * &a * l;
    if is_perfect_square(&BigInt::from(n.clone())) {
        return Err(Error::PellDegenerate(n.into()));
    }
    Ok(n)
}

/// The first `count` members by `n`.
pub fn generate_family(seed: &SeedSolution, count: usize) -> Result<SolutionFamily> {
    generate_family_with_budget(seed, count, DEFAULT_PELL_BUDGET)
}

pub fn generate_family_with_budget(
    seed: &SeedSolution,
    count: usize,
    budget: usize,
) -> Result<SolutionFamily> {
    build_family(seed, budget, |_| count)
}

/// All members with `n <= horizon` plus the first `beyond` members past it.
pub fn generate_family_past(
    seed: &SeedSolution,
    horizon: &BigUint,
    beyond: usize,
) -> Result<SolutionFamily> {
    generate_family_past_with_budget(seed, horizon, beyond, DEFAULT_PELL_BUDGET)
}

pub fn generate_family_past_with_budget(
    seed: &SeedSolution,
    horizon: &BigUint,
    beyond: usize,
    budget: usize,
) -> Result<SolutionFamily> {
    build_family(seed, budget, |members| {
        members.range(..=horizon.clone()).count() + beyond
    })
}

fn build_family(
    seed: &SeedSolution,
    budget: usize,
    target: impl Fn(&BTreeMap<BigUint, BigUint>) -> usize,
) -> Result<SolutionFamily> {
    let poly = seed.poly;
    if poly.discriminant == 0 {
        return Err(Error::ExcludedForm);
    }
    let pell_modulus = family_pell_modulus(&poly, &seed.l)?;
    let fundamental = pell_fundamental(&pell_modulus)?;
    let l = BigInt::from(seed.l.clone());
    let two_a = BigInt::from(2 * poly.a);
    let b_abs = BigInt::from(poly.b.unsigned_abs());

    let mut members: BTreeMap<BigUint, BigUint> = BTreeMap::new();
    let record =
        |r: &BigInt, s: &BigInt, members: &mut BTreeMap<BigUint, BigUint>| -> Vec<BigInt> {
            Branch::ALL
                .iter()
                .map(|&branch| {
                    let cand = transform(seed, r, s, branch);
                    for member in normalize(&poly, &l, &cand) {
                        members.insert(member.n, member.m);
                    }
                    cand.t.abs()
                })
                .collect()
        };

    // (r, s) = (1, 0) reproduces the seed.
    let mut previous = record(&BigInt::one(), &BigInt::zero(), &mut members);
    let mut settled = false;
    for sol in fundamental.powers().take(budget) {
        let r = BigInt::from(sol.x().clone());
        let s = BigInt::from(sol.y().clone());
        let current = record(&r, &s, &mut members);

        // |t| along each branch is valley-shaped in the Pell index, so once
        // every branch is climbing, later indices only give n above this floor.
        let climbing = current.iter().zip(&previous).all(|(c, p)| c > p);
        let floor = current.iter().min().map(|t| (t - &b_abs) / &two_a);
        previous = current;
        let want = target(&members);
        if climbing && members.len() >= want {
            let nth = members
                .keys()
                .nth(want.saturating_sub(1))
                .map(|n| BigInt::from(n.clone()));
            if want == 0 || matches!((&floor, &nth), (Some(f), Some(n)) if f > n) {
                settled = true;
                break;
            }
        }
    }

    let want = target(&members);
    if members.len() < want {
        return Err(Error::FamilyBudgetExhausted {
            found: members.len(),
            wanted: want,
            budget,
        });
    }
    if !settled {
        // Enough members, but smaller ones could still appear later.
        return Err(Error::Defect(format!(
            "family ordering not settled within {budget} Pell indices"
        )));
    }
    let members = members
        .into_iter()
        .take(want)
        .map(|(n, m)| FamilyMember { n, m })
        .collect();
    Ok(SolutionFamily {
        seed: seed.clone(),
        pell_modulus,
        fundamental,
        members,
    })
}
