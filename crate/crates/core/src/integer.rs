//! Exact integer primitives shared by the rest of the crate.
//!
//! Everything here works on arbitrary-precision values, with a 64-bit fast
//! path where the input fits. Primality is deterministic below
//! [`DETERMINISTIC_PRIME_BOUND`]; above it the Miller-Rabin test adds
//! [`RANDOM_ROUNDS`] pseudo-random bases, for an error probability of at most
//! `4^-40 = 2^-80` on top of the fixed-base rounds.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Miller-Rabin with the first thirteen primes as bases is exact below this
/// value (Sorenson and Webster, 2015).
pub const DETERMINISTIC_PRIME_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

/// Extra random Miller-Rabin rounds used above [`DETERMINISTIC_PRIME_BOUND`].
pub const RANDOM_ROUNDS: usize = 40;

/// Default number of Pollard rho iterations spent on a single value.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 22;

/// Default number of progression terms examined by [`find_prime_in_progression`].
pub const DEFAULT_PRIME_SEARCH_BUDGET: u64 = 1 << 24;

const TRIAL_LIMIT: usize = 1 << 16;
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Primes below 2^16, built once on first use.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; TRIAL_LIMIT + 1];
        let mut primes = Vec::with_capacity(6542);
        for i in 2..=TRIAL_LIMIT {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= TRIAL_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// `floor(sqrt(n))`. Negative input is rejected.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.sign() == Sign::Minus {
        return Err(Error::NegativeInput(n.clone()));
    }
    Ok(n.sqrt())
}

/// True iff `n >= 0` and `n` is the square of an integer.
pub fn is_perfect_square(n: &BigInt) -> bool {
    match n.to_biguint() {
        Some(u) => is_square_biguint(&u),
        None => false,
    }
}

pub(crate) fn is_square_biguint(n: &BigUint) -> bool {
    // Squares mod 64 fall in 12 residue classes; reject the rest cheaply.
    let low = n.iter_u64_digits().next().unwrap_or(0) & 63;
    if (0x0202_0213_0203_0213u64 >> low) & 1 == 0 {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: BigUint,
    factors: BTreeMap<BigUint, u32>,
}

impl Factorization {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Prime to exponent map; empty for 1.
    pub fn factors(&self) -> &BTreeMap<BigUint, u32> {
        &self.factors
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.values().map(|&e| u64::from(e)).sum()
    }

    /// Splits the value as `l * m^2` with `l` squarefree.
    pub fn squarefree_parts(&self) -> (BigUint, BigUint) {
        let mut l = BigUint::one();
        let mut m = BigUint::one();
        for (p, &e) in &self.factors {
            if e % 2 == 1 {
                l *= p;
            }
            m *= p.pow(e / 2);
        }
        (l, m)
    }

    /// Product of `p^e` over all entries.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e))
    }
}

/// Trial division followed by Brent's variant of Pollard rho, with a cap on
/// the number of rho iterations spent per input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorizer {
    pub rho_budget: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer {
            rho_budget: DEFAULT_RHO_BUDGET,
        }
    }
}

impl Factorizer {
    pub fn new(rho_budget: u64) -> Self {
        Factorizer { rho_budget }
    }

    pub fn factorize(&self, n: &BigInt) -> Result<Factorization> {
        let value = match n.to_biguint() {
            Some(v) if !v.is_zero() => v,
            _ => return Err(Error::NotPositive(n.clone())),
        };
        let mut factors = BTreeMap::new();
        if let Some(small) = value.to_u64() {
            for (p, e) in self.factor_u64(small)? {
                factors.insert(BigUint::from(p), e);
            }
            return Ok(Factorization { value, factors });
        }

        let mut rest = value.clone();
        for &p in small_primes() {
            let p = u64::from(p);
            if rest.to_u64().is_some() || BigUint::from(p * p) > rest {
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&BigUint::from(p));
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.insert(BigUint::from(p), e);
            }
        }

        let mut budget = self.rho_budget;
        let mut pending = vec![rest];
        while let Some(x) = pending.pop() {
            if x.is_one() {
                continue;
            }
            if let Some(small) = x.to_u64() {
                for (p, e) in self.factor_u64_with(small, &mut budget, n)? {
                    *factors.entry(BigUint::from(p)).or_insert(0) += e;
                }
            } else if is_prime_biguint(&x) {
                *factors.entry(x).or_insert(0) += 1;
            } else {
                let d = split_biguint(&x, &mut budget).ok_or_else(|| self.gave_up(n))?;
                let q = &x / &d;
                pending.push(d);
                pending.push(q);
            }
        }
        Ok(Factorization { value, factors })
    }

    /// Factors a machine-sized value, returning `(prime, exponent)` pairs in
    /// ascending order.
    pub fn factor_u64(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut budget = self.rho_budget;
        self.factor_u64_with(n, &mut budget, &BigInt::from(n))
    }

    fn factor_u64_with(
        &self,
        n: u64,
        budget: &mut u64,
        original: &BigInt,
    ) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::NotPositive(BigInt::zero()));
        }
        let mut out: BTreeMap<u64, u32> = BTreeMap::new();
        let mut rest = n;
        for &p in &small_primes()[..172] {
            // primes below 1024
            let p = u64::from(p);
            if p * p > rest {
                break;
            }
            while rest.is_multiple_of(p) {
                rest /= p;
                *out.entry(p).or_insert(0) += 1;
            }
        }
        let mut pending = vec![rest];
        while let Some(x) = pending.pop() {
            if x == 1 {
                continue;
            }
            if x < 1024 * 1024 || is_prime_u64(x) {
                *out.entry(x).or_insert(0) += 1;
                continue;
            }
            let d = split_u64(x, budget).ok_or_else(|| self.gave_up(original))?;
            pending.push(d);
            pending.push(x / d);
        }
        Ok(out.into_iter().collect())
    }

    fn gave_up(&self, n: &BigInt) -> Error {
        Error::FactoringGaveUp {
            value: n.clone(),
            iterations: self.rho_budget,
        }
    }
}

/// Factors `n >= 1` with the default budget.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    Factorizer::default().factorize(n)
}

/// `n = l * m^2` with `l` squarefree.
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigUint, BigUint)> {
    Ok(factorize(n)?.squarefree_parts())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary integers; see the module docs for the error bound.
pub fn is_prime(n: &BigInt) -> bool {
    match n.to_biguint() {
        Some(u) => match u.to_u64() {
            Some(small) => is_prime_u64(small),
            None => is_prime_biguint(&u),
        },
        None => false,
    }
}

fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &small_primes()[..172] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let strong_probable_prime = |a: &BigUint| {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };
    if !MR_BASES
        .iter()
        .all(|&a| strong_probable_prime(&BigUint::from(a)))
    {
        return false;
    }
    if n.to_u128().is_some_and(|v| v < DETERMINISTIC_PRIME_BOUND) {
        return true;
    }
    // Seeded from the input so repeated calls agree.
    let seed = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15u64, |h, w| {
        (h ^ w).wrapping_mul(0x0100_0000_01b3)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    (0..RANDOM_ROUNDS).all(|_| strong_probable_prime(&rng.gen_biguint_range(&two, &n_minus_1)))
}

/// Finds a non-trivial divisor of an odd composite `n` that is not a prime
/// power of a small prime. Returns `None` once the budget is spent.
fn split_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let r = n.sqrt();
    if r * r == n {
        return Some(r);
    }
    for c in 1..u64::MAX {
        match brent_u64(n, c, budget) {
            Rho::Found(d) => return Some(d),
            Rho::Retry => continue,
            Rho::Exhausted => return None,
        }
    }
    None
}

enum Rho<T> {
    Found(T),
    Retry,
    Exhausted,
}

const RHO_BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, budget: &mut u64) -> Rho<u64> {
    let f = |x: u64| ((u128::from(x) * u128::from(x) + u128::from(c)) % u128::from(n)) as u64;
    let (mut y, mut x, mut ys) = (2u64, 2u64, 2u64);
    let mut q = 1u64;
    let mut g = 1u64;
    let mut r = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = RHO_BATCH.min(r - k);
            if *budget < steps {
                return Rho::Exhausted;
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += steps;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        Rho::Retry
    } else {
        Rho::Found(g)
    }
}

fn split_biguint(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let r = n.sqrt();
    if &r * &r == *n {
        return Some(r);
    }
    for c in 1u32.. {
        match brent_biguint(n, &BigUint::from(c), budget) {
            Rho::Found(d) => return Some(d),
            Rho::Retry => continue,
            Rho::Exhausted => return None,
        }
    }
    None
}

fn brent_biguint(n: &BigUint, c: &BigUint, budget: &mut u64) -> Rho<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = RHO_BATCH.min(r - k);
            if *budget < steps {
                return Rho::Exhausted;
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(&y);
                q = q * abs_diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += steps;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if g == *n {
        Rho::Retry
    } else {
        Rho::Found(g)
    }
}

/// Smallest prime `p > 1` of the form `residue + modulus * m` with `m >= 0`.
///
/// Returns `(p, m)`. Dirichlet's theorem guarantees a hit when
/// `gcd(modulus, residue) = 1`; the budget bounds the loop anyway.
pub fn find_prime_in_progression(modulus: u64, residue: u64) -> Result<(u64, u64)> {
    find_prime_in_progression_with_budget(modulus, residue, DEFAULT_PRIME_SEARCH_BUDGET)
}

pub fn find_prime_in_progression_with_budget(
    modulus: u64,
    residue: u64,
    budget: u64,
) -> Result<(u64, u64)> {
    if modulus == 0 {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    if modulus.gcd(&residue) != 1 {
        return Err(Error::ResidueNotCoprime { modulus, residue });
    }
    let exhausted = Error::PrimeSearchExhausted {
        modulus,
        residue,
        budget,
    };
    for m in 0..budget {
        let p = modulus
            .checked_mul(m)
            .and_then(|step| step.checked_add(residue))
            .ok_or_else(|| exhausted.clone())?;
        if p > 1 && is_prime_u64(p) {
            return Ok((p, m));
        }
    }
    Err(exhausted)
}
