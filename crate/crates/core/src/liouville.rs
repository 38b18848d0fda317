//! The Liouville function `λ(n) = (-1)^Ω(n)`, its summatory function and
//! Dirichlet partial sums, plus the minimal sign flip along an arithmetic
//! progression.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integer::{find_prime_in_progression, Factorizer};

/// A value of λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn from_parity(k: u64) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Sign, D::Error> {
        let v = i8::deserialize(deserializer)?;
        Sign::from_i8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// λ and its running sums `L(x)` for `1 <= n <= limit`.
///
/// Memory is one byte per sign plus eight per prefix sum; a limit of `10^9`
/// therefore needs roughly 9 GB.
#[derive(Debug, Clone)]
pub struct LiouvilleSieve {
    limit: u64,
    // index 0 is unused
    values: Vec<i8>,
    prefix: Vec<i64>,
}

impl LiouvilleSieve {
    /// Linear sieve: each composite `n` is reached exactly once, from
    /// `n / spf(n)`, and gets `λ(n) = -λ(n / spf(n))`.
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::EmptySieve);
        }
        let size = usize::try_from(limit).expect("sieve limit exceeds address space");
        let mut values = vec![0i8; size + 1];
        let mut primes: Vec<usize> = Vec::new();
        values[1] = 1;
        for i in 2..=size {
            if values[i] == 0 {
                values[i] = -1;
                primes.push(i);
            }
            let li = values[i];
            for &p in &primes {
                let ip = match i.checked_mul(p) {
                    Some(ip) if ip <= size => ip,
                    _ => break,
                };
                values[ip] = -li;
                if i % p == 0 {
                    break;
                }
            }
        }
        let mut prefix = Vec::with_capacity(size + 1);
        let mut acc = 0i64;
        prefix.push(0);
        for &v in &values[1..] {
            acc += i64::from(v);
            prefix.push(acc);
        }
        Ok(LiouvilleSieve {
            limit,
            values,
            prefix,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn lambda(&self, n: u64) -> Option<Sign> {
        if n == 0 || n > self.limit {
            return None;
        }
        Sign::from_i8(self.values[n as usize])
    }

    /// Signs as `+1`/`-1` bytes; element `i` holds `λ(i + 1)`.
    pub fn values(&self) -> &[i8] {
        &self.values[1..]
    }

    /// Element `i` holds `L(i + 1)`.
    pub fn prefix_sums(&self) -> &[i64] {
        &self.prefix[1..]
    }

    /// `L(x) = Σ_{n<=x} λ(n)`.
    pub fn summatory(&self, x: u64) -> Result<i64> {
        if x == 0 || x > self.limit {
            return Err(Error::OutOfSieveRange {
                x,
                limit: self.limit,
            });
        }
        Ok(self.prefix[x as usize])
    }

    /// `Σ_{n<=x} λ(n) / n^s`, summed in ascending `n` with Neumaier
    /// compensation.
    pub fn dirichlet_partial(&self, s: f64, x: u64) -> Result<f64> {
        if s.is_nan() || s <= 1.0 {
            return Err(Error::ExponentTooSmall(s));
        }
        if x == 0 || x > self.limit {
            return Err(Error::OutOfSieveRange {
                x,
                limit: self.limit,
            });
        }
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (i, &v) in self.values[1..=x as usize].iter().enumerate() {
            let term = f64::from(v) * ((i + 1) as f64).powf(-s);
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        Ok(sum + comp)
    }
}

pub fn build_sieve(limit: u64) -> Result<LiouvilleSieve> {
    LiouvilleSieve::build(limit)
}

pub fn summatory(x: u64, sieve: &LiouvilleSieve) -> Result<i64> {
    sieve.summatory(x)
}

/// Dirichlet partial sum over a fresh sieve of size `x`.
///
/// The distance to `ζ(2s)/ζ(s)` is at most `Σ_{n>x} n^-s`.
pub fn dirichlet_partial(s: f64, x: u64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::ExponentTooSmall(s));
    }
    LiouvilleSieve::build(x)?.dirichlet_partial(s, x)
}

/// `λ(n)` by factorization; no sieve needed.
pub fn lambda_point(n: &BigInt) -> Result<Sign> {
    lambda_point_with(n, &Factorizer::default())
}

pub fn lambda_point_with(n: &BigInt, factorizer: &Factorizer) -> Result<Sign> {
    if n.sign() != num_bigint::Sign::Plus {
        return Err(Error::NotPositive(n.clone()));
    }
    if let Some(small) = n.to_u64() {
        return lambda_u64_with(small, factorizer);
    }
    Ok(Sign::from_parity(factorizer.factorize(n)?.big_omega()))
}

pub(crate) fn lambda_u64(n: u64) -> Result<Sign> {
    lambda_u64_with(n, &Factorizer::default())
}

fn lambda_u64_with(n: u64, factorizer: &Factorizer) -> Result<Sign> {
    if n.is_zero() {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    let omega: u64 = factorizer
        .factor_u64(n)?
        .iter()
        .map(|&(_, e)| u64::from(e))
        .sum();
    Ok(Sign::from_parity(omega))
}

/// Smallest `k >= 1` with `λ(n0 + l*k) != λ(n0)`.
///
/// With `p = l*m + 1` the least prime `≡ 1 (mod l)`, `k = m*n0` gives
/// `n0 + l*k = n0*p` and hence a flip, so the scan never runs past it.
pub fn ap_sign_flip(n0: u64, l: u64) -> Result<u64> {
    if n0 == 0 {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    if l == 0 {
        return Err(Error::NotPositive(BigInt::zero()));
    }
    let base = lambda_u64(n0)?;
    let (_, m) = find_prime_in_progression(l, 1)?;
    let bound = m
        .checked_mul(n0)
        .ok_or_else(|| Error::Defect(format!("flip bound m*n0 overflows for n0={n0}, l={l}")))?;
    for k in 1..=bound {
        let v = l
            .checked_mul(k)
            .and_then(|lk| lk.checked_add(n0))
            .ok_or_else(|| {
                Error::Defect(format!("n0 + l*k overflows for n0={n0}, l={l}, k={k}"))
            })?;
        if lambda_u64(v)? != base {
            return Ok(k);
        }
    }
    Err(Error::Defect(format!(
        "no sign flip for n0={n0}, l={l} up to the constructive bound k={bound}"
    )))
}
