//! Continued fractions of `√N` and the Pell equation `x² - N·y² = 1`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::integer::is_square_biguint;

/// `√N = [a0; period, period, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    radicand: BigUint,
    a0: BigUint,
    period: Vec<BigUint>,
}

impl CfExpansion {
    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn a0(&self) -> &BigUint {
        &self.a0
    }

    /// One full period; the last term is always `2·a0`.
    pub fn period(&self) -> &[BigUint] {
        &self.period
    }

    /// Partial quotient `a_i`, `i = 0, 1, ...`.
    pub fn term(&self, i: usize) -> &BigUint {
        if i == 0 {
            &self.a0
        } else {
            &self.period[(i - 1) % self.period.len()]
        }
    }
}

fn check_radicand(n: &BigUint) -> Result<()> {
    if *n < BigUint::from(2u32) || is_square_biguint(n) {
        return Err(Error::PellNotApplicable(BigInt::from(n.clone())));
    }
    Ok(())
}

/// Expands `√N` with the integer recurrence
/// `m' = d·a - m`, `d' = (N - m'²)/d`, `a' = ⌊(a0 + m')/d'⌋`,
/// starting from `m = 0`, `d = 1`, until the term `2·a0` closes the period.
pub fn cf_sqrt(n: &BigUint) -> Result<CfExpansion> {
    check_radicand(n)?;
    let a0 = n.sqrt();
    let two_a0 = &a0 << 1;
    let mut m = BigUint::zero();
    let mut d = BigUint::one();
    let mut a = a0.clone();
    let mut period = Vec::new();
    loop {
        m = &d * &a - &m;
        d = (n - &m * &m) / &d;
        a = (&a0 + &m) / &d;
        let done = a == two_a0;
        period.push(a.clone());
        if done {
            break;
        }
    }
    Ok(CfExpansion {
        radicand: n.clone(),
        a0,
        period,
    })
}

/// A positive solution of `x² - N·y² = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PellSolution {
    radicand: BigUint,
    x: BigUint,
    y: BigUint,
}

impl PellSolution {
    /// Checks the equation exactly; `None` if it fails or `y = 0`.
    pub fn new(radicand: BigUint, x: BigUint, y: BigUint) -> Option<Self> {
        if y.is_zero() || !satisfies_pell(&radicand, &x, &y) {
            return None;
        }
        Some(PellSolution { radicand, x, y })
    }

    pub(crate) fn from_parts_unchecked(radicand: BigUint, x: BigUint, y: BigUint) -> Self {
        PellSolution { radicand, x, y }
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    /// `(x + y√N)(other.x + other.y√N)`.
    pub fn compose(&self, other: &PellSolution) -> PellSolution {
        debug_assert_eq!(self.radicand, other.radicand);
        PellSolution {
            radicand: self.radicand.clone(),
            x: &self.x * &other.x + &self.radicand * &self.y * &other.y,
            y: &self.x * &other.y + &self.y * &other.x,
        }
    }

    /// The stream `ε, ε², ε³, ...` where `ε` is this solution.
    pub fn powers(&self) -> PellPowers {
        PellPowers {
            unit: self.clone(),
            current: None,
        }
    }
}

/// `x² - N·y² = 1` in exact arithmetic.
pub fn satisfies_pell(n: &BigUint, x: &BigUint, y: &BigUint) -> bool {
    x * x == n * y * y + 1u32
}

#[derive(Debug, Clone)]
pub struct PellPowers {
    unit: PellSolution,
    current: Option<PellSolution>,
}

impl Iterator for PellPowers {
    type Item = PellSolution;

    fn next(&mut self) -> Option<PellSolution> {
        let next = match &self.current {
            None => self.unit.clone(),
            Some(cur) => cur.compose(&self.unit),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Minimal positive solution, read off the convergent that ends the first
/// period (the second one when the period length is odd).
pub fn pell_fundamental(n: &BigUint) -> Result<PellSolution> {
    let cf = cf_sqrt(n)?;
    let len = cf.period().len();
    let last = if len % 2 == 0 { len - 1 } else { 2 * len - 1 };
    // h_{-1} = 1, h_{-2} = 0; k_{-1} = 0, k_{-2} = 1
    let (mut h_prev, mut h) = (BigUint::zero(), BigUint::one());
    let (mut k_prev, mut k) = (BigUint::one(), BigUint::zero());
    for i in 0..=last {
        let a = cf.term(i);
        let h_next = a * &h + &h_prev;
        let k_next = a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    PellSolution::new(n.clone(), h, k).ok_or_else(|| {
        Error::Defect(format!(
            "convergent for N={n} does not solve the Pell equation"
        ))
    })
}

/// The `k`-th power of `fund`, by the recurrence
/// `x' = x1·x + N·y1·y`, `y' = x1·y + y1·x`.
///
/// # Panics
///
/// If `k == 0`.
pub fn pell_iterate(fund: &PellSolution, k: usize) -> PellSolution {
    assert!(k >= 1, "Pell solution index starts at 1");
    fund.powers().nth(k - 1).expect("stream is infinite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Roots;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn brute_force(n: u64) -> (u64, u64) {
        (1u64..)
            .find_map(|y| {
                let x2 = n * y * y + 1;
                let x = x2.sqrt();
                (x * x == x2).then_some((x, y))
            })
            .unwrap()
    }

    #[test]
    fn cf_examples() {
        let cf = cf_sqrt(&u(2)).unwrap();
        assert_eq!((cf.a0(), cf.period()), (&u(1), &[u(2)][..]));
        let cf = cf_sqrt(&u(3)).unwrap();
        assert_eq!(cf.period(), &[u(1), u(2)]);
        let cf = cf_sqrt(&u(32)).unwrap();
        assert_eq!(cf.a0(), &u(5));
        assert_eq!(cf.period(), &[u(1), u(1), u(1), u(10)]);
        assert!(matches!(cf_sqrt(&u(16)), Err(Error::PellNotApplicable(_))));
        assert!(matches!(cf_sqrt(&u(1)), Err(Error::PellNotApplicable(_))));
        assert!(matches!(cf_sqrt(&u(0)), Err(Error::PellNotApplicable(_))));
    }

    #[test]
    fn cf_period_closes_with_twice_a0() {
        for n in 2..=1000u64 {
            if n.sqrt().pow(2) == n {
                continue;
            }
            let cf = cf_sqrt(&u(n)).unwrap();
            assert_eq!(cf.period().last().unwrap(), &(cf.a0() * 2u32), "N = {n}");
            // Palindromic body.
            let body = &cf.period()[..cf.period().len() - 1];
            assert!(body.iter().eq(body.iter().rev()), "N = {n}");
        }
    }

    #[test]
    fn fundamental_examples() {
        for (n, x, y) in [(2, 3, 2), (3, 2, 1), (32, 17, 3)] {
            let s = pell_fundamental(&u(n)).unwrap();
            assert_eq!((s.x(), s.y()), (&u(x), &u(y)));
        }
        // Famous large case.
        let s = pell_fundamental(&u(61)).unwrap();
        assert_eq!(s.x(), &u(1_766_319_049));
        assert_eq!(s.y(), &u(226_153_980));
        assert!(pell_fundamental(&u(49)).is_err());
    }

    #[test]
    fn fundamental_matches_brute_force_where_small() {
        for n in 2..=200u64 {
            if n.sqrt().pow(2) == n {
                continue;
            }
            let s = pell_fundamental(&u(n)).unwrap();
            if s.y() < &u(1_000_000) {
                let (x, y) = brute_force(n);
                assert_eq!((s.x(), s.y()), (&u(x), &u(y)), "N = {n}");
            }
        }
    }

    #[test]
    fn iterate_examples() {
        let f2 = pell_fundamental(&u(2)).unwrap();
        assert_eq!(pell_iterate(&f2, 1), f2);
        let s = pell_iterate(&f2, 2);
        assert_eq!((s.x(), s.y()), (&u(17), &u(12)));
        let f32 = pell_fundamental(&u(32)).unwrap();
        let s = pell_iterate(&f32, 2);
        assert_eq!((s.x(), s.y()), (&u(577), &u(102)));
    }

    #[test]
    fn iterates_solve_and_increase() {
        for n in 2..=200u64 {
            if n.sqrt().pow(2) == n {
                continue;
            }
            let fund = pell_fundamental(&u(n)).unwrap();
            let sols: Vec<_> = fund.powers().take(5).collect();
            for (k, s) in sols.iter().enumerate() {
                assert!(
                    satisfies_pell(s.radicand(), s.x(), s.y()),
                    "N = {n}, k = {}",
                    k + 1
                );
                assert_eq!(s, &pell_iterate(&fund, k + 1));
            }
            for w in sols.windows(2) {
                assert!(w[0].x() < w[1].x() && w[0].y() < w[1].y());
            }
        }
    }

    #[test]
    fn rejects_non_solutions() {
        assert!(PellSolution::new(u(2), u(3), u(1)).is_none());
        assert!(PellSolution::new(u(2), u(1), u(0)).is_none());
    }
}
