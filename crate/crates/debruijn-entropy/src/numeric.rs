//! Log-domain arithmetic and small number-theory helpers.

use crate::config::{Tolerances, MAX_EXACT_COUNT};
use crate::error::{Error, Result};

/// `log(exp(a) + exp(b))` with the larger magnitude factored out.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Stable `log(sum(exp(terms)))`; empty input is `-inf` (an empty sum).
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let hi = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !hi.is_finite() {
        return hi;
    }
    let mut acc = 0.0;
    for &t in terms {
        acc += (t - hi).exp();
    }
    hi + acc.ln()
}

/// Cumulative table of `log(m!)` for `m` up to a fixed bound.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    cum: Vec<f64>,
}

impl LogFactorials {
    /// Table covering `0! ..= max!`.
    pub fn up_to(max: u64) -> Self {
        let mut cum = Vec::with_capacity(max as usize + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for m in 1..=max {
            acc += (m as f64).ln();
            cum.push(acc);
        }
        LogFactorials { cum }
    }

    /// `log(m!)`.
    pub fn lf(&self, m: u64) -> f64 {
        self.cum[m as usize]
    }

    /// `log(binomial(n, k))`.
    pub fn log_binomial(&self, n: u64, k: u64) -> f64 {
        debug_assert!(k <= n);
        self.lf(n) - self.lf(k) - self.lf(n - k)
    }
}

/// Snaps `exp(log_w)` to an exact integer when it is within relative
/// `tol.integer_snap` of one and below `2^53`; otherwise `None` and only the
/// log value is meaningful.
pub fn snap_to_count(log_w: f64, tol: &Tolerances) -> Option<u64> {
    if !log_w.is_finite() {
        return None;
    }
    let x = log_w.exp();
    if !x.is_finite() || x >= MAX_EXACT_COUNT {
        return None;
    }
    let r = x.round();
    if r < 1.0 {
        return None;
    }
    if (x - r).abs() <= tol.integer_snap * r {
        Some(r as u64)
    } else {
        None
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// All divisors of `x`, ascending.
pub fn divisors(x: u64) -> Result<Vec<u64>> {
    if x == 0 {
        return Err(Error::ZeroArgument("divisors"));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= x {
        if x.is_multiple_of(d) {
            small.push(d);
            if d != x / d {
                large.push(x / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Ok(small)
}

/// Euler's totient via trial-division factorization.
pub fn totient(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::ZeroArgument("totient"));
    }
    let mut rest = d;
    let mut phi = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut pk = 1u64;
            while rest.is_multiple_of(p) {
                rest /= p;
                pk *= p;
            }
            phi *= pk / p * (p - 1);
        }
        p += 1;
    }
    if rest > 1 {
        phi *= rest - 1;
    }
    Ok(phi)
}
