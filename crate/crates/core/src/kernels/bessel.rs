//! Bessel functions of the first kind, integer order, and their positive zeros.
//!
//! `J_n(x)` comes from the ascending series for `|x| <= 1` and from Miller's
//! backward recurrence normalized by `J_0 + 2 sum J_2k = 1` otherwise. Zeros are
//! bracketed by a sign scan with unit step, which cannot skip a root because
//! consecutive zeros of `J_n` are more than 3 apart, and then polished with a
//! safeguarded Newton iteration.

use super::KernelError;

/// Largest supported order.
pub const MAX_ORDER: u32 = 500;
/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 500.0;
/// Largest supported zero index.
pub const MAX_ZERO_INDEX: u32 = 150;

const RESCALE_ABOVE: f64 = 1e250;

fn check(order: u32, x: f64) -> Result<(), KernelError> {
    if order > MAX_ORDER || !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(KernelError::BesselRange { order, argument: x });
    }
    Ok(())
}

/// `J_order(x)`, absolute accuracy about 1e-14 on the supported range.
pub fn bessel_j(order: u32, x: f64) -> Result<f64, KernelError> {
    check(order, x)?;
    let v = bessel_j_pos(order, x.abs());
    Ok(if x < 0.0 && order % 2 == 1 { -v } else { v })
}

fn bessel_j_pos(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= 1.0 {
        return series(n, x);
    }
    miller(n, x)
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn miller(n: u32, x: f64) -> f64 {
    let start = (n as f64).max(x) + 10.0 * x.cbrt() + 40.0;
    let mut m = start.ceil() as u32;
    m += m % 2;

    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j = 1e-300; // J_k
    let mut sum = 0.0;
    let mut answer = 0.0;
    for k in (1..=m).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let j_prev = k as f64 * two_over_x * j - j_next;
        j_next = j;
        j = j_prev;
        if k - 1 == n {
            answer = j;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            sum += 2.0 * j;
        }
        if j.abs() > RESCALE_ABOVE {
            j /= RESCALE_ABOVE;
            j_next /= RESCALE_ABOVE;
            sum /= RESCALE_ABOVE;
            answer /= RESCALE_ABOVE;
        }
    }
    // j now holds the unnormalized J_0
    sum += j;
    answer / sum
}

/// `J_n'(x)` from the three-term relation.
fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j_pos(1, x)
    } else {
        0.5 * (bessel_j_pos(n - 1, x) - bessel_j_pos(n + 1, x))
    }
}

fn polish(n: u32, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = bessel_j_pos(n, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = bessel_j_pos(n, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        let newton = x - f / bessel_j_prime(n, x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}

/// Visits the positive zeros of `J_order` in increasing order until `visit`
/// returns false or the argument range is exhausted.
fn scan_zeros(order: u32, mut visit: impl FnMut(f64) -> bool) {
    let mut a = if order == 0 { 0.5 } else { order as f64 };
    let mut fa = bessel_j_pos(order, a);
    while a < MAX_ARGUMENT {
        let b = (a + 1.0).min(MAX_ARGUMENT);
        let fb = bessel_j_pos(order, b);
        if fa == 0.0 || (fa < 0.0) != (fb < 0.0) {
            let z = if fa == 0.0 { a } else { polish(order, a, b) };
            if !visit(z) {
                return;
            }
        }
        a = b;
        fa = fb;
    }
}

/// The `index`-th positive zero of `J_order` (index starts at 1).
pub fn bessel_zero(order: u32, index: u32) -> Result<f64, KernelError> {
    bessel_zeros(order, index)?
        .last()
        .copied()
        .ok_or(KernelError::ZeroIndex)
}

/// The first `count` positive zeros of `J_order`.
pub fn bessel_zeros(order: u32, count: u32) -> Result<Vec<f64>, KernelError> {
    if count == 0 {
        return Err(KernelError::ZeroIndex);
    }
    if order > MAX_ORDER || count > MAX_ZERO_INDEX {
        return Err(KernelError::BesselRange {
            order,
            argument: f64::NAN,
        });
    }
    let mut zeros = Vec::with_capacity(count as usize);
    scan_zeros(order, |z| {
        zeros.push(z);
        zeros.len() < count as usize
    });
    if zeros.len() < count as usize {
        return Err(KernelError::BesselRange {
            order,
            argument: MAX_ARGUMENT,
        });
    }
    Ok(zeros)
}

/// All positive zeros of `J_order` not exceeding `limit`.
pub fn bessel_zeros_below(order: u32, limit: f64) -> Result<Vec<f64>, KernelError> {
    check(order, limit)?;
    let mut zeros = Vec::new();
    scan_zeros(order, |z| {
        if z > limit {
            return false;
        }
        zeros.push(z);
        true
    });
    Ok(zeros)
}
