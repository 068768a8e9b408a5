//! Bessel functions of the first kind with integer order, and their zeros.
//!
//! Values come from Miller's downward recurrence normalized by the identity
//! J_0 + 2 J_2 + 2 J_4 + ... = 1, which is uniformly accurate for the
//! moderate orders and arguments the drum spectra need. Zeros are isolated by
//! a sign scan (the zeros of consecutive orders interlace, so the first zero
//! lies above nu) and polished by bisection.

/// J_nu(x) for integer nu >= 0 and x >= 0.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    bessel_j_column(nu, x)[nu as usize]
}

/// J_0(x) .. J_nu_max(x) in one downward recurrence.
pub fn bessel_j_column(nu_max: u32, x: f64) -> Vec<f64> {
    let nm = nu_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; nm + 1];
        out[0] = 1.0;
        return out;
    }
    // start high enough that the unnormalized tail has decayed to noise
    let start = nm + 16 + (1.4 * x) as usize;
    let start = if start % 2 == 0 { start } else { start + 1 };
    let mut out = vec![0.0; nm + 1];
    let mut jp = 0.0_f64; // J~_{k+1}
    let mut j = 1e-300_f64; // J~_k
    let mut norm = 0.0_f64;
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        // after the update, j = J~_k, jp = J~_{k+1}
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k <= nm {
            out[k] = j;
        }
        // rescale to avoid overflow of the unnormalized recurrence
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp *= s;
            norm *= s;
            for v in &mut out {
                *v *= s;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// s-th positive zero of J_nu (s >= 1).
pub fn jn_zero(nu: u32, s: u32) -> f64 {
    assert!(s >= 1, "zeros are indexed from 1");
    let nf = nu as f64;
    // first zero of J_nu exceeds nu; start just above and walk in steps
    // small enough that consecutive zeros (spaced ~pi apart) are separated
    let mut x = if nu == 0 { 1.0 } else { nf + 0.5 };
    let step = 0.5;
    let mut found = 0;
    let mut f_prev = bessel_j(nu, x);
    for _ in 0..100_000 {
        let x_next = x + step;
        let f_next = bessel_j(nu, x_next);
        if f_prev == 0.0 {
            found += 1;
            if found == s {
                return x;
            }
        } else if f_prev.signum() != f_next.signum() {
            found += 1;
            if found == s {
                return bisect_zero(nu, x, x_next);
            }
        }
        x = x_next;
        f_prev = f_next;
    }
    unreachable!("zero scan ran away for nu = {nu}, s = {s}");
}

fn bisect_zero(nu: u32, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = bessel_j(nu, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = bessel_j(nu, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo.signum() == f_mid.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
