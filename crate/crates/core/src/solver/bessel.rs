// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Integer-order Bessel functions J_0..J_n by Miller's backward recurrence.

const RESCALE: f64 = 1e250;

/// J_0(x), …, J_n(x) for x ≥ 0.
pub fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "bessel argument must be finite and non-negative"
    );
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let n0 = n.max(x.ceil() as usize);
    let mut m = n0 + 20 + (40.0 * n0 as f64).sqrt() as usize;
    m += m % 2;
    let mut above = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut sum = 0.0;
    for k in (1..=m).rev() {
        if k <= n {
            out[k] = cur;
        }
        if k % 2 == 0 {
            sum += 2.0 * cur;
        }
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            sum /= RESCALE;
            out.iter_mut().for_each(|v| *v /= RESCALE);
        }
    }
    out[0] = cur;
    sum += cur;
    out.iter_mut().for_each(|v| *v /= sum);
    out
}
