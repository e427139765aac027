//! Special functions not covered by `libm`: the real dilogarithm, an
//! overflow-safe logistic, and integer-order Bessel sequences by Miller's
//! backward recurrence.

use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

/// Real dilogarithm Li₂(x) for x ≤ 1.
pub fn dilog(x: f64) -> f64 {
    if x == 1.0 {
        return PI2_6;
    }
    if x == 0.0 {
        return 0.0;
    }
    assert!(x < 1.0, "dilog is real only for x <= 1");
    if x < -1.0 {
        // inversion: Li2(x) = -Li2(1/x) - π²/6 - ½ ln²(-x)
        let l = (-x).ln();
        return -dilog(1.0 / x) - PI2_6 - 0.5 * l * l;
    }
    if x < -0.5 {
        // Landen: Li2(x) = -Li2(x/(x-1)) - ½ ln²(1-x), x/(x-1) ∈ (1/3, 1/2]
        let l = (-x).ln_1p();
        return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
    }
    if x > 0.5 {
        // reflection: Li2(x) = π²/6 - ln x ln(1-x) - Li2(1-x)
        return PI2_6 - x.ln() * (-x).ln_1p() - dilog_series(1.0 - x);
    }
    dilog_series(x)
}

fn dilog_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = x;
    for k in 1..200 {
        let kf = k as f64;
        let term = p / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        p *= x;
    }
    sum
}

/// 1 / (1 + e^x) evaluated without overflow for any finite x.
pub fn logistic_tail(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// J_0(x) .. J_{m_max}(x) for x ≥ 0 by Miller's algorithm, normalised with
/// J_0 + 2 Σ J_{2k} = 1.
pub fn bessel_j_sequence(x: f64, m_max: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(m_max + 1, 0.0);
    if x == 0.0 {
        out[0] = 1.0;
        return;
    }
    let start = {
        let base = (m_max as f64).max(x);
        let s = base + 20.0 + 2.5 * base.cbrt() + (40.0 * base).sqrt();
        (s as usize + 1) & !1
    };
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    for n in (1..=start).rev() {
        let jm1 = n as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        let idx = n - 1;
        if idx <= m_max {
            out[idx] = j;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            jp1 *= 1e-250;
            j *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilog_reference_values() {
        assert!((dilog(1.0) - PI2_6).abs() < 1e-15);
        assert!((dilog(-1.0) + PI * PI / 12.0).abs() < 1e-14);
        // Li2(1/2) = π²/12 - ½ ln² 2
        let l2 = 2f64.ln();
        assert!((dilog(0.5) - (PI * PI / 12.0 - 0.5 * l2 * l2)).abs() < 1e-14);
        // Li2(-2) ≈ -1.4367463668836809
        assert!((dilog(-2.0) + 1.436_746_366_883_681).abs() < 1e-13);
        // continuity across branch switches
        for &x in &[-1.0, -0.5, 0.5] {
            let a = dilog(x - 1e-9);
            let b = dilog(x + 1e-9);
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn dilog_large_negative_argument() {
        // Li2(-x) ~ -π²/6 - ½ ln² x for large x
        let x = 1e12_f64;
        let l = x.ln();
        let approx = -PI2_6 - 0.5 * l * l - dilog(-1.0 / x);
        assert!((dilog(-x) - approx).abs() < 1e-10);
    }

    #[test]
    fn logistic_extremes() {
        assert_eq!(logistic_tail(0.0), 0.5);
        assert!(logistic_tail(1e4) > 0.0 || logistic_tail(1e4) == 0.0);
        assert_eq!(logistic_tail(-1e4), 1.0);
        assert!((logistic_tail(-10.0) - 1.0 / (1.0 + (-10f64).exp())).abs() < 1e-16);
    }

    #[test]
    fn bessel_sequence_matches_libm() {
        let mut seq = Vec::new();
        for &x in &[0.3, 1.0, 7.5, 42.0, 150.0] {
            bessel_j_sequence(x, 60, &mut seq);
            for m in [0usize, 1, 2, 5, 17, 40, 60] {
                let r = libm::jn(m as i32, x);
                assert!((seq[m] - r).abs() < 1e-12, "x={x} m={m}: {} vs {r}", seq[m]);
            }
        }
    }
}
