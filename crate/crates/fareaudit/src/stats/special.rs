//! Special functions backing the test kernels: log-gamma, regularized
//! incomplete gamma and beta, the normal CDF and its inverse, and the
//! Student-t CDF. Everything is plain `f64` with no external dependencies
//! so p-values are reproducible bit-for-bit across builds.

use super::StatsError;

const ITMAX: usize = 400;
const EPS: f64 = 1e-15;
const FPMIN: f64 = 1e-300;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 8] = [
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, StatsError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(StatsError::Domain {
            function: "ln_gamma",
            detail: format!("requires x > 0, got {x}"),
        });
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut a = 0.999_999_999_999_809_93;
        for (i, c) in LANCZOS.iter().enumerate() {
            a += c / (z + (i + 1) as f64);
        }
        let t = z + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
    }
}

/// Regularized lower incomplete gamma P(a, x).
///
/// Series expansion for x < a + 1, continued fraction otherwise.
pub fn reg_gamma_p(a: f64, x: f64) -> Result<f64, StatsError> {
    check_gamma_domain(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(gamma_series(a, x))
    } else {
        Ok(1.0 - gamma_cf(a, x))
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
///
/// Evaluated directly in the tail so small survival probabilities keep
/// full relative precision.
pub fn reg_gamma_q(a: f64, x: f64) -> Result<f64, StatsError> {
    check_gamma_domain(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x))
    } else {
        Ok(gamma_cf(a, x))
    }
}

fn check_gamma_domain(a: f64, x: f64) -> Result<(), StatsError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(StatsError::Domain {
            function: "reg_gamma",
            detail: format!("requires a > 0, got a = {a}"),
        });
    }
    if !x.is_finite() || x < 0.0 {
        return Err(StatsError::Domain {
            function: "reg_gamma",
            detail: format!("requires x >= 0, got x = {x}"),
        });
    }
    Ok(())
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..ITMAX {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma_unchecked(a)).exp()
}

/// Continued fraction for Q(a, x), modified Lentz.
fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=ITMAX {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma_unchecked(a)).exp() * h
}

/// Regularized incomplete beta I_x(a, b).
pub fn reg_beta_i(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
        return Err(StatsError::Domain {
            function: "reg_beta_i",
            detail: format!("requires a > 0 and b > 0, got a = {a}, b = {b}"),
        });
    }
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(StatsError::Domain {
            function: "reg_beta_i",
            detail: format!("requires x in [0, 1], got x = {x}"),
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma_unchecked(a + b) - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + a * x.ln()
        + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(a, b, x) / a)
    } else {
        Ok(1.0 - front * beta_cf(b, a, 1.0 - x) / b)
    }
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=ITMAX {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;
        // even step
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Standard normal CDF Φ(z).
///
/// Routed through the upper incomplete gamma {Q(1/2, z²/2) = erfc(|z|/√2)}
/// so both tails retain relative precision.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    let half_tail = |t: f64| -> f64 {
        // t ≥ 0; returns erfc(t/√2)/2 = P(Z > t)
        if t == 0.0 {
            0.5
        } else {
            0.5 * reg_gamma_q(0.5, 0.5 * t * t).expect("domain checked")
        }
    };
    if z >= 0.0 {
        1.0 - half_tail(z)
    } else {
        half_tail(-z)
    }
}

/// Inverse of [`normal_cdf`], by bisection to an argument tolerance of 1e-10.
pub fn normal_quantile(p: f64) -> Result<f64, StatsError> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(StatsError::Domain {
            function: "normal_quantile",
            detail: format!("requires p in (0, 1), got {p}"),
        });
    }
    let mut lo = -40.0_f64;
    let mut hi = 40.0_f64;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Student-t CDF with `df` degrees of freedom, via the incomplete beta.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64, StatsError> {
    if !df.is_finite() || df <= 0.0 {
        return Err(StatsError::Domain {
            function: "student_t_cdf",
            detail: format!("requires df > 0, got {df}"),
        });
    }
    if t.is_nan() {
        return Err(StatsError::Domain {
            function: "student_t_cdf",
            detail: "t is NaN".to_string(),
        });
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    if t == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let x = df / (df + t * t);
    let half = 0.5 * reg_beta_i(0.5 * df, 0.5, x)?;
    Ok(if t >= 0.0 { 1.0 - half } else { half })
}
