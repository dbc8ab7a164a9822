//! Riemann sums of `|x|^{-δ}` on the torus in closed form.

use crate::error::{OrbintError, Result};

/// Terms summed directly before switching to Euler–Maclaurin.
const DIRECT_TERMS: usize = 24;

/// `B_{2k} / (2k)!` for `k = 1..=4`.
const BERNOULLI_OVER_FACTORIAL: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
];

/// `Σ_{j=0}^{n-1} (u + j)^{-δ}` for `u ∈ (0, 1]`.
pub fn shifted_power_sum(u: f64, n: usize, delta: f64) -> f64 {
    let direct = n.min(DIRECT_TERMS);
    let mut acc: f64 = (0..direct).map(|j| (u + j as f64).powf(-delta)).sum();
    if n <= DIRECT_TERMS {
        return acc;
    }
    let g = |t: f64| (u + t).powf(-delta);
    // m-th derivative of (u + t)^{-δ}
    let deriv = |t: f64, m: i32| {
        let mut c = 1.0;
        for i in 0..m {
            c *= -delta - i as f64;
        }
        c * (u + t).powf(-delta - m as f64)
    };
    let (a, b) = (DIRECT_TERMS as f64, n as f64);
    let integral = if (delta - 1.0).abs() < 1e-15 {
        ((u + b) / (u + a)).ln()
    } else {
        ((u + b).powf(1.0 - delta) - (u + a).powf(1.0 - delta)) / (1.0 - delta)
    };
    // Σ_{j=a}^{b-1} g(j) = ∫_a^b g + (g(a) - g(b))/2 + Σ B_{2k}/(2k)! (g^{(2k-1)}(b) - g^{(2k-1)}(a))
    acc += integral + 0.5 * (g(a) - g(b));
    for (k, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let m = 2 * k as i32 + 1;
        acc += c * (deriv(b, m) - deriv(a, m));
    }
    acc
}

/// `R_n f(x) = (1/n) Σ_j f(x + j/n)` for `f(x) = |x|^{-δ}` on `[0, 1)`,
/// via `R_n f(x) = n^{δ-1} Σ_{j<n} (u + j)^{-δ}` with `u = frac(nx)`.
pub fn power_riemann_sum(x: f64, n: usize, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(OrbintError::DomainError("level n must be positive".into()));
    }
    let nf = n as f64;
    let y = nf * x.rem_euclid(1.0);
    let u = y - y.floor();
    if u == 0.0 {
        return Err(OrbintError::SingularHit(x));
    }
    Ok(nf.powf(delta - 1.0) * shifted_power_sum(u, n, delta))
}
