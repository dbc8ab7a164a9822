//! Sampled convergence and divergence verdicts and the maximal-inequality
//! audit.

pub mod thresholds;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::{ActionKind, ActionSystem, BorelRegion, Point, SpaceDomain};
use crate::averaging::{ambient_orbital_integral, orbital_integral, riemann_closed_form, riemann_sum, Integrand, Reference, Trajectory};
use crate::error::{OrbintError, Result};
use crate::groups::TruncationPolicy;

pub use thresholds::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub sample_size: usize,
    pub seed: u64,
    /// Exclude points where the integrand is evaluated at its singularity
    /// instead of failing.
    pub skip_singular: bool,
    /// Allowed fraction of non-converged points.
    pub fail_quota: f64,
}

impl SampleOptions {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        Self {
            sample_size,
            seed,
            skip_singular: false,
            fail_quota: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub sample_size: usize,
    pub excluded_singular: usize,
    pub levels: Vec<usize>,
    /// Fraction of kept points whose final deviation is within tolerance.
    pub converged_fraction: f64,
    pub median_deviation: Vec<f64>,
    pub p95_deviation: Vec<f64>,
    pub pass: bool,
    #[serde(skip)]
    pub trajectories: Vec<Trajectory>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-point values with singular hits either propagated or dropped.
fn collect_points<T: Send>(results: Vec<Result<T>>, skip_singular: bool) -> Result<(Vec<T>, usize)> {
    let mut kept = Vec::with_capacity(results.len());
    let mut excluded = 0;
    for r in results {
        match r {
            Ok(v) => kept.push(v),
            Err(OrbintError::SingularHit(_)) if skip_singular => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((kept, excluded))
}

/// Trajectories at seeded μ-sample points against `reference`.
pub fn ae_limit_estimate(
    system: &ActionSystem,
    f: &Integrand,
    levels: &[usize],
    reference: Reference,
    tol: f64,
    opts: &SampleOptions,
    trunc: &TruncationPolicy,
) -> Result<ConvergenceVerdict> {
    let results: Vec<Result<Trajectory>> = (0..opts.sample_size)
        .into_par_iter()
        .map(|i| {
            let x = system.space.sample(opts.seed, i as u64);
            crate::averaging::trajectory(system, f, &x, levels, reference.clone(), trunc)
        })
        .collect();
    let (trajectories, excluded_singular) = collect_points(results, opts.skip_singular)?;
    let mut median_deviation = Vec::with_capacity(levels.len());
    let mut p95_deviation = Vec::with_capacity(levels.len());
    for k in 0..levels.len() {
        let mut devs: Vec<f64> = trajectories.iter().map(|t| (t.values[k] - t.reference).norm()).collect();
        devs.sort_by(f64::total_cmp);
        median_deviation.push(quantile(&devs, 0.5));
        p95_deviation.push(quantile(&devs, 0.95));
    }
    let converged = trajectories
        .iter()
        .filter(|t| t.tail_deviation.last().is_some_and(|&d| d <= tol))
        .count();
    let converged_fraction = converged as f64 / trajectories.len().max(1) as f64;
    Ok(ConvergenceVerdict {
        sample_size: opts.sample_size,
        excluded_singular,
        levels: levels.to_vec(),
        pass: !trajectories.is_empty() && converged_fraction >= 1.0 - opts.fail_quota,
        converged_fraction,
        median_deviation,
        p95_deviation,
        trajectories,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub checkpoints: Vec<usize>,
    /// `max_{n ≤ N} R_n f(x)` at each checkpoint `N`, per kept point.
    pub running_max: Vec<Vec<f64>>,
    /// Ratios of running maxima at consecutive checkpoints, per kept point.
    pub growth_ratios: Vec<Vec<f64>>,
    pub excluded_singular: usize,
    pub reference: f64,
    pub factor: f64,
    /// Fraction of kept points whose last running maximum exceeds
    /// `factor · reference`.
    pub exceed_fraction: f64,
    /// Fraction of kept points whose running maximum grew between the
    /// first and last checkpoints.
    pub growing_fraction: f64,
    pub flag: bool,
    pub label: String,
}

/// Label carried by a raised divergence flag. Divergence is never proven
/// numerically.
pub const DIVERGENCE_LABEL: &str = "consistent with a.e. divergence";

/// Running maxima of the full Riemann-sum schedule `n = 1..=N` on the circle
/// (level `ℤ/nℤ` at step `n`), compared with `factor · reference`. Meant
/// for nonnegative `f`.
pub fn divergence_gap(
    system: &ActionSystem,
    f: &Integrand,
    checkpoints: &[usize],
    x_sample: &[Point],
    reference: f64,
    factor: f64,
    skip_singular: bool,
) -> Result<DivergenceReport> {
    if system.kind != ActionKind::Translation || system.space.domain != SpaceDomain::Torus(1) {
        return Err(OrbintError::Unsupported("Riemann-sum schedules live on the circle".into()));
    }
    let n_max = checkpoints.iter().copied().max().unwrap_or(0);
    let results: Vec<Result<Vec<f64>>> = x_sample
        .par_iter()
        .map(|x| {
            let Point::Real(v) = x else {
                return Err(OrbintError::DomainError("torus point expected".into()));
            };
            let mut best = f64::NEG_INFINITY;
            let mut out = Vec::with_capacity(checkpoints.len());
            for n in 1..=n_max {
                let r = match riemann_closed_form(f, v[0], n) {
                    Some(r) => r?.re,
                    None => riemann_sum(f, v[0], n)?.re,
                };
                best = best.max(r);
                if checkpoints.contains(&n) {
                    out.push(best);
                }
            }
            Ok(out)
        })
        .collect();
    let (running_max, excluded_singular) = collect_points(results, skip_singular)?;
    let growth_ratios: Vec<Vec<f64>> = running_max
        .iter()
        .map(|m| m.windows(2).map(|w| w[1] / w[0]).collect())
        .collect();
    let kept = running_max.len().max(1) as f64;
    let exceed = running_max
        .iter()
        .filter(|m| m.last().is_some_and(|&v| v > factor * reference))
        .count();
    let growing = running_max
        .iter()
        .filter(|m| m.len() >= 2 && m[m.len() - 1] > m[0])
        .count();
    let exceed_fraction = exceed as f64 / kept;
    let flag = !running_max.is_empty() && exceed_fraction >= DIVERGENCE_MAJORITY;
    Ok(DivergenceReport {
        checkpoints: checkpoints.to_vec(),
        running_max,
        growth_ratios,
        excluded_singular,
        reference,
        factor,
        exceed_fraction,
        growing_fraction: growing as f64 / kept,
        flag,
        label: if flag { DIVERGENCE_LABEL.to_string() } else { "no divergence evidence".to_string() },
    })
}

/// Grid for the maximal-inequality audit: `x_i = lo + (i + 1/2)·h` over a
/// window, with `h` chosen so that the grid is invariant under the finest
/// level's translations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditGrid {
    pub window: (f64, f64),
    pub spacing: f64,
}

impl AuditGrid {
    /// Spacing `2^{-N}/3` with nodes `(2i + 1)·2^{-N}/6`: invariant under
    /// `2^{-N}ℤ` and never dyadic.
    pub fn dyadic(window: (f64, f64), level_log2: u32) -> Self {
        Self {
            window,
            spacing: (-(level_log2 as f64)).exp2() / 3.0,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing;
        let first = (self.window.0 / h - 0.5).ceil() as i64;
        let last = (self.window.1 / h - 0.5).floor() as i64;
        (first..=last)
            .map(|i| (i as f64 + 0.5) * h)
            .filter(|&x| self.window.0 <= x && x < self.window.1)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub alphas: Vec<f64>,
    /// `α μ(Q_α ∩ X_k)`.
    pub lhs: Vec<f64>,
    /// `c_k ∫_{Q_α} f dμ`.
    pub rhs: Vec<f64>,
    pub pass: bool,
}

/// Optional rewrite of the computed `f*(x)`, used to plant violations.
pub type MaximalOverride<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// Audits `α μ(Q_α ∩ X_k) ≤ c_k ∫_{Q_α} f dμ` with `Q_α = {f* > α}` and
/// `f*` the maximum over levels `1..=level_cap`, on a grid of the circle or
/// line.
#[allow(clippy::too_many_arguments)]
pub fn maximal_inequality_audit(
    system: &ActionSystem,
    f: &Integrand,
    region: &BorelRegion,
    c_k: f64,
    alphas: &[f64],
    level_cap: usize,
    grid: &AuditGrid,
    trunc: &TruncationPolicy,
    corrupt: Option<MaximalOverride<'_>>,
) -> Result<AuditReport> {
    if !f.is_nonnegative() {
        return Err(OrbintError::DomainError("the audit needs f ≥ 0".into()));
    }
    let xs = grid.points();
    let h = grid.spacing;
    let rows: Vec<Result<(f64, f64, bool)>> = xs
        .par_iter()
        .map(|&x| {
            let p = Point::real1(x);
            let mut star: f64 = 0.0;
            for n in 1..=level_cap {
                star = star.max(orbital_integral(system, n, f, &p, trunc)?.re);
            }
            if let Some(c) = corrupt {
                star = c(x, star);
            }
            Ok((star, f.eval(&p)?.re, region.contains(&p)))
        })
        .collect();
    let rows: Vec<(f64, f64, bool)> = rows.into_iter().collect::<Result<_>>()?;
    let mut lhs = Vec::with_capacity(alphas.len());
    let mut rhs = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let (mut mass, mut integral) = (0.0, 0.0);
        for &(star, fx, inside) in &rows {
            if star > alpha {
                integral += fx * h;
                if inside {
                    mass += h;
                }
            }
        }
        lhs.push(alpha * mass);
        rhs.push(c_k * integral);
    }
    let pass = lhs
        .iter()
        .zip(&rhs)
        .all(|(l, r)| *l <= r * (1.0 + MAXIMAL_AUDIT_SLACK));
    Ok(AuditReport {
        alphas: alphas.to_vec(),
        lhs,
        rhs,
        pass,
    })
}

/// Orbital integral against the ambient value at one point, for quick
/// limit identification.
pub fn limit_gap(
    system: &ActionSystem,
    f: &Integrand,
    level: usize,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    Ok(orbital_integral(system, level, f, x, trunc)? - ambient_orbital_integral(system, f, x, trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupChain;

    fn circle(levels: std::ops::RangeInclusive<u32>) -> ActionSystem {
        ActionSystem::torus(GroupChain::torus_dyadic(levels).unwrap()).unwrap()
    }

    #[test]
    fn trig_polynomial_converges_exactly() {
        let sys = circle(0..=6);
        let f = Integrand::trig_polynomial(&[
            (vec![0], Complex64::new(1.5, 0.0)),
            (vec![3], Complex64::new(0.5, -1.0)),
            (vec![-17], Complex64::new(2.0, 0.0)),
        ]);
        let v = ae_limit_estimate(
            &sys,
            &f,
            &(0..=6).collect::<Vec<_>>(),
            Reference::Ambient,
            1e-12,
            &SampleOptions::new(50, 3),
            &TruncationPolicy::compact(),
        )
        .unwrap();
        assert!(v.pass);
        assert_eq!(v.converged_fraction, 1.0);
        assert!(v.median_deviation[6] < 1e-12);
        assert!(v.median_deviation[0] > 0.1);
    }

    #[test]
    fn sampled_reports_are_deterministic() {
        let sys = circle(0..=8);
        let f = Integrand::Power { delta: 0.75 };
        let run = || {
            ae_limit_estimate(
                &sys,
                &f,
                &(0..=8).collect::<Vec<_>>(),
                Reference::Explicit(Complex64::new(4.0, 0.0)),
                0.1,
                &SampleOptions::new(40, 11),
                &TruncationPolicy::compact(),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn bounded_functions_raise_no_flag() {
        let sys = circle(0..=0);
        let xs = sys.space.sample_many(5, 10);
        let one = divergence_gap(&sys, &Integrand::constant(1.0), &[10, 100], &xs, 1.0, 2.0, false).unwrap();
        assert!(!one.flag);
        assert!(one.running_max.iter().flatten().all(|&v| (v - 1.0).abs() < 1e-12));
        let f = Integrand::Sum(vec![
            Integrand::constant(1.0),
            Integrand::scaled(0.5, Integrand::character1(1)),
            Integrand::scaled(0.5, Integrand::character1(-1)),
        ]);
        // R_n of cos 2πx vanishes for n ≥ 2
        let r = divergence_gap(&sys, &f, &[10, 100], &xs, 1.0, DIVERGENCE_FACTOR, false).unwrap();
        assert!(!r.flag);
        assert_eq!(r.label, "no divergence evidence");
    }

    #[test]
    fn audit_grid_is_invariant() {
        let g = AuditGrid::dyadic((0.0, 1.0), 3);
        let pts = g.points();
        assert_eq!(pts.len(), 24);
        for &x in &pts {
            let y = (x + 0.125).rem_euclid(1.0);
            assert!(pts.iter().any(|&p| (p - y).abs() < 1e-15));
            assert!((x * 8.0).fract() != 0.0);
        }
    }

    #[test]
    fn audit_examples_and_soundness() {
        let line = ActionSystem::line(GroupChain::line_dyadic(1, 0..=6).unwrap(), 4).unwrap();
        let f = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
        let xk = BorelRegion::interval(-0.5, 0.5);
        let grid = AuditGrid::dyadic((-2.0, 2.0), 6);
        let trunc = TruncationPolicy::windows(vec![(-8.0, 8.0)]).unwrap();
        let alphas = [0.25, 0.5, 1.0, 100.0];
        let r = maximal_inequality_audit(&line, &f, &xk, 1.5, &alphas, 6, &grid, &trunc, None).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.lhs[3], r.rhs[3]), (0.0, 0.0));
        let corrupt = |_: f64, v: f64| v + 1e9;
        let bad = maximal_inequality_audit(&line, &f, &xk, 1.5, &[4.0], 6, &grid, &trunc, Some(&corrupt)).unwrap();
        assert!(!bad.pass);
    }
}
