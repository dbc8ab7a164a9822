//! Registered experiments.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use super::config::{LevelSchedule, ScenarioConfig, ScenarioSection, Tolerances, TruncationSection};
use crate::actions::{
    crucial_identity_report, hitting_bound, integrability_certificate, ActionKind, ActionSystem, BorelRegion,
    MeasuredSpace, Point,
};
use crate::averaging::{
    lattice_average, lattice_points_in, orbital_integral, product_average, ratio_average, restricted_ambient,
    restricted_average, Integrand, ProductIntegrand, Reference,
};
use crate::diagnostics::{
    ae_limit_estimate, divergence_gap, maximal_inequality_audit, AuditGrid, SampleOptions, DIVERGENCE_FACTOR,
    JESSEN_FINAL_MEDIAN_BOUND,
};
use crate::error::{OrbintError, Result};
use crate::groups::{ExactReal, GroupChain, GroupElement, LevelRef, Rational, TruncationPolicy};
use crate::martingale::{orbit_conditional_expectation, reversed_martingale_check, MartingaleTolerance, OrbitPartition};
use crate::measures::{fell_convergence_report, level_integral, modular_condition_report, Profile, TestFunction};

/// One CSV line before formatting.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub point_index: usize,
    pub level: u64,
    pub value: Complex64,
    pub reference: Complex64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    /// Serialized reports of the underlying operations, keyed by operation.
    pub reports: Map<String, Value>,
}

impl Outcome {
    fn report<T: serde::Serialize>(&mut self, key: &str, r: &T) {
        let v = serde_json::to_value(r).unwrap_or(Value::Null);
        self.reports.insert(key.to_string(), v);
    }
}

pub struct Scenario {
    pub name: &'static str,
    /// Result the scenario illustrates.
    pub result: &'static str,
    pub description: &'static str,
    pub defaults: fn() -> ScenarioConfig,
    pub run: fn(&ScenarioConfig) -> Result<Outcome>,
}

/// Alphabetical.
pub static REGISTRY: [Scenario; 14] = [
    Scenario {
        name: "civin-lattice-2d",
        result: "Civin's lattice theorem",
        description: "Dyadic lattices of R^2 on the 2-torus: fundamental-domain counts, exact aliasing of trigonometric polynomials, independence of the fundamental domain",
        defaults: civin_defaults,
        run: civin_run,
    },
    Scenario {
        name: "exchangeable-lln",
        result: "Hewitt-Savage exchangeable law of large numbers",
        description: "Finite symmetric groups on a Bernoulli(p) cylinder: orbital conditional expectations form a reversed martingale and approach p",
        defaults: exchangeable_defaults,
        run: exchangeable_run,
    },
    Scenario {
        name: "fell-and-mc",
        result: "Fell normalization and the modular condition",
        description: "Level Haar measures of dyadic lattices converge vaguely to Lebesgue measure; the affine levels carry a left-invariant measure after multiplying by the modular function",
        defaults: fell_defaults,
        run: fell_run,
    },
    Scenario {
        name: "jessen-dyadic",
        result: "Jessen's theorem",
        description: "Riemann sums of x^(-3/4) along the dyadic subsequence 2^k converge almost everywhere to the integral 4",
        defaults: jessen_defaults,
        run: jessen_run,
    },
    Scenario {
        name: "main-equivalence-line",
        result: "Main equivalence theorem for translation actions",
        description: "Dyadic lattices of R on R: bounded level hitting measures, integrability and convergence of orbital integrals hold together",
        defaults: main_equivalence_defaults,
        run: main_equivalence_run,
    },
    Scenario {
        name: "maximal-audit",
        result: "Maximal inequality for orbital integrals",
        description: "Weak-type audit alpha*mu(Q_alpha and X_k) <= c_k * integral of f over Q_alpha on the line and the circle",
        defaults: maximal_defaults,
        run: maximal_run,
    },
    Scenario {
        name: "product-GxX",
        result: "Product-action corollary",
        description: "Averages of f(ts, tx) over dyadic lattices converge to the integral over the whole group",
        defaults: product_defaults,
        run: product_run,
    },
    Scenario {
        name: "proper-action-line",
        result: "Convergence for proper actions",
        description: "R acting properly on itself: orbital integrals of compactly supported functions converge at every sampled point; the non-proper affine action on R fails integrability",
        defaults: proper_defaults,
        run: proper_run,
    },
    Scenario {
        name: "ratio-local",
        result: "Local ratio averages",
        description: "Ratio averages restricted to a bounded region converge to the normalized integral over the region",
        defaults: ratio_defaults,
        run: ratio_run,
    },
    Scenario {
        name: "rational-E-counterexample",
        result: "Rational restriction counterexample",
        description: "Restricting to the rationals E: the lattice side tends to 1 at s = 0 while the ambient side is 0; at irrational s both sides vanish",
        defaults: rational_defaults,
        run: rational_run,
    },
    Scenario {
        name: "restricted-E",
        result: "Restricted averages over Es",
        description: "Lattice averages restricted to Es with E an interval converge to the ambient restricted integral",
        defaults: restricted_defaults,
        run: restricted_run,
    },
    Scenario {
        name: "riemann-exact-characters",
        result: "Riemann sums of characters",
        description: "Riemann sums of e_m with n points equal e_m(x) when n divides m and 0 otherwise",
        defaults: characters_defaults,
        run: characters_run,
    },
    Scenario {
        name: "ross-stromberg-affine",
        result: "Ross-Stromberg theorem on the affine group",
        description: "The affine group acting on itself: averages over the scale levels converge, and the three routes of the crucial identity agree",
        defaults: affine_defaults,
        run: affine_run,
    },
    Scenario {
        name: "ursell-divergence",
        result: "Ursell's divergence example",
        description: "Full Riemann-sum sequence of x^(-3/4): running maxima far above the limit at most sampled points (instance \"control\" runs the bounded 1 + cos 2 pi x)",
        defaults: ursell_defaults,
        run: ursell_run,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    REGISTRY.iter().find(|s| s.name == name)
}

/// Fills fields missing from `cfg` with the scenario defaults.
pub fn effective_config(scenario: &Scenario, cfg: &ScenarioConfig) -> ScenarioConfig {
    let d = (scenario.defaults)();
    let s = &cfg.scenario;
    let mut out = cfg.clone();
    out.scenario = ScenarioSection {
        name: s.name.clone(),
        instance: s.instance.clone().or(d.scenario.instance),
        levels: s.levels.clone().or(d.scenario.levels),
        sample_size: s.sample_size.or(d.scenario.sample_size),
        seed: s.seed.or(d.scenario.seed),
        skip_singular: s.skip_singular.or(d.scenario.skip_singular),
    };
    out.tolerances = Tolerances {
        abs: cfg.tolerances.abs.or(d.tolerances.abs),
        fail_quota: cfg.tolerances.fail_quota.or(d.tolerances.fail_quota),
    };
    if cfg.truncation == TruncationSection::default() {
        out.truncation = d.truncation;
    }
    out
}

fn defaults(name: &str, levels: &str, sample_size: usize, seed: u64, abs: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::named(name);
    c.scenario.levels = Some(levels.into());
    c.scenario.sample_size = Some(sample_size);
    c.scenario.seed = Some(seed);
    c.tolerances.abs = Some(abs);
    c
}

fn with_windows(mut c: ScenarioConfig, windows: &[&str]) -> ScenarioConfig {
    c.truncation.windows = windows.iter().map(|w| w.to_string()).collect();
    c
}

fn schedule(cfg: &ScenarioConfig) -> Result<LevelSchedule> {
    cfg.level_schedule()?
        .ok_or_else(|| OrbintError::Config("scenario needs a level schedule".into()))
}

fn dyadic_exponents(cfg: &ScenarioConfig) -> Result<Vec<u32>> {
    let s = schedule(cfg)?;
    if !s.is_dyadic() {
        return Err(OrbintError::Config(format!("{} expects a dyadic:a..b schedule", cfg.scenario.name)));
    }
    s.values()
        .into_iter()
        .map(|v| u32::try_from(v).ok().filter(|&k| k <= 40))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| OrbintError::Config("dyadic exponent too large".into()))
}

fn plain_values(cfg: &ScenarioConfig) -> Result<Vec<u64>> {
    let s = schedule(cfg)?;
    if s.is_dyadic() {
        return Err(OrbintError::Config(format!("{} expects an all: or list: schedule", cfg.scenario.name)));
    }
    let v = s.values();
    if v.contains(&0) {
        return Err(OrbintError::Config("level 0 is not a valid n".into()));
    }
    Ok(v)
}

fn seed(cfg: &ScenarioConfig) -> u64 {
    cfg.scenario.seed.unwrap_or(0)
}

fn sample_size(cfg: &ScenarioConfig) -> usize {
    cfg.scenario.sample_size.unwrap_or(1)
}

fn abs_tol(cfg: &ScenarioConfig) -> f64 {
    cfg.tolerances.abs.unwrap_or(1e-6)
}

fn trunc(cfg: &ScenarioConfig) -> Result<TruncationPolicy> {
    Ok(cfg.truncation_policy()?.unwrap_or_else(TruncationPolicy::compact))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn power_delta(cfg: &ScenarioConfig) -> Result<f64> {
    match cfg.scenario.instance.as_deref() {
        None => Ok(0.75),
        Some(s) => s
            .parse::<f64>()
            .ok()
            .filter(|d| (0.0..1.0).contains(d))
            .ok_or_else(|| OrbintError::Config(format!("instance {s:?} is not an exponent in [0, 1)"))),
    }
}

fn jessen_defaults() -> ScenarioConfig {
    let mut c = defaults("jessen-dyadic", "dyadic:0..14", 1000, 2024, JESSEN_FINAL_MEDIAN_BOUND);
    c.scenario.skip_singular = Some(true);
    c.scenario.instance = Some("0.75".into());
    c
}

fn jessen_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let delta = power_delta(cfg)?;
    let limit = 1.0 / (1.0 - delta);
    let sys = ActionSystem::torus(GroupChain::torus_dyadic(ks.iter().copied())?)?;
    let opts = SampleOptions {
        skip_singular: cfg.scenario.skip_singular.unwrap_or(false),
        fail_quota: cfg.tolerances.fail_quota.unwrap_or(1.0),
        ..SampleOptions::new(sample_size(cfg), seed(cfg))
    };
    let levels: Vec<usize> = (0..ks.len()).collect();
    let bound = abs_tol(cfg);
    let v = ae_limit_estimate(
        &sys,
        &Integrand::Power { delta },
        &levels,
        Reference::Explicit(c(limit)),
        bound,
        &opts,
        &TruncationPolicy::compact(),
    )?;
    let mut out = Outcome::default();
    for (i, t) in v.trajectories.iter().enumerate() {
        for (j, val) in t.values.iter().enumerate() {
            out.rows.push(Row {
                point_index: i,
                level: u64::from(ks[j]),
                value: *val,
                reference: t.reference,
            });
        }
    }
    let tail = &v.median_deviation[v.median_deviation.len().saturating_sub(7)..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let last = *v.median_deviation.last().expect("nonempty schedule");
    out.checks.push(Check::new(
        "median deviation strictly decreasing over the last seven levels",
        decreasing,
        format!("{tail:?}"),
    ));
    out.checks.push(Check::new(
        "final median deviation below bound",
        last < bound,
        format!("{last:.4} < {bound}"),
    ));
    out.report("ae_limit_estimate", &v);
    Ok(out)
}

fn ursell_defaults() -> ScenarioConfig {
    let mut c = defaults("ursell-divergence", "all:1..10000", 200, 2024, DIVERGENCE_FACTOR);
    c.scenario.instance = Some("0.75".into());
    c
}

fn ursell_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ns = plain_values(cfg)?;
    let n_max = *ns.iter().max().expect("nonempty") as usize;
    let mut checkpoints: Vec<usize> = (1..)
        .map(|j| 10usize.pow(j))
        .take_while(|&n| n < n_max)
        .collect();
    checkpoints.push(n_max);
    let control = cfg.scenario.instance.as_deref() == Some("control");
    let (f, limit) = if control {
        (Integrand::Sum(vec![Integrand::constant(1.0), Integrand::scaled(0.5, Integrand::Sum(vec![Integrand::character1(1), Integrand::character1(-1)]))]), 1.0)
    } else {
        let delta = power_delta(cfg)?;
        (Integrand::Power { delta }, 1.0 / (1.0 - delta))
    };
    let sys = ActionSystem::torus(GroupChain::torus_dyadic(0..=0)?)?;
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let factor = abs_tol(cfg);
    let r = divergence_gap(&sys, &f, &checkpoints, &xs, limit, factor, cfg.scenario.skip_singular.unwrap_or(false))?;
    let mut out = Outcome::default();
    for (i, maxima) in r.running_max.iter().enumerate() {
        for (n, m) in checkpoints.iter().zip(maxima) {
            out.rows.push(Row {
                point_index: i,
                level: *n as u64,
                value: c(*m),
                reference: c(limit),
            });
        }
    }
    let detail = format!(
        "{:.1}% of points exceed {factor} times the limit {limit}",
        100.0 * r.exceed_fraction
    );
    if control {
        out.checks.push(Check::new("bounded control raises no divergence flag", !r.flag, detail));
    } else {
        out.checks.push(Check::new(&format!("flag raised: {}", r.label), r.flag, detail));
    }
    out.report("divergence_gap", &r);
    Ok(out)
}

fn characters_defaults() -> ScenarioConfig {
    let mut c = defaults("riemann-exact-characters", "all:1..32", 10, 1, 1e-12);
    c.scenario.instance = Some("0..32".into());
    c
}

fn characters_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ns = plain_values(cfg)?;
    let freqs: super::config::IntRange = cfg.scenario.instance.as_deref().unwrap_or("0..32").parse()?;
    let sys = ActionSystem::torus(GroupChain::torus_cyclic(ns.iter().copied())?)?;
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let trunc = TruncationPolicy::compact();
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    let width = (freqs.end - freqs.start + 1) as usize;
    for (i, x) in xs.iter().enumerate() {
        let x0 = x.chart()[0];
        for (j, m) in freqs.iter().enumerate() {
            let f = Integrand::character1(m as i64);
            for (level, &n) in ns.iter().enumerate() {
                let v = orbital_integral(&sys, level, &f, x, &trunc)?;
                let expected = if m % n == 0 {
                    crate::averaging::unit_phase(m as f64 * x0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((v - expected).norm());
                out.rows.push(Row {
                    point_index: i * width + j,
                    level: n,
                    value: v,
                    reference: expected,
                });
            }
        }
    }
    let tol = abs_tol(cfg);
    out.checks.push(Check::new(
        "Riemann sums of characters match e_m(x)*[n divides m]",
        worst <= tol,
        format!("max error {worst:.3e} (tolerance {tol:.0e})"),
    ));
    Ok(out)
}

fn affine_defaults() -> ScenarioConfig {
    let mut c = with_windows(defaults("ross-stromberg-affine", "dyadic:0..4", 8, 7, 1e-5), &["-3..3", "-10..10"]);
    c.truncation.cells_per_unit = 128;
    c.tolerances.fail_quota = Some(0.0);
    c
}

fn affine_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ms = dyadic_exponents(cfg)?;
    let trunc = trunc(cfg)?;
    let window = vec![trunc.window(0)?, trunc.window(1)?];
    let mut sys = ActionSystem::affine_on_itself(GroupChain::affine_levels(ms.iter().copied())?, window)?;
    sys.space = sys.space.with_sample_window(vec![(-0.5, 0.5), (-0.5, 0.5)]);
    let bump = TestFunction::new(vec![0.1, -0.2], vec![0.8, 0.9], Profile::Smooth);
    let f = Integrand::Bump(bump.clone());
    let opts = SampleOptions {
        fail_quota: cfg.tolerances.fail_quota.unwrap_or(0.0),
        ..SampleOptions::new(sample_size(cfg), seed(cfg))
    };
    let levels: Vec<usize> = (0..ms.len()).collect();
    let v = ae_limit_estimate(&sys, &f, &levels, Reference::Ambient, abs_tol(cfg), &opts, &trunc)?;
    let mut out = Outcome::default();
    for (i, t) in v.trajectories.iter().enumerate() {
        for (j, val) in t.values.iter().enumerate() {
            out.rows.push(Row {
                point_index: i,
                level: u64::from(ms[j]),
                value: *val,
                reference: t.reference,
            });
        }
    }
    out.checks.push(Check::new(
        "orbital integrals over the scale levels converge",
        v.pass,
        format!(
            "{:.1}% of points within {} at the last level; median deviations {:?}",
            100.0 * v.converged_fraction,
            abs_tol(cfg),
            v.median_deviation
        ),
    ));
    let h = TestFunction::new(vec![-0.3, 0.4], vec![0.6, 0.7], Profile::Poly(1));
    let ci = crucial_identity_report(&sys, &f, &h, LevelRef::Ambient, &TruncationPolicy::compact(), 1 << 14, 1e-4)?;
    out.checks.push(Check::new(
        "crucial identity routes agree",
        ci.pass,
        format!("max pairwise gap {:.3e}", ci.max_pairwise_gap),
    ));
    out.report("ae_limit_estimate", &v);
    out.report("crucial_identity", &ci);
    Ok(out)
}

fn line_system(ks: &[u32]) -> Result<ActionSystem> {
    ActionSystem::line(GroupChain::line_dyadic(1, ks.iter().copied())?, 4)
}

fn proper_defaults() -> ScenarioConfig {
    with_windows(defaults("proper-action-line", "dyadic:0..12", 200, 11, 1e-9), &["-8..8"])
}

fn smooth_panel() -> Vec<TestFunction> {
    vec![
        TestFunction::bump1(0.3, 0.7, Profile::Smooth),
        TestFunction::bump1(-0.4, 1.3, Profile::Poly(3)),
        TestFunction::bump1(0.1, 0.9, Profile::Spline(4)),
    ]
}

fn proper_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let f = Integrand::Bump(TestFunction::bump1(0.3, 0.7, Profile::Smooth));
    let opts = SampleOptions {
        fail_quota: cfg.tolerances.fail_quota.unwrap_or(0.0),
        ..SampleOptions::new(sample_size(cfg), seed(cfg))
    };
    let levels: Vec<usize> = (0..ks.len()).collect();
    let v = ae_limit_estimate(&sys, &f, &levels, Reference::Ambient, abs_tol(cfg), &opts, &trunc)?;
    let mut out = Outcome::default();
    push_trajectories(&mut out, &v.trajectories, &ks);
    out.checks.push(Check::new(
        "orbital integrals converge at every sampled point",
        v.pass,
        format!("converged fraction {:.3}", v.converged_fraction),
    ));
    let cover: Vec<BorelRegion> = sys.space.exhaustion.clone();
    let cert = integrability_certificate(&sys, &cover, 20, seed(cfg), &trunc)?;
    out.checks.push(Check::new("translation action is integrable", cert.pass, format!("{:?}", cert.finite_fractions)));
    let affine = ActionSystem::affine_on_line(GroupChain::affine_levels([0])?)?;
    let bad = integrability_certificate(
        &affine,
        &[BorelRegion::closed(vec![(-1.0, 1.0)])],
        5,
        seed(cfg),
        &TruncationPolicy::new(vec![(-2.0, 2.0), (-2.0, 2.0)], 64, 0.05)?,
    )?;
    out.checks.push(Check::new(
        "affine action on R is flagged non-integrable",
        !bad.pass,
        format!("{:?}", bad.finite_fractions),
    ));
    out.report("ae_limit_estimate", &v);
    out.report("integrability", &cert);
    out.report("integrability_negative_control", &bad);
    Ok(out)
}

fn push_trajectories(out: &mut Outcome, ts: &[crate::averaging::Trajectory], labels: &[u32]) {
    for (i, t) in ts.iter().enumerate() {
        for (j, val) in t.values.iter().enumerate() {
            out.rows.push(Row {
                point_index: i,
                level: u64::from(labels[j]),
                value: *val,
                reference: t.reference,
            });
        }
    }
}

fn main_equivalence_defaults() -> ScenarioConfig {
    with_windows(defaults("main-equivalence-line", "dyadic:0..10", 50, 12, 1e-6), &["-8..8"])
}

fn main_equivalence_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let levels: Vec<usize> = (0..ks.len()).collect();
    let mut out = Outcome::default();

    // bounded hitting: ρₙ{t : t + x ∈ [-k, k]} ≤ 2k + 1
    let mut bounded = true;
    let mut bounds = Vec::new();
    for (i, region) in sys.space.exhaustion.iter().enumerate() {
        let b = hitting_bound(&sys, i, region, &levels, &xs, &trunc)?;
        let k = (i + 1) as f64;
        bounded &= b.bound <= 2.0 * k + 1.0;
        bounds.push(b);
    }
    out.checks.push(Check::new(
        "level hitting measures bounded on the exhaustion",
        bounded,
        bounds.iter().map(|b| format!("{:.4}", b.bound)).collect::<Vec<_>>().join(", "),
    ));
    let cert = integrability_certificate(&sys, &sys.space.exhaustion, xs.len().min(20), seed(cfg), &trunc)?;
    out.checks.push(Check::new("integrability", cert.pass, format!("{:?}", cert.finite_fractions)));

    let opts = SampleOptions {
        fail_quota: cfg.tolerances.fail_quota.unwrap_or(0.0),
        ..SampleOptions::new(xs.len(), seed(cfg))
    };
    let mut converges = true;
    let mut offset = 0;
    for phi in smooth_panel() {
        let v = ae_limit_estimate(&sys, &Integrand::Bump(phi), &levels, Reference::Ambient, abs_tol(cfg), &opts, &trunc)?;
        converges &= v.pass;
        for (i, t) in v.trajectories.iter().enumerate() {
            for (j, val) in t.values.iter().enumerate() {
                out.rows.push(Row {
                    point_index: offset + i,
                    level: u64::from(ks[j]),
                    value: *val,
                    reference: t.reference,
                });
            }
        }
        offset += v.trajectories.len();
    }
    out.checks.push(Check::new(
        "orbital integrals of the test panel converge",
        converges,
        format!("{} functions, {} points", smooth_panel().len(), xs.len()),
    ));
    out.checks.push(Check::new(
        "conditions and convergence agree",
        (bounded && cert.pass) == converges,
        format!("conditions hold: {}, convergence: {converges}", bounded && cert.pass),
    ));
    out.report("hitting_bounds", &bounds);
    out.report("integrability", &cert);
    Ok(out)
}

fn ratio_defaults() -> ScenarioConfig {
    with_windows(defaults("ratio-local", "dyadic:0..12", 50, 13, 1e-3), &["-8..8"])
}

fn ratio_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let b = BorelRegion::interval(0.0, 1.0);
    let f = Integrand::Product(vec![Integrand::Coordinate(0), Integrand::Coordinate(0), Integrand::Indicator(b.clone())]);
    // ∫₀¹ x² dx / |[0, 1]|
    let limit = c(1.0 / 3.0);
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        for (level, &k) in ks.iter().enumerate() {
            let v = ratio_average(&sys, level, &f, &b, x, &trunc)?;
            if level + 1 == ks.len() {
                worst = worst.max((v - limit).norm());
            }
            out.rows.push(Row {
                point_index: i,
                level: u64::from(k),
                value: v,
                reference: limit,
            });
        }
    }
    let tol = abs_tol(cfg);
    out.checks.push(Check::new(
        "ratio averages approach the normalized integral",
        worst <= tol,
        format!("max deviation at the last level {worst:.3e}"),
    ));
    Ok(out)
}

fn restricted_defaults() -> ScenarioConfig {
    with_windows(defaults("restricted-E", "dyadic:0..12", 20, 14, 2e-3), &["-8..8"])
}

fn restricted_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let e = BorelRegion::interval(0.0, 1.0);
    let f = Integrand::Bump(TestFunction::bump1(0.0, 1.5, Profile::Poly(2)));
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let mut rng = ChaCha8Rng::seed_from_u64(seed(cfg));
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let s = GroupElement::real(&[rng.random_range(-1.0..1.0)])?;
        let reference = restricted_ambient(&sys, &f, &e, &s, x, &trunc)?;
        for (level, &k) in ks.iter().enumerate() {
            let v = restricted_average(&sys, level, &f, &e, &s, x, &trunc)?;
            if level + 1 == ks.len() {
                worst = worst.max((v - reference).norm());
            }
            out.rows.push(Row {
                point_index: i,
                level: u64::from(k),
                value: v,
                reference,
            });
        }
    }
    let tol = abs_tol(cfg);
    out.checks.push(Check::new(
        "restricted lattice averages approach the ambient restricted integral",
        worst <= tol,
        format!("max deviation at the last level {worst:.3e}"),
    ));
    Ok(out)
}

fn rational_defaults() -> ScenarioConfig {
    with_windows(defaults("rational-E-counterexample", "dyadic:0..12", 100, 10, 0.0), &["-64..64"])
}

fn rational_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let q = BorelRegion::RationalSet { window: (0.0, 1.0) };
    let f = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
    let zero = GroupElement::real(&[0.0])?;
    let x = Point::real1(0.0);
    let mut out = Outcome::default();
    let ambient = restricted_ambient(&sys, &f, &q, &zero, &x, &trunc)?;
    let mut exact = true;
    for (level, &k) in ks.iter().enumerate() {
        let v = restricted_average(&sys, level, &f, &q, &zero, &x, &trunc)?;
        exact &= v == c(1.0 + (-f64::from(k)).exp2());
        out.rows.push(Row {
            point_index: 0,
            level: u64::from(k),
            value: v,
            reference: ambient,
        });
    }
    out.checks.push(Check::new(
        "lattice side at s = 0 equals 1 + 2^-n",
        exact,
        "tends to 1".into(),
    ));
    out.checks.push(Check::new("ambient side at s = 0 is 0", ambient == c(0.0), format!("{ambient}")));
    let mut rng = ChaCha8Rng::seed_from_u64(seed(cfg));
    let mut vanish = true;
    for i in 0..sample_size(cfg) {
        let a = Rational::new(rng.random_range(-50..50), rng.random_range(1..64));
        let b = Rational::new(rng.random_range(1..40) * if rng.random::<bool>() { 1 } else { -1 }, rng.random_range(1..64));
        let s = GroupElement::exact_real(vec![ExactReal::with_sqrt2(a, b)])?;
        let level = rng.random_range(0..ks.len());
        let lattice = restricted_average(&sys, level, &f, &q, &s, &x, &trunc)?;
        let amb = restricted_ambient(&sys, &f, &q, &s, &x, &trunc)?;
        vanish &= lattice == c(0.0) && amb == c(0.0);
        out.rows.push(Row {
            point_index: i + 1,
            level: u64::from(ks[level]),
            value: lattice,
            reference: amb,
        });
    }
    out.checks.push(Check::new(
        "both sides vanish at irrational s",
        vanish,
        format!("{} shifts q + r*sqrt(2)", sample_size(cfg)),
    ));
    Ok(out)
}

fn product_defaults() -> ScenarioConfig {
    with_windows(defaults("product-GxX", "dyadic:0..10", 30, 15, 2e-3), &["-8..8"])
}

fn product_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let sys = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let f = ProductIntegrand::Tensor {
        group: Integrand::Indicator(BorelRegion::interval(0.0, 1.0)),
        space: Integrand::Coordinate(0),
    };
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let mut rng = ChaCha8Rng::seed_from_u64(seed(cfg));
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let s0: f64 = rng.random_range(-1.0..1.0);
        let s = GroupElement::real(&[s0])?;
        // ∫_{-s}^{1-s} (t + x) dt
        let reference = c(0.5 - s0 + x.chart()[0]);
        for (level, &k) in ks.iter().enumerate() {
            let v = product_average(&sys, level, &f, &s, x, &trunc)?;
            if level + 1 == ks.len() {
                worst = worst.max((v - reference).norm());
            }
            out.rows.push(Row {
                point_index: i,
                level: u64::from(k),
                value: v,
                reference,
            });
        }
    }
    let tol = abs_tol(cfg);
    out.checks.push(Check::new(
        "product averages approach the ambient integral",
        worst <= tol,
        format!("max deviation at the last level {worst:.3e}"),
    ));
    Ok(out)
}

fn civin_defaults() -> ScenarioConfig {
    with_windows(defaults("civin-lattice-2d", "dyadic:0..8", 5, 8, 1e-12), &["-3..3"])
}

fn civin_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let chain = GroupChain::line_dyadic(2, ks.iter().copied())?;
    let sys = ActionSystem::new(chain, MeasuredSpace::torus(2), ActionKind::Translation)?;
    let trunc = trunc(cfg)?;
    let d = BorelRegion::half_open(vec![(0.0, 1.0); 2]);
    let shifted = BorelRegion::half_open(vec![(0.3, 1.3), (-0.7, 0.3)]);
    let terms: Vec<(Vec<i64>, Complex64)> = vec![
        (vec![0, 0], Complex64::new(0.7, 0.0)),
        (vec![1, 0], Complex64::new(0.5, -0.2)),
        (vec![3, -5], Complex64::new(-1.1, 0.4)),
        (vec![256, 0], Complex64::new(0.3, 0.3)),
        (vec![-256, 512], Complex64::new(0.25, 0.0)),
        (vec![64, 128], Complex64::new(0.4, -0.1)),
    ];
    let f = Integrand::trig_polynomial(&terms);
    let xs = sys.space.sample_many(seed(cfg), sample_size(cfg));
    let mut out = Outcome::default();
    let mut counts = true;
    for (level, &k) in ks.iter().enumerate() {
        counts &= lattice_points_in(&sys, level, &d, &trunc)?.len() == 1usize << (2 * k);
    }
    out.checks.push(Check::new("fundamental domain holds 4^n lattice points", counts, String::new()));
    let (mut worst, mut shift_gap): (f64, f64) = (0.0, 0.0);
    for (i, x) in xs.iter().enumerate() {
        let xv = x.chart();
        for (level, &k) in ks.iter().enumerate() {
            let step = 1i64 << k;
            // Σ c_m e_m(x) over frequencies in 2^k ℤ²
            let expected: Complex64 = terms
                .iter()
                .filter(|(m, _)| m.iter().all(|v| v % step == 0))
                .map(|(m, cm)| cm * crate::averaging::unit_phase(m[0] as f64 * xv[0] + m[1] as f64 * xv[1]))
                .sum();
            let v = lattice_average(&sys, level, &f, &d, x, &trunc)?;
            let w = lattice_average(&sys, level, &f, &shifted, x, &trunc)?;
            worst = worst.max((v - expected).norm());
            shift_gap = shift_gap.max((v - w).norm());
            out.rows.push(Row {
                point_index: i,
                level: u64::from(k),
                value: v,
                reference: expected,
            });
        }
    }
    let tol = abs_tol(cfg);
    out.checks.push(Check::new(
        "lattice averages equal the aliased Fourier sum",
        worst <= tol,
        format!("max error {worst:.2e}"),
    ));
    out.checks.push(Check::new(
        "averages do not depend on the fundamental domain",
        shift_gap <= tol,
        format!("max gap {shift_gap:.2e}"),
    ));
    Ok(out)
}

fn exchangeable_defaults() -> ScenarioConfig {
    let mut c = defaults(
        "exchangeable-lln",
        "list:1,2,4,8,16,32,64,128,256",
        1000,
        9,
        4.0 * (0.3f64 * 0.7 / 256.0).sqrt(),
    );
    c.scenario.instance = Some("0.3".into());
    c.tolerances.fail_quota = Some(0.01);
    c
}

fn exchangeable_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ns = plain_values(cfg)?;
    let p: f64 = match cfg.scenario.instance.as_deref() {
        None => 0.3,
        Some(s) => s
            .parse()
            .ok()
            .filter(|p| (0.0..=1.0).contains(p))
            .ok_or_else(|| OrbintError::Config(format!("instance {s:?} is not a probability")))?,
    };
    let len = *ns.iter().max().expect("nonempty") as usize;
    let space = MeasuredSpace::cylinder(p, len);
    let pts = space.sample_many(seed(cfg), sample_size(cfg));
    let parts: Vec<OrbitPartition> = ns.iter().map(|&n| OrbitPartition::Exchangeable { n: n as usize }).collect();
    let f = Integrand::Coordinate(0);
    let tol = MartingaleTolerance {
        tower: 1e-10,
        band: abs_tol(cfg),
        min_fraction: 1.0 - cfg.tolerances.fail_quota.unwrap_or(0.0),
    };
    let r = reversed_martingale_check(&parts, &f, &pts, c(p), tol)?;
    let mut out = Outcome::default();
    for (i, x) in pts.iter().enumerate() {
        for (part, &n) in parts.iter().zip(&ns) {
            out.rows.push(Row {
                point_index: i,
                level: n,
                value: orbit_conditional_expectation(part, &f, x)?,
                reference: c(p),
            });
        }
    }
    out.checks.push(Check::new(
        "tower property",
        r.tower_residual <= tol.tower,
        format!("residual {:.2e}", r.tower_residual),
    ));
    out.checks.push(Check::new(
        "conditional expectations approach p",
        r.fraction_within_band >= tol.min_fraction,
        format!("{:.1}% within {:.4}", 100.0 * r.fraction_within_band, tol.band),
    ));
    out.report("reversed_martingale", &r);
    Ok(out)
}

fn maximal_defaults() -> ScenarioConfig {
    with_windows(defaults("maximal-audit", "dyadic:0..8", 1, 0, 1e-3), &["-8..8"])
}

fn maximal_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let top = *ks.last().expect("nonempty");
    let cap = ks.len() - 1;
    let alphas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let line = line_system(&ks)?;
    let trunc = trunc(cfg)?;
    let xk = BorelRegion::interval(-0.5, 0.5);
    let grid = AuditGrid::dyadic((-2.0, 2.0), top);
    let unit = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
    let power = Integrand::Product(vec![Integrand::Power { delta: 0.75 }, unit.clone()]);
    let torus = ActionSystem::torus(GroupChain::torus_dyadic(ks.iter().copied())?)?;
    let tgrid = AuditGrid::dyadic((0.0, 1.0), top);
    let whole = BorelRegion::half_open(vec![(0.0, 1.0)]);
    let cases: Vec<(&str, &ActionSystem, Integrand, &BorelRegion, f64, &AuditGrid, TruncationPolicy)> = vec![
        ("line 1_[0,1]", &line, unit.clone(), &xk, 1.5, &grid, trunc.clone()),
        ("line x^-3/4 on [0,1]", &line, power, &xk, 1.5, &grid, trunc.clone()),
        ("circle 1", &torus, Integrand::constant(1.0), &whole, 1.0, &tgrid, TruncationPolicy::compact()),
        ("circle x^-3/4", &torus, Integrand::Power { delta: 0.75 }, &whole, 1.0, &tgrid, TruncationPolicy::compact()),
    ];
    let mut out = Outcome::default();
    for (ci, (name, sys, f, region, c_k, g, tr)) in cases.iter().enumerate() {
        let r = maximal_inequality_audit(sys, f, region, *c_k, &alphas, cap, g, tr, None)?;
        for (ai, (l, rhs)) in r.lhs.iter().zip(&r.rhs).enumerate() {
            out.rows.push(Row {
                point_index: ci,
                level: ai as u64,
                value: c(*l),
                reference: c(*rhs),
            });
        }
        out.checks.push(Check::new(&format!("{name} satisfies the weak-type bound"), r.pass, format!("lhs {:?} rhs {:?}", r.lhs, r.rhs)));
        out.report(name, &r);
    }
    Ok(out)
}

fn fell_defaults() -> ScenarioConfig {
    with_windows(defaults("fell-and-mc", "dyadic:0..12", 1, 0, 1e-3), &["-4..4"])
}

fn fell_run(cfg: &ScenarioConfig) -> Result<Outcome> {
    let ks = dyadic_exponents(cfg)?;
    let chain = GroupChain::line_dyadic(1, ks.iter().copied())?;
    let trunc = trunc(cfg)?;
    // smooth bumps reach rounding level within a few levels; these keep a
    // visible rate
    let panel = vec![
        TestFunction::bump1(
            1.0 / 3.0,
            0.9,
            Profile::Lacunary {
                order: 6,
                exponent: 1.1,
                amplitude: 0.25,
            },
        ),
        TestFunction::bump1(0.1, 0.7, Profile::Poly(1)),
        TestFunction::bump1(-0.2, 1.1, Profile::Indicator),
    ];
    let tol = abs_tol(cfg);
    let fell = fell_convergence_report(&chain, 0..ks.len(), &panel, &trunc, tol)?;
    let mut out = Outcome::default();
    for (i, phi) in panel.iter().enumerate() {
        let exact = c(phi.integral());
        for (level, &k) in ks.iter().enumerate() {
            out.rows.push(Row {
                point_index: i,
                level: u64::from(k),
                value: c(level_integral(&chain, LevelRef::Index(level), phi, &trunc)?),
                reference: exact,
            });
        }
    }
    out.checks.push(Check::new(
        "level Haar measures converge vaguely",
        fell.pass,
        format!("max deviation at the last level {:.2e}", fell.max_deviation),
    ));
    let affine = GroupChain::affine_levels([3])?;
    let translators: Vec<GroupElement> = [(1, 0.25), (-2, 0.5), (3, -0.75), (5, 1.0), (-7, -0.5)]
        .iter()
        .map(|&(k, b)| GroupElement::affine_level(3, k, b))
        .collect();
    let bumps = vec![
        TestFunction::new(vec![0.0, 0.0], vec![0.7, 0.8], Profile::Poly(2)),
        TestFunction::new(vec![0.3, -0.4], vec![0.5, 0.6], Profile::Smooth),
    ];
    let mc_trunc = TruncationPolicy::new(vec![(-6.0, 6.0), (-12.0, 12.0)], 1024, 0.05)?;
    let mc = modular_condition_report(&affine, 0, &bumps, &translators, &mc_trunc, 1e-6)?;
    out.checks.push(Check::new(
        "modular condition on an affine scale level",
        mc.pass,
        format!("max residual {:.2e}", mc.max_residual),
    ));
    out.report("fell", &fell);
    out.report("modular_condition", &mc);
    Ok(out)
}
