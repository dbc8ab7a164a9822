//! Orbital integrals and the averages built from them.

mod integrand;
pub mod power;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use integrand::{unit_phase, ClosureFn, Integrand};

use crate::actions::{ActionKind, ActionSystem, BorelRegion, Point, SpaceDomain};
use crate::error::{OrbintError, Result};
use crate::groups::{compose, inverse, GroupChain, GroupElement, GroupId, LevelRef, SupportHint, TruncationPolicy};
use crate::measures::{self, level_atom_weight};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_finite(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(OrbintError::QuadratureFailure(format!("non-finite average {v}")))
    }
}

/// Visits `(tx, weight)` over the atoms of a level, skipping atoms that
/// cannot carry `x` into `support`.
fn visit_orbit(
    system: &ActionSystem,
    level: LevelRef,
    support: Option<&[(f64, f64)]>,
    x: &Point,
    trunc: &TruncationPolicy,
    visit: &mut dyn FnMut(&GroupElement, &Point, f64) -> Result<()>,
) -> Result<()> {
    let hint = system.orbit_hint(support, x);
    match (system.kind, x) {
        (ActionKind::Translation, Point::Real(xs)) => {
            let mut y = Point::Real(xs.clone());
            measures::visit_haar(&system.chain, level, trunc, &hint, &mut |t, w| {
                if let Point::Real(buf) = &mut y {
                    system.translate_into(t, xs, buf)?;
                }
                visit(t, &y, w)
            })
        }
        _ => measures::visit_haar(&system.chain, level, trunc, &hint, &mut |t, w| {
            let y = system.act(t, x)?;
            visit(t, &y, w)
        }),
    }
}

/// `∫_{Gₙ} f(tx) dρₙ(t)`. On the torus with level `ℤ/nℤ` this is the
/// Riemann sum `(1/n) Σⱼ f(x + j/n)`.
pub fn orbital_integral(
    system: &ActionSystem,
    level: usize,
    f: &Integrand,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let group = system.chain.level(level)?;
    if let (ActionKind::Translation, GroupId::FiniteCyclic(n), Point::Real(xs)) = (system.kind, group, x) {
        if xs.len() == 1 {
            let w = level_atom_weight(&system.chain, level)?;
            return riemann_sum(f, xs[0], n as usize).map(|s| s * (w * n as f64));
        }
    }
    let support = f.support_box();
    let mut acc = ZERO;
    visit_orbit(system, LevelRef::Index(level), support.as_deref(), x, trunc, &mut |_, y, w| {
        acc += f.eval(y)? * w;
        Ok(())
    })?;
    check_finite(acc)
}

/// `(1/n) Σⱼ f(x + j/n)` on the circle.
pub fn riemann_sum(f: &Integrand, x: f64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(OrbintError::DomainError("level n must be positive".into()));
    }
    let mut acc = ZERO;
    let mut y = Point::real1(x);
    for j in 0..n {
        let v = x + j as f64 / n as f64;
        let r = v - v.floor();
        if let Point::Real(buf) = &mut y {
            buf[0] = if r >= 1.0 { 0.0 } else { r };
        }
        acc += f.eval(&y)?;
    }
    check_finite(acc / n as f64)
}

/// `R_n f(x)` without summation, for sums of characters (by orthogonality:
/// `R_n e_m = e_m · 1[n | m]`) and for `|x|^{-δ}`.
pub fn riemann_closed_form(f: &Integrand, x: f64, n: usize) -> Option<Result<Complex64>> {
    match f {
        Integrand::Constant(c) => Some(Ok(*c)),
        Integrand::Character(m) if m.len() == 1 => Some(Ok(if m[0].rem_euclid(n as i64) == 0 {
            unit_phase(m[0] as f64 * x)
        } else {
            ZERO
        })),
        Integrand::Power { delta } => Some(power::power_riemann_sum(x, n, *delta).map(|v| Complex64::new(v, 0.0))),
        Integrand::Scaled(c, g) => riemann_closed_form(g, x, n).map(|r| r.map(|v| v * c)),
        Integrand::Sum(parts) => {
            let mut acc = ZERO;
            for part in parts {
                match riemann_closed_form(part, x, n)? {
                    Ok(v) => acc += v,
                    Err(e) => return Some(Err(e)),
                }
            }
            Some(Ok(acc))
        }
        _ => None,
    }
}

/// `∫_G f(tx) dρ(t)`: closed form for translations of integrands with a
/// known integral, quadrature on the truncation window otherwise.
pub fn ambient_orbital_integral(
    system: &ActionSystem,
    f: &Integrand,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let same_space = matches!(
        (system.chain.ambient, system.space.domain),
        (GroupId::Torus(_), SpaceDomain::Torus(_)) | (GroupId::RealLine(_), SpaceDomain::RealLine(_))
    );
    if system.kind == ActionKind::Translation && same_space {
        if let Some(v) = f.closed_form_integral(&system.space.domain) {
            return Ok(v * system.chain.ambient_scale);
        }
    }
    if system.kind == ActionKind::CoordinatePermutation {
        return Err(OrbintError::Unsupported(
            "ambient orbital integral over the infinite symmetric group".into(),
        ));
    }
    let support = f.support_box();
    let mut acc = ZERO;
    visit_orbit(system, LevelRef::Ambient, support.as_deref(), x, trunc, &mut |_, y, w| {
        acc += f.eval(y)? * w;
        Ok(())
    })?;
    check_finite(acc)
}

/// `(1/ρₙ{t : tx ∈ B}) ∫_{Gₙ} (f·1_B)(tx) dρₙ(t)`.
pub fn ratio_average(
    system: &ActionSystem,
    level: usize,
    f: &Integrand,
    region: &BorelRegion,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let bbox = region.bounding_box();
    let (mut num, mut den) = (ZERO, 0.0);
    visit_orbit(system, LevelRef::Index(level), bbox.as_deref(), x, trunc, &mut |_, y, w| {
        if region.contains(y) {
            num += f.eval(y)? * w;
            den += w;
        }
        Ok(())
    })?;
    if den == 0.0 {
        return Err(OrbintError::ZeroHitting);
    }
    check_finite(num / den)
}

/// Chart box of `Es` for a translation group.
fn translated_hint(system: &ActionSystem, region: &BorelRegion, s: &GroupElement) -> SupportHint {
    if system.chain.ambient.is_compact() {
        return SupportHint::Unbounded;
    }
    match (region.bounding_box(), system.chain.ambient) {
        (Some(b), GroupId::RealLine(_)) => {
            let sc = s.chart();
            // exact coordinates are rounded in the chart; widen slightly
            SupportHint::Box(b.iter().zip(&sc).map(|(&(lo, hi), &si)| (lo + si - 1e-9, hi + si + 1e-9)).collect())
        }
        _ => SupportHint::Unbounded,
    }
}

/// `∫_{Es ∩ Gₙ} f(tx) dρₙ(t)`, with membership `t ∈ Es ⟺ ts⁻¹ ∈ E`
/// decided exactly.
pub fn restricted_average(
    system: &ActionSystem,
    level: usize,
    f: &Integrand,
    e: &BorelRegion,
    s: &GroupElement,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let s_inv = inverse(s);
    let hint = translated_hint(system, e, s);
    let mut acc = ZERO;
    measures::visit_haar(&system.chain, LevelRef::Index(level), trunc, &hint, &mut |t, w| {
        if e.contains_element(&compose(t, &s_inv)?) {
            acc += f.eval(&system.act(t, x)?)? * w;
        }
        Ok(())
    })?;
    check_finite(acc)
}

/// `∫_{Es} f(tx) dρ(t)`. Sets of Haar measure zero give 0 without
/// quadrature.
pub fn restricted_ambient(
    system: &ActionSystem,
    f: &Integrand,
    e: &BorelRegion,
    s: &GroupElement,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    let null = match e {
        BorelRegion::RationalSet { .. } => true,
        BorelRegion::Union(parts) => parts.iter().all(|p| matches!(p, BorelRegion::RationalSet { .. })),
        _ => false,
    };
    if null {
        return Ok(ZERO);
    }
    let s_inv = inverse(s);
    let hint = translated_hint(system, e, s);
    let mut acc = ZERO;
    measures::visit_haar(&system.chain, LevelRef::Ambient, trunc, &hint, &mut |t, w| {
        if e.contains_element(&compose(t, &s_inv)?) {
            acc += f.eval(&system.act(t, x)?)? * w;
        }
        Ok(())
    })?;
    check_finite(acc)
}

/// `max_{1 ≤ n ≤ N} ∫_{Gₙ} f(tx) dρₙ(t)` for nonnegative `f`.
pub fn maximal_function(
    system: &ActionSystem,
    f: &Integrand,
    x: &Point,
    level_cap: usize,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    if !f.is_nonnegative() {
        return Err(OrbintError::DomainError("maximal function needs f ≥ 0".into()));
    }
    let mut best: f64 = 0.0;
    for n in 1..=level_cap {
        best = best.max(orbital_integral(system, n, f, x, trunc)?.re);
    }
    Ok(best)
}

/// The unique `g ∈ G₀` with `gt ∈ D`, together with `gt`. `G₀` must be a
/// lattice `2^{-k}ℤ^d` and `D` a half-open box.
pub fn fundamental_reduce(
    chain: &GroupChain,
    t: &GroupElement,
    domain: &BorelRegion,
) -> Result<(GroupElement, GroupElement)> {
    let GroupId::ScaledLattice { dim, log2_inv_step } = chain.level(0)? else {
        return Err(OrbintError::NotAFundamentalDomain("base level is not a lattice".into()));
    };
    let BorelRegion::Box { bounds, half_open: true } = domain else {
        return Err(OrbintError::NotAFundamentalDomain("domain must be a half-open box".into()));
    };
    let tc = t.chart();
    if bounds.len() != dim || tc.len() != dim {
        return Err(OrbintError::NotAFundamentalDomain("dimension mismatch".into()));
    }
    let step = (-(log2_inv_step as f64)).exp2();
    let mut index = Vec::with_capacity(dim);
    for (i, &(a, b)) in bounds.iter().enumerate() {
        let guess = ((a - tc[i]) / step).floor() as i64;
        let hits: Vec<i64> = (guess - 2..=guess + 2)
            .filter(|&m| {
                let y = tc[i] + m as f64 * step;
                a <= y && y < b
            })
            .collect();
        if hits.len() != 1 {
            return Err(OrbintError::NotAFundamentalDomain(format!(
                "{} lattice translates of coordinate {i} land in the domain",
                hits.len()
            )));
        }
        index.push(hits[0]);
    }
    let g = GroupElement::lattice(log2_inv_step, &index);
    let gt = compose(&g, t)?;
    if !domain.contains_element(&gt) {
        return Err(OrbintError::NotAFundamentalDomain("reduced element escaped the domain".into()));
    }
    Ok((g, gt))
}

/// Points of `Gₙ ∩ D`.
pub fn lattice_points_in(system: &ActionSystem, level: usize, domain: &BorelRegion, trunc: &TruncationPolicy) -> Result<Vec<GroupElement>> {
    let hint = match domain.bounding_box() {
        Some(b) => SupportHint::Box(b),
        None => SupportHint::Unbounded,
    };
    let mut out = Vec::new();
    measures::visit_haar(&system.chain, LevelRef::Index(level), trunc, &hint, &mut |t, _| {
        if domain.contains_element(t) {
            out.push(t.clone());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Tolerance of the `G₀`-invariance spot check.
pub const INVARIANCE_SPOT_TOL: f64 = 1e-9;

/// `(1/|Gₙ ∩ D|) Σ_{t ∈ Gₙ ∩ D} f(tx)` for `G₀`-invariant `f`.
pub fn lattice_average(
    system: &ActionSystem,
    level: usize,
    f: &Integrand,
    domain: &BorelRegion,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    if let GroupId::ScaledLattice { dim, log2_inv_step } = system.chain.level(0)? {
        let fx = f.eval(x)?;
        for axis in 0..dim {
            for sign in [-1i64, 1] {
                let mut idx = vec![0i64; dim];
                idx[axis] = sign;
                let g = GroupElement::lattice(log2_inv_step, &idx);
                let diff = (f.eval(&system.act(&g, x)?)? - fx).norm();
                if diff > INVARIANCE_SPOT_TOL {
                    return Err(OrbintError::NotInvariant(diff));
                }
            }
        }
    }
    let points = lattice_points_in(system, level, domain, trunc)?;
    if points.is_empty() {
        return Err(OrbintError::EmptyIntersection);
    }
    let mut acc = ZERO;
    for t in &points {
        acc += f.eval(&system.act(t, x)?)?;
    }
    check_finite(acc / points.len() as f64)
}

pub type PairFn = std::sync::Arc<dyn Fn(&GroupElement, &Point) -> Result<Complex64> + Send + Sync>;

/// Integrand on `G × X`.
#[derive(Clone)]
pub enum ProductIntegrand {
    /// `(t, x) ↦ g(t) h(x)`.
    Tensor { group: Integrand, space: Integrand },
    Pair(PairFn),
}

impl std::fmt::Debug for ProductIntegrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProductIntegrand::Tensor { group, space } => write!(f, "Tensor({group:?}, {space:?})"),
            ProductIntegrand::Pair(_) => f.write_str("Pair(<closure>)"),
        }
    }
}

impl ProductIntegrand {
    pub fn eval(&self, t: &GroupElement, x: &Point) -> Result<Complex64> {
        match self {
            ProductIntegrand::Tensor { group, space } => {
                let a = group.eval_element(t)?;
                if a == ZERO {
                    return Ok(ZERO);
                }
                Ok(a * space.eval(x)?)
            }
            ProductIntegrand::Pair(f) => f(t, x),
        }
    }
}

/// `∫_{Gₙ} f(ts, tx) dρₙ(t)`.
pub fn product_average(
    system: &ActionSystem,
    level: usize,
    f: &ProductIntegrand,
    s: &GroupElement,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<Complex64> {
    // ts ∈ supp g ⟺ t ∈ (supp g)s⁻¹
    let hint = match (f, system.chain.ambient) {
        (ProductIntegrand::Tensor { group, .. }, GroupId::RealLine(_)) => match group.support_box() {
            Some(b) => {
                let sc = s.chart();
                SupportHint::Box(b.iter().zip(&sc).map(|(&(lo, hi), &si)| (lo - si, hi - si)).collect())
            }
            None => SupportHint::Unbounded,
        },
        _ => SupportHint::Unbounded,
    };
    let mut acc = ZERO;
    measures::visit_haar(&system.chain, LevelRef::Index(level), trunc, &hint, &mut |t, w| {
        let ts = compose(t, s)?;
        acc += f.eval(&ts, &system.act(t, x)?)? * w;
        Ok(())
    })?;
    check_finite(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    /// `∫_G f(tx) dρ(t)`.
    Ambient,
    Explicit(Complex64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub point: Point,
    pub levels: Vec<usize>,
    pub values: Vec<Complex64>,
    pub reference: Complex64,
    pub reference_source: Reference,
    /// `sup_{m ≥ i} |a_m - ref|` for each position `i`.
    pub tail_deviation: Vec<f64>,
    pub divergent: bool,
}

/// Suffix maxima of `|values - reference|`.
pub fn tail_deviations(values: &[Complex64], reference: Complex64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut run: f64 = 0.0;
    for i in (0..values.len()).rev() {
        run = run.max((values[i] - reference).norm());
        out[i] = run;
    }
    out
}

pub fn trajectory(
    system: &ActionSystem,
    f: &Integrand,
    x: &Point,
    levels: &[usize],
    reference: Reference,
    trunc: &TruncationPolicy,
) -> Result<Trajectory> {
    if levels.is_empty() {
        return Err(OrbintError::DomainError("empty level schedule".into()));
    }
    let reference_value = match &reference {
        Reference::Explicit(v) => *v,
        Reference::Ambient => ambient_orbital_integral(system, f, x, trunc)?,
    };
    let mut values = Vec::with_capacity(levels.len());
    for &n in levels {
        values.push(orbital_integral(system, n, f, x, trunc)?);
    }
    let divergent = values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite()));
    Ok(Trajectory {
        point: x.clone(),
        levels: levels.to_vec(),
        tail_deviation: tail_deviations(&values, reference_value),
        values,
        reference: reference_value,
        reference_source: reference,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ExactReal;
    use crate::measures::{Profile, TestFunction};
    use num_rational::Ratio;

    fn torus(ns: &[u64]) -> ActionSystem {
        ActionSystem::torus(GroupChain::torus_cyclic(ns.iter().copied()).unwrap()).unwrap()
    }

    fn line() -> ActionSystem {
        ActionSystem::line(GroupChain::line_dyadic(1, 0..=12).unwrap(), 4).unwrap()
    }

    fn win() -> TruncationPolicy {
        TruncationPolicy::windows(vec![(-8.0, 8.0)]).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn character_orbital_integrals() {
        let s = torus(&[1, 2, 4]);
        let x = Point::real1(0.3);
        let v = orbital_integral(&s, 2, &Integrand::character1(3), &x, &TruncationPolicy::compact()).unwrap();
        assert!(v.norm() < 1e-15);
        let v = orbital_integral(&s, 2, &Integrand::character1(4), &x, &TruncationPolicy::compact()).unwrap();
        assert!((v - unit_phase(1.2)).norm() < 1e-14);
    }

    #[test]
    fn line_lattice_count() {
        let s = line();
        let f = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
        for n in 0..=12 {
            let v = orbital_integral(&s, n, &f, &Point::real1(0.0), &win()).unwrap();
            assert_eq!(v, c(1.0 + (-(n as f64)).exp2()));
        }
        assert_eq!(ambient_orbital_integral(&s, &f, &Point::real1(0.37), &win()).unwrap(), c(1.0));
    }

    #[test]
    fn ambient_power_integral() {
        let s = torus(&[1]);
        let v = ambient_orbital_integral(&s, &Integrand::Power { delta: 0.75 }, &Point::real1(0.2), &TruncationPolicy::compact())
            .unwrap();
        assert_eq!(v, c(4.0));
    }

    #[test]
    fn affine_ambient_is_independent_of_x() {
        let s = ActionSystem::affine_on_itself(GroupChain::affine_levels([0]).unwrap(), vec![(-3.0, 3.0), (-6.0, 6.0)])
            .unwrap();
        let f = Integrand::Bump(TestFunction::new(vec![0.2, 0.1], vec![0.7, 0.9], Profile::Poly(2)));
        let trunc = TruncationPolicy::new(vec![(-4.0, 4.0), (-16.0, 16.0)], 256, 0.05).unwrap();
        let x1 = Point::Element(GroupElement::affine(1.5, 0.5).unwrap());
        let x2 = Point::Element(GroupElement::affine(0.5, -1.0).unwrap());
        let a = ambient_orbital_integral(&s, &f, &x1, &trunc).unwrap();
        let b = ambient_orbital_integral(&s, &f, &x2, &trunc).unwrap();
        let rho = TestFunction::new(vec![0.2, 0.1], vec![0.7, 0.9], Profile::Poly(2)).integral();
        assert!((a.re - rho).abs() < 1e-4, "{a} vs {rho}");
        assert!((a - b).norm() < 1e-4);
    }

    #[test]
    fn ratio_average_examples() {
        let s = line();
        let b = BorelRegion::interval(0.0, 1.0);
        let f = Integrand::Product(vec![Integrand::Coordinate(0), Integrand::Indicator(b.clone())]);
        assert_eq!(ratio_average(&s, 2, &f, &b, &Point::real1(0.0), &win()).unwrap(), c(0.5));
        let ind = Integrand::Indicator(b.clone());
        assert_eq!(ratio_average(&s, 7, &ind, &b, &Point::real1(0.3), &win()).unwrap(), c(1.0));

        let t = torus(&[1, 2, 4, 8]);
        let b = BorelRegion::half_open(vec![(0.0, 0.5)]);
        let f = Integrand::Indicator(BorelRegion::half_open(vec![(0.0, 0.25)]));
        assert_eq!(ratio_average(&t, 3, &f, &b, &Point::real1(0.0), &win()).unwrap(), c(0.5));
    }

    #[test]
    fn zero_hitting_is_an_error() {
        let t = torus(&[1]);
        let b = BorelRegion::half_open(vec![(0.5, 0.6)]);
        let f = Integrand::Indicator(b.clone());
        assert_eq!(
            ratio_average(&t, 0, &f, &b, &Point::real1(0.0), &win()),
            Err(OrbintError::ZeroHitting)
        );
    }

    #[test]
    fn restricted_examples() {
        let s = line();
        let e = BorelRegion::interval(0.0, 1.0);
        let zero = GroupElement::real(&[0.0]).unwrap();
        let v = restricted_average(&s, 2, &Integrand::Coordinate(0), &e, &zero, &Point::real1(0.0), &win()).unwrap();
        assert_eq!(v, c(0.625));

        let q = BorelRegion::RationalSet { window: (0.0, 1.0) };
        let ind = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
        for n in [1usize, 5, 9] {
            let v = restricted_average(&s, n, &ind, &q, &zero, &Point::real1(0.0), &win()).unwrap();
            assert_eq!(v, c(1.0 + (-(n as f64)).exp2()));
        }
        assert_eq!(restricted_ambient(&s, &ind, &q, &zero, &Point::real1(0.0), &win()).unwrap(), ZERO);
        let irr = GroupElement::exact_real(vec![ExactReal::with_sqrt2(Ratio::new(0, 1), Ratio::new(1, 4))]).unwrap();
        let v = restricted_average(&s, 9, &ind, &q, &irr, &Point::real1(0.0), &win()).unwrap();
        assert_eq!(v, ZERO);
    }

    #[test]
    fn maximal_examples() {
        let s = line();
        let f = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
        assert_eq!(maximal_function(&s, &f, &Point::real1(0.0), 12, &win()).unwrap(), 1.5);
        assert_eq!(maximal_function(&s, &Integrand::constant(0.0), &Point::real1(0.0), 5, &win()).unwrap(), 0.0);
        let t = torus(&[1, 2, 4, 8]);
        assert_eq!(
            maximal_function(&t, &Integrand::constant(1.0), &Point::real1(0.1), 3, &win()).unwrap(),
            1.0
        );
    }

    #[test]
    fn fundamental_reduce_examples() {
        let chain = GroupChain::line_dyadic(1, 0..=3).unwrap();
        let d = BorelRegion::half_open(vec![(0.0, 1.0)]);
        let (g, gt) = fundamental_reduce(&chain, &GroupElement::real(&[1.75]).unwrap(), &d).unwrap();
        assert_eq!((g.chart(), gt.chart()), (vec![-1.0], vec![0.75]));
        let (g, _) = fundamental_reduce(&chain, &GroupElement::real(&[0.5]).unwrap(), &d).unwrap();
        assert_eq!(g.chart(), vec![0.0]);

        let chain = GroupChain::line_dyadic(2, 0..=3).unwrap();
        let d = BorelRegion::half_open(vec![(0.0, 1.0); 2]);
        let (g, gt) = fundamental_reduce(&chain, &GroupElement::real(&[2.25, -0.5]).unwrap(), &d).unwrap();
        assert_eq!((g.chart(), gt.chart()), (vec![-2.0, 1.0], vec![0.25, 0.5]));

        let too_wide = BorelRegion::half_open(vec![(0.0, 1.5); 2]);
        assert!(matches!(
            fundamental_reduce(&chain, &GroupElement::real(&[0.25, 0.25]).unwrap(), &too_wide),
            Err(OrbintError::NotAFundamentalDomain(_))
        ));
    }

    #[test]
    fn lattice_average_examples() {
        let chain = GroupChain::line_dyadic(2, 0..=4).unwrap();
        let s = ActionSystem::new(chain, crate::actions::MeasuredSpace::torus(2), ActionKind::Translation).unwrap();
        let d = BorelRegion::half_open(vec![(0.0, 1.0); 2]);
        let trunc = TruncationPolicy::windows(vec![(-2.0, 2.0)]).unwrap();
        for n in 0..=4 {
            assert_eq!(lattice_points_in(&s, n, &d, &trunc).unwrap().len(), 1 << (2 * n));
        }
        let x = Point::Real(vec![0.0, 0.0]);
        assert_eq!(lattice_average(&s, 3, &Integrand::constant(1.0), &d, &x, &trunc).unwrap(), c(1.0));
        let e = Integrand::Character(vec![1, 0]);
        assert!(lattice_average(&s, 2, &e, &d, &x, &trunc).unwrap().norm() < 1e-15);
        assert!(matches!(
            lattice_average(&s, 2, &Integrand::constant(1.0), &BorelRegion::half_open(vec![(0.1, 0.2); 2]), &x, &trunc),
            Err(OrbintError::EmptyIntersection)
        ));
    }

    #[test]
    fn product_average_examples() {
        let s = line();
        let u = Integrand::Indicator(BorelRegion::interval(0.0, 1.0));
        let f = ProductIntegrand::Tensor {
            group: u.clone(),
            space: Integrand::constant(1.0),
        };
        let zero = GroupElement::real(&[0.0]).unwrap();
        for n in 0..=6 {
            let v = product_average(&s, n, &f, &zero, &Point::real1(0.3), &win()).unwrap();
            assert_eq!(v, c(1.0 + (-(n as f64)).exp2()));
        }
        let t = torus(&[1, 2, 4]);
        let f = ProductIntegrand::Tensor {
            group: Integrand::character1(1),
            space: Integrand::character1(1),
        };
        let v = product_average(&t, 2, &f, &GroupElement::torus(&[0.0]).unwrap(), &Point::real1(0.2), &win()).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn trajectory_tail_is_monotone() {
        let t = ActionSystem::torus(GroupChain::torus_dyadic(0..=6).unwrap()).unwrap();
        let tr = trajectory(
            &t,
            &Integrand::character1(2),
            &Point::real1(0.3),
            &(0..=6).collect::<Vec<_>>(),
            Reference::Ambient,
            &TruncationPolicy::compact(),
        )
        .unwrap();
        assert_eq!(tr.reference, ZERO);
        assert!(tr.tail_deviation[2] < 1e-14);
        assert!((tr.tail_deviation[0] - 1.0).abs() < 1e-14);
        assert!(tr.tail_deviation.windows(2).all(|w| w[0] >= w[1]));
    }
}
