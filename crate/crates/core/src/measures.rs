//! Right Haar measures of chain levels, Fell normalization and the modular
//! condition.
//!
//! Ambient reference measures are pinned per instance: probability measure
//! on the torus, Lebesgue measure on `ℝ^d`, `a⁻¹ da db` (that is `du db` in
//! the chart `u = ln a`) on the affine group, counting measure on the
//! finitary symmetric group. Every level weight scales with the ambient one.

use std::f64::consts::{LN_2, PI};
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OrbintError, Result};
use crate::groups::{
    compose, visit_level, GroupChain, GroupElement, GroupId, LevelRef, Permutation, SupportHint,
    TruncationPolicy,
};
use crate::quadrature::{visit_tensor, Grid1};

/// One-dimensional bump profiles on `s ∈ [-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `1 - |s|`.
    Tent,
    /// `(1 - s²)^{p+1}`, of class `C^p`.
    Poly(u32),
    /// `exp(-1/(1 - s²))`.
    Smooth,
    /// `1` on `[-1, 1]`.
    Indicator,
    /// Cardinal B-spline of the given order with knots `-1 + 2j/order`.
    Spline(u32),
    /// `Spline(order)(s) · (1 + amplitude Σ_{k≥1} k^{-exponent} 2^{-k} cos(2π 2^k x))`
    /// with `x` the absolute coordinate. For `exponent > 1` this is `C¹`
    /// and its dyadic lattice sums resonate with every term `k ≥ n`.
    Lacunary {
        order: u32,
        exponent: f64,
        amplitude: f64,
    },
}

const LACUNARY_TERMS: u32 = 60;
/// `∫_{-1}^{1} exp(-1/(1 - s²)) ds`.
const SMOOTH_BUMP_INTEGRAL: f64 = 0.443_993_816_168_079_4;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Cardinal B-spline `M_p` supported on `[0, p]` with unit integral.
fn cardinal_bspline(order: u32, y: f64) -> f64 {
    let p = f64::from(order);
    if !(y > 0.0 && y < p) {
        return 0.0;
    }
    let y = y.min(p - y);
    let mut acc = 0.0;
    for i in 0..=order {
        let t = y - f64::from(i);
        if t <= 0.0 {
            break;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(order, i) * t.powi(order as i32 - 1);
    }
    acc / factorial(order - 1)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `cos(2π 2^k x)` with the phase `2^k x mod 1` formed exactly.
fn dyadic_cos(k: u32, x: f64) -> f64 {
    let phase = (x * f64::from(k).exp2()).rem_euclid(1.0);
    (2.0 * PI * phase).cos()
}

impl Profile {
    /// Value at normalized coordinate `s`; `x` is the absolute coordinate.
    pub fn eval(&self, s: f64, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&s) {
            return 0.0;
        }
        match *self {
            Profile::Tent => 1.0 - s.abs(),
            Profile::Poly(p) => (1.0 - s * s).powi(p as i32 + 1),
            Profile::Smooth => {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - s * s)).exp()
                }
            }
            Profile::Indicator => 1.0,
            Profile::Spline(order) => cardinal_bspline(order, (s + 1.0) * f64::from(order) / 2.0),
            Profile::Lacunary {
                order,
                exponent,
                amplitude,
            } => {
                let base = cardinal_bspline(order, (s + 1.0) * f64::from(order) / 2.0);
                if base == 0.0 {
                    return 0.0;
                }
                let series: f64 = (1..=LACUNARY_TERMS)
                    .map(|k| f64::from(k).powf(-exponent) * (-f64::from(k)).exp2() * dyadic_cos(k, x))
                    .sum();
                base * (1.0 + amplitude * series)
            }
        }
    }

    /// `∫ profile((x - center)/radius) dx`.
    pub fn integral(&self, center: f64, radius: f64) -> f64 {
        let unit = match *self {
            Profile::Tent => 1.0,
            Profile::Poly(p) => {
                // ∫_{-1}^{1} (1 - s²)^q ds = 2 Π_{i=1}^{q} 2i/(2i+1)
                2.0 * (1..=p + 1).map(|i| 2.0 * f64::from(i) / (2.0 * f64::from(i) + 1.0)).product::<f64>()
            }
            Profile::Smooth => SMOOTH_BUMP_INTEGRAL,
            Profile::Indicator => 2.0,
            Profile::Spline(order) => 2.0 / f64::from(order),
            Profile::Lacunary {
                order,
                exponent,
                amplitude,
            } => {
                let p = f64::from(order);
                let spline_ft = |xi: f64| (2.0 / p) * sinc(2.0 * radius * xi / p).powi(order as i32);
                let series: f64 = (1..=LACUNARY_TERMS)
                    .map(|k| {
                        let xi = f64::from(k).exp2();
                        f64::from(k).powf(-exponent)
                            * (-f64::from(k)).exp2()
                            * dyadic_cos(k, center)
                            * spline_ft(xi)
                    })
                    .sum();
                spline_ft(0.0) + amplitude * series
            }
        };
        unit * radius
    }
}

/// Compactly supported tensor bump in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
    pub profile: Profile,
    /// Torus chart: coordinates are compared modulo 1.
    pub periodic: bool,
}

impl TestFunction {
    pub fn new(center: Vec<f64>, radius: Vec<f64>, profile: Profile) -> Self {
        assert_eq!(center.len(), radius.len());
        assert!(radius.iter().all(|&r| r > 0.0));
        Self {
            center,
            radius,
            profile,
            periodic: false,
        }
    }

    pub fn bump1(center: f64, radius: f64, profile: Profile) -> Self {
        Self::new(vec![center], vec![radius], profile)
    }

    /// Bump on the torus; the radius must not exceed `1/2`.
    pub fn on_torus(center: Vec<f64>, radius: Vec<f64>, profile: Profile) -> Self {
        assert!(radius.iter().all(|&r| r <= 0.5));
        Self {
            periodic: true,
            ..Self::new(center, radius, profile)
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn support_box(&self) -> Vec<(f64, f64)> {
        self.center
            .iter()
            .zip(&self.radius)
            .map(|(c, r)| (c - r, c + r))
            .collect()
    }

    pub fn eval(&self, chart: &[f64]) -> f64 {
        let mut acc = 1.0;
        for i in 0..self.center.len() {
            let mut d = chart[i] - self.center[i];
            if self.periodic {
                d -= d.round();
            }
            let v = self.profile.eval(d / self.radius[i], chart[i]);
            if v == 0.0 {
                return 0.0;
            }
            acc *= v;
        }
        acc
    }

    /// Factor of the tensor product along axis `i`.
    pub fn eval_axis(&self, i: usize, x: f64) -> f64 {
        let mut d = x - self.center[i];
        if self.periodic {
            d -= d.round();
        }
        self.profile.eval(d / self.radius[i], x)
    }

    pub fn eval_element(&self, g: &GroupElement) -> f64 {
        match g.real_coords() {
            Some(c) => self.eval(c),
            None => self.eval(&g.chart()),
        }
    }

    /// Exact integral against the chart Lebesgue measure.
    pub fn integral(&self) -> f64 {
        self.center
            .iter()
            .zip(&self.radius)
            .map(|(&c, &r)| self.profile.integral(c, r))
            .product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HaarRepresentation {
    /// Discrete level with equal atom weights.
    Atoms { weight: f64 },
    /// Scale atoms `u = k·step` crossed with Lebesgue measure in `b`.
    ScaleAtomsTimesLebesgue { step: f64, weight: f64 },
    /// Density `norm_constant` against chart Lebesgue measure.
    Density,
    /// Counting measure on finitary permutations.
    Counting,
}

/// Right Haar measure of one level, or of the ambient group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarSpec {
    pub level: LevelRef,
    pub group: GroupId,
    pub representation: HaarRepresentation,
    pub norm_constant: f64,
}

/// Fell-normalized weight of one atom of level `level`.
pub fn level_atom_weight(chain: &GroupChain, level: usize) -> Result<f64> {
    let c = chain.ambient_scale;
    match chain.level(level)? {
        GroupId::FiniteCyclic(n) => Ok(c / n as f64),
        GroupId::ScaledLattice { log2_inv_step, .. } => Ok(c * (-f64::from(log2_inv_step)).exp2()),
        GroupId::SymFinite(_) => Ok(c),
        GroupId::AffineScaleLevel(m) => Ok(c * LN_2 / (1u64 << m) as f64),
        other => Err(OrbintError::UnsupportedLevel(format!(
            "{other} is not a discretely enumerable level"
        ))),
    }
}

pub fn fell_haar(chain: &GroupChain, level: LevelRef) -> Result<HaarSpec> {
    let group = chain.group_at(level)?;
    let representation = match level {
        LevelRef::Ambient => match group {
            GroupId::SymInfinite => HaarRepresentation::Counting,
            _ => HaarRepresentation::Density,
        },
        LevelRef::Index(i) => {
            let weight = level_atom_weight(chain, i)?;
            match group {
                GroupId::AffineScaleLevel(m) => HaarRepresentation::ScaleAtomsTimesLebesgue {
                    step: LN_2 / (1u64 << m) as f64,
                    weight,
                },
                _ => HaarRepresentation::Atoms { weight },
            }
        }
    };
    Ok(HaarSpec {
        level,
        group,
        representation,
        norm_constant: chain.ambient_scale,
    })
}

const MAX_AMBIENT_SYM: usize = 9;

/// Midpoint quadrature of the ambient right Haar measure in chart
/// coordinates.
pub fn visit_ambient(
    chain: &GroupChain,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
    visit: &mut dyn FnMut(&GroupElement, f64) -> Result<()>,
) -> Result<()> {
    let c = chain.ambient_scale;
    match chain.ambient {
        GroupId::Torus(d) | GroupId::RealLine(d) => {
            let torus = matches!(chain.ambient, GroupId::Torus(_));
            let (hint, strict) = hint.parts();
            let mut grids = Vec::with_capacity(d);
            let mut ranges = Vec::with_capacity(d);
            for i in 0..d {
                let window = if torus { (0.0, 1.0) } else { trunc.window(i)? };
                let grid = Grid1::per_unit(window.0, window.1, trunc.cells_per_unit);
                let range = match (hint, torus) {
                    (SupportHint::Box(b), false) => {
                        let need = b[i.min(b.len() - 1)];
                        if strict {
                            cover(window, need)?;
                        }
                        grid.touching(need.0, need.1)
                    }
                    _ => 0..grid.cells,
                };
                grids.push(grid);
                ranges.push(range);
            }
            let mut element = if torus {
                GroupElement::torus(&vec![0.5; d])?
            } else {
                GroupElement::real(&vec![0.0; d])?
            };
            visit_tensor(&grids, &ranges, &mut |p, w| {
                element.set_real_coords(p.iter().copied());
                visit(&element, c * w)
            })
        }
        GroupId::Affine => {
            let uw = trunc.window(0)?;
            let bw = trunc.window(1)?;
            let ug = Grid1::per_unit(uw.0, uw.1, trunc.cells_per_unit);
            let bg = Grid1::per_unit(bw.0, bw.1, trunc.cells_per_unit);
            let (hint, strict) = hint.parts();
            let (u_need, b_need, shear) = match hint {
                SupportHint::Unbounded => (
                    (f64::NEG_INFINITY, f64::INFINITY),
                    (f64::NEG_INFINITY, f64::INFINITY),
                    0.0,
                ),
                SupportHint::Box(b) => (b[0], b[1], 0.0),
                SupportHint::AffineSheared { u, b, shear } => (*u, *b, *shear),
                SupportHint::Clipped(_) => unreachable!("parts() unwraps clipping"),
            };
            if strict {
                cover(uw, u_need)?;
            }
            let weight = c * ug.h * bg.h;
            for iu in ug.touching(u_need.0, u_need.1) {
                let u = ug.midpoint(iu);
                let a = u.exp();
                let cells = if b_need.0.is_finite() || b_need.1.is_finite() {
                    let lo = b_need.0 - a * shear;
                    let hi = b_need.1 - a * shear;
                    if strict {
                        cover(bw, (lo, hi))?;
                    }
                    bg.touching(lo, hi)
                } else {
                    0..bg.cells
                };
                for ib in cells {
                    let g = GroupElement::affine(a, bg.midpoint(ib))?;
                    visit(&g, weight)?;
                }
            }
            Ok(())
        }
        GroupId::SymInfinite => {
            let n = trunc.window(0)?.1 as usize;
            if n > MAX_AMBIENT_SYM {
                return Err(OrbintError::UnsupportedLevel(format!(
                    "counting over permutations of {n} points is too large"
                )));
            }
            for p in Permutation::all(n) {
                let g = GroupElement::perm(p).in_group(GroupId::SymInfinite)?;
                visit(&g, c)?;
            }
            Ok(())
        }
        other => Err(OrbintError::UnsupportedLevel(format!("{other} is not ambient"))),
    }
}

fn cover(window: (f64, f64), need: (f64, f64)) -> Result<()> {
    let slack = 1e-12;
    if (need.0.is_finite() && need.0 < window.0 - slack) || (need.1.is_finite() && need.1 > window.1 + slack) {
        return Err(OrbintError::TruncationTooSmall(format!(
            "window [{}, {}] does not cover support [{}, {}]",
            window.0, window.1, need.0, need.1
        )));
    }
    Ok(())
}

/// Visits the atoms (or quadrature nodes) of `ρₙ` or `ρ`.
pub fn visit_haar(
    chain: &GroupChain,
    level: LevelRef,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
    visit: &mut dyn FnMut(&GroupElement, f64) -> Result<()>,
) -> Result<()> {
    match level {
        LevelRef::Index(i) => visit_level(chain, i, trunc, hint, visit),
        LevelRef::Ambient => visit_ambient(chain, trunc, hint, visit),
    }
}

/// `∫ f dρₙ` (or `dρ`) by the level enumeration or ambient quadrature.
pub fn haar_integral(
    chain: &GroupChain,
    level: LevelRef,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
    f: &mut dyn FnMut(&GroupElement) -> Result<Complex64>,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    visit_haar(chain, level, trunc, hint, &mut |g, w| {
        acc += f(g)? * w;
        Ok(())
    })?;
    if !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(OrbintError::QuadratureFailure(format!("non-finite integral {acc}")));
    }
    Ok(acc)
}

fn support_hint(phi: &TestFunction) -> SupportHint {
    if phi.periodic {
        SupportHint::Unbounded
    } else {
        SupportHint::Box(phi.support_box())
    }
}

/// `ρₙ(φ)` for a chart test function.
pub fn level_integral(chain: &GroupChain, level: LevelRef, phi: &TestFunction, trunc: &TruncationPolicy) -> Result<f64> {
    let v = haar_integral(chain, level, trunc, &support_hint(phi), &mut |g| {
        Ok(Complex64::new(phi.eval_element(g), 0.0))
    })?;
    Ok(v.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FellReport {
    pub levels: Vec<usize>,
    /// `deviations[i][j]`: test function `i`, level `levels[j]`.
    pub deviations: Vec<Vec<f64>>,
    pub max_per_level: Vec<f64>,
    pub max_deviation: f64,
    /// Tail of `max_per_level` non-increasing up to a factor of 2.
    pub tail_non_increasing: bool,
    pub pass: bool,
}

pub const FELL_TAIL_SLACK: f64 = 2.0;

/// Deviations `|ρₙ(φ) - ρ(φ)|` with `ρ(φ)` taken from the exact integral
/// of the bump. The tail is the second half of the level range.
pub fn fell_convergence_report(
    chain: &GroupChain,
    levels: Range<usize>,
    panel: &[TestFunction],
    trunc: &TruncationPolicy,
    tol: f64,
) -> Result<FellReport> {
    if panel.is_empty() {
        return Err(OrbintError::QuadratureFailure("empty test-function panel".into()));
    }
    if levels.is_empty() {
        return Err(OrbintError::NoSuchLevel(levels.start));
    }
    let levels: Vec<usize> = levels.collect();
    let mut deviations = Vec::with_capacity(panel.len());
    for phi in panel {
        let exact = phi.integral() * chain.ambient_scale;
        let mut row = Vec::with_capacity(levels.len());
        for &n in &levels {
            let v = level_integral(chain, LevelRef::Index(n), phi, trunc)?;
            let d = (v - exact).abs();
            if !d.is_finite() {
                return Err(OrbintError::QuadratureFailure(format!("deviation at level {n} is {d}")));
            }
            row.push(d);
        }
        deviations.push(row);
    }
    let max_per_level: Vec<f64> = (0..levels.len())
        .map(|j| deviations.iter().map(|r| r[j]).fold(0.0, f64::max))
        .collect();
    let tail = &max_per_level[max_per_level.len() / 2..];
    let tail_non_increasing = tail.windows(2).all(|w| w[1] <= FELL_TAIL_SLACK * w[0]);
    let max_deviation = *max_per_level.last().expect("nonempty");
    Ok(FellReport {
        levels,
        pass: tail_non_increasing && max_deviation <= tol,
        deviations,
        max_per_level,
        max_deviation,
        tail_non_increasing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Support of `t ↦ φ(ht)` in chart coordinates, when `φ` is a chart bump.
fn left_pullback_hint(phi: &TestFunction, h: &GroupElement) -> SupportHint {
    if phi.periodic {
        return SupportHint::Unbounded;
    }
    let sb = phi.support_box();
    match h.affine_pair() {
        Some((a, b)) => {
            let u = a.ln();
            SupportHint::Box(vec![
                (sb[0].0 - u, sb[0].1 - u),
                ((sb[1].0 - b) / a, (sb[1].1 - b) / a),
            ])
        }
        None => match h.real_coords() {
            Some(c) => SupportHint::Box(sb.iter().zip(c).map(|(r, x)| (r.0 - x, r.1 - x)).collect()),
            None => SupportHint::Unbounded,
        },
    }
}

/// Left invariance of `λₙ = Δ·ρₙ` on level `level`, tested with the given
/// translators from that level.
pub fn modular_condition_report(
    chain: &GroupChain,
    level: usize,
    panel: &[TestFunction],
    translators: &[GroupElement],
    trunc: &TruncationPolicy,
    tol: f64,
) -> Result<ModularReport> {
    let group = chain.level(level)?;
    let lref = LevelRef::Index(level);
    let mut residuals = Vec::new();
    for phi in panel {
        let base = haar_integral(chain, lref, trunc, &support_hint(phi), &mut |t| {
            Ok(Complex64::new(phi.eval_element(t) * chain.modular.value(t), 0.0))
        })?;
        for h in translators {
            if !group.contains_element(h) {
                return Err(OrbintError::InvalidElement(format!("translator is not in {group}")));
            }
            let moved = haar_integral(chain, lref, trunc, &left_pullback_hint(phi, h), &mut |t| {
                let ht = compose(h, t)?;
                Ok(Complex64::new(phi.eval_element(&ht) * chain.modular.value(t), 0.0))
            })?;
            residuals.push((moved - base).norm());
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ModularReport {
        pass: max_residual <= tol,
        residuals,
        max_residual,
    })
}

/// `|∫φ(th) dρₙ(t) - ∫φ(t) dρₙ(t)|`.
pub fn right_invariance_residual(
    chain: &GroupChain,
    level: LevelRef,
    phi: &TestFunction,
    h: &GroupElement,
    trunc: &TruncationPolicy,
) -> Result<f64> {
    let base = level_integral(chain, level, phi, trunc)?;
    let hinv = crate::groups::inverse(h);
    // t ↦ th moves the support box by h⁻¹ on the right
    let hint = match (phi.periodic, h.affine_pair(), h.real_coords()) {
        (true, _, _) => SupportHint::Unbounded,
        (false, Some(_), _) => SupportHint::Unbounded,
        (false, None, Some(_)) => left_pullback_hint(phi, &hinv),
        _ => SupportHint::Unbounded,
    };
    let moved = haar_integral(chain, level, trunc, &hint, &mut |t| {
        Ok(Complex64::new(phi.eval_element(&compose(t, h)?), 0.0))
    })?;
    Ok((moved.re - base).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_integrals_match_fine_quadrature() {
        let profiles = [
            Profile::Tent,
            Profile::Poly(0),
            Profile::Poly(1),
            Profile::Poly(3),
            Profile::Smooth,
            Profile::Spline(3),
            Profile::Spline(6),
        ];
        for p in profiles {
            let grid = Grid1::with_cells(-1.0, 1.0, 200_000);
            let q = grid.integrate(|s| p.eval(s, s));
            assert!((q - p.integral(0.0, 1.0)).abs() < 1e-9, "{p:?}: {q}");
        }
    }

    #[test]
    fn lacunary_integral_matches_fine_quadrature() {
        let p = Profile::Lacunary {
            order: 6,
            exponent: 1.1,
            amplitude: 0.25,
        };
        let (c, r) = (1.0 / 3.0, 0.9);
        // the integrand oscillates at every dyadic frequency; a fine non-dyadic grid resolves
        // the terms up to about 2^14, and the remaining ones contribute below 1e-9
        let grid = Grid1::with_cells(c - r, c + r, 3_000_000);
        let q = grid.integrate(|x| p.eval((x - c) / r, x));
        assert!((q - p.integral(c, r)).abs() < 1e-8, "{q} vs {}", p.integral(c, r));
    }

    #[test]
    fn fell_weights() {
        let torus = GroupChain::torus_cyclic([5]).unwrap();
        assert_eq!(
            fell_haar(&torus, LevelRef::Index(0)).unwrap().representation,
            HaarRepresentation::Atoms { weight: 0.2 }
        );
        let sym = GroupChain::symmetric([4]).unwrap();
        assert_eq!(
            fell_haar(&sym, LevelRef::Index(0)).unwrap().representation,
            HaarRepresentation::Atoms { weight: 1.0 }
        );
        let aff = GroupChain::affine_levels([3]).unwrap();
        match fell_haar(&aff, LevelRef::Index(0)).unwrap().representation {
            HaarRepresentation::ScaleAtomsTimesLebesgue { step, weight } => {
                assert_eq!(step, LN_2 / 8.0);
                assert_eq!(weight, LN_2 / 8.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rescaling_ambient_rescales_level_weights() {
        for c in [0.5, 3.0] {
            let base = GroupChain::line_dyadic(1, 0..5).unwrap();
            let scaled = base.clone().with_ambient_scale(c);
            for n in 0..5 {
                assert_eq!(
                    level_atom_weight(&scaled, n).unwrap(),
                    c * level_atom_weight(&base, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn constant_on_compact_torus_is_exact() {
        let chain = GroupChain::torus_dyadic(0..10).unwrap();
        let one = TestFunction::on_torus(vec![0.5], vec![0.5], Profile::Indicator);
        for n in 0..10 {
            let v = level_integral(&chain, LevelRef::Index(n), &one, &TruncationPolicy::compact()).unwrap();
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn symmetric_group_mass_is_factorial() {
        let chain = GroupChain::symmetric([1, 2, 3, 4, 5]).unwrap();
        for (i, n) in [1usize, 2, 3, 4, 5].into_iter().enumerate() {
            let mut mass = 0.0;
            visit_level(&chain, i, &TruncationPolicy::compact(), &SupportHint::Unbounded, &mut |_, w| {
                mass += w;
                Ok(())
            })
            .unwrap();
            assert_eq!(mass, factorial(n as u32));
        }
    }

    #[test]
    fn modular_condition_on_cyclic_and_symmetric_levels() {
        let chain = GroupChain::torus_dyadic([3]).unwrap();
        let panel = [TestFunction::on_torus(vec![0.2], vec![0.3], Profile::Poly(1))];
        let hs: Vec<_> = (0..8).map(|j| GroupElement::cyclic(8, j)).collect();
        let r = modular_condition_report(&chain, 0, &panel, &hs, &TruncationPolicy::compact(), 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_residual < 1e-15);
    }

    #[test]
    fn affine_modulus_from_pushforward_of_lebesgue() {
        // push Lebesgue measure through x ↦ 2x + 1 and fit c with sμ = cμ
        let (a, b) = (2.0, 1.0);
        let mut ratios = Vec::new();
        for k in 0..10 {
            let (lo, hi) = (k as f64 * 0.7 - 3.0, k as f64 * 0.7 - 2.2);
            // (sμ)(E) = μ(s⁻¹E) = |E|/a
            let pre = ((hi - b) / a) - ((lo - b) / a);
            ratios.push(pre / (hi - lo));
        }
        let g = GroupElement::affine(a, b).unwrap();
        let delta = crate::groups::modular_value(&GroupChain::affine_levels([0]).unwrap(), &g);
        assert!(ratios.iter().all(|c| (c - delta).abs() < 1e-12));
        assert_eq!(delta, 0.5);
    }
}
