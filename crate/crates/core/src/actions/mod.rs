//! Group actions on measured spaces, relative invariance, the crucial
//! identity and hitting measures.

mod space;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use space::{BorelRegion, MeasuredSpace, Point, SpaceDomain};

use crate::averaging::Integrand;
use crate::error::{OrbintError, Result};
use crate::groups::{compose, inverse, GroupChain, GroupElement, GroupId, LevelRef, SupportHint, TruncationPolicy};
use crate::measures::{self, TestFunction};
use crate::quadrature::{visit_tensor, Grid1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    /// `x ↦ x + t` on a torus or line.
    Translation,
    /// A group acting on itself by `x ↦ tx`.
    LeftMultiplication,
    /// The affine group acting on `ℝ` by `x ↦ ax + b`. Lebesgue measure is
    /// relatively invariant with the wrong modulus for this action and hitting
    /// measures diverge; kept as a negative control.
    AffineOnLine,
    /// `(σx)_i = x_{σ⁻¹(i)}` on the Bernoulli cylinder.
    CoordinatePermutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSystem {
    pub chain: GroupChain,
    pub space: MeasuredSpace,
    pub kind: ActionKind,
    pub invariance_checked: bool,
    /// Excluded from convergence scenarios.
    pub negative_control: bool,
}

impl ActionSystem {
    pub fn new(chain: GroupChain, space: MeasuredSpace, kind: ActionKind) -> Result<Self> {
        let ok = match (kind, chain.ambient, space.domain) {
            (ActionKind::Translation, GroupId::Torus(d), SpaceDomain::Torus(e)) => d == e,
            (ActionKind::Translation, GroupId::RealLine(d), SpaceDomain::Torus(e)) => d == e,
            (ActionKind::Translation, GroupId::RealLine(d), SpaceDomain::RealLine(e)) => d == e,
            (ActionKind::LeftMultiplication, g, SpaceDomain::Group(h)) => g == h && g == GroupId::Affine,
            (ActionKind::AffineOnLine, GroupId::Affine, SpaceDomain::RealLine(1)) => true,
            (ActionKind::CoordinatePermutation, GroupId::SymInfinite, SpaceDomain::Cylinder { .. }) => true,
            _ => false,
        };
        if !ok {
            return Err(OrbintError::MismatchedGroups(format!(
                "{kind:?} of {} on {:?} is not a supported action",
                chain.ambient, space.domain
            )));
        }
        Ok(Self {
            negative_control: kind == ActionKind::AffineOnLine,
            chain,
            space,
            kind,
            invariance_checked: false,
        })
    }

    /// Torus translations by a chain of finite cyclic subgroups.
    pub fn torus(chain: GroupChain) -> Result<Self> {
        let d = chain.ambient.chart_dim().unwrap_or(1);
        Self::new(chain, MeasuredSpace::torus(d), ActionKind::Translation)
    }

    pub fn line(chain: GroupChain, radius: usize) -> Result<Self> {
        let d = chain.ambient.chart_dim().unwrap_or(1);
        Self::new(chain, MeasuredSpace::real_line(d, radius), ActionKind::Translation)
    }

    pub fn affine_on_itself(chain: GroupChain, window: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(chain, MeasuredSpace::affine_group(window), ActionKind::LeftMultiplication)
    }

    pub fn affine_on_line(chain: GroupChain) -> Result<Self> {
        Self::new(chain, MeasuredSpace::real_line(1, 4), ActionKind::AffineOnLine)
    }

    pub fn cylinder(chain: GroupChain, p: f64, len: usize) -> Result<Self> {
        Self::new(chain, MeasuredSpace::cylinder(p, len), ActionKind::CoordinatePermutation)
    }

    pub fn modular(&self, g: &GroupElement) -> f64 {
        self.chain.modular.value(g)
    }

    /// `tx`.
    pub fn act(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        if g.group().ambient() != self.chain.ambient {
            return Err(OrbintError::MismatchedGroups(format!(
                "{} does not act on this space",
                g.group()
            )));
        }
        match (self.kind, x) {
            (ActionKind::Translation, Point::Real(v)) => {
                let mut out = v.clone();
                self.translate_into(g, v, &mut out)?;
                Ok(Point::Real(out))
            }
            (ActionKind::LeftMultiplication, Point::Element(h)) => Ok(Point::Element(compose(g, h)?)),
            (ActionKind::AffineOnLine, Point::Real(v)) if v.len() == 1 => {
                let (a, b) = g.affine_pair().expect("affine element");
                Ok(Point::Real(vec![a * v[0] + b]))
            }
            (ActionKind::CoordinatePermutation, Point::Bits(bits)) => {
                let p = g.permutation().expect("permutation element");
                if p.support_len() > bits.len() {
                    return Err(OrbintError::DomainError(format!(
                        "permutation moves coordinates beyond the {} stored",
                        bits.len()
                    )));
                }
                let mut out = bits.clone();
                for (i, &b) in bits.iter().enumerate().take(p.support_len()) {
                    out[p.apply(i)] = b;
                }
                Ok(Point::Bits(out))
            }
            _ => Err(OrbintError::DomainError(format!("point {x:?} is not in the space"))),
        }
    }

    /// Translation written into a caller buffer, for allocation-free loops.
    pub(crate) fn translate_into(&self, g: &GroupElement, x: &[f64], out: &mut [f64]) -> Result<()> {
        let torus = matches!(self.space.domain, SpaceDomain::Torus(_));
        let apply = |t: &[f64], out: &mut [f64]| {
            for i in 0..x.len() {
                let y = x[i] + t[i];
                out[i] = if torus {
                    let r = y - y.floor();
                    if r >= 1.0 {
                        0.0
                    } else {
                        r
                    }
                } else {
                    y
                };
            }
        };
        match g.real_coords() {
            Some(t) if t.len() == x.len() => apply(t, out),
            _ => {
                let t = g.chart();
                if t.len() != x.len() {
                    return Err(OrbintError::DomainError("dimension mismatch".into()));
                }
                apply(&t, out)
            }
        }
        Ok(())
    }

    /// Chart region of `t` for which `tx` can meet `support`.
    pub fn orbit_hint(&self, support: Option<&[(f64, f64)]>, x: &Point) -> SupportHint {
        let Some(s) = support else { return SupportHint::Unbounded };
        match (self.kind, x) {
            (ActionKind::Translation, Point::Real(v)) => match self.space.domain {
                SpaceDomain::RealLine(_) => {
                    SupportHint::Box(s.iter().zip(v).map(|(&(a, b), &xi)| (a - xi, b - xi)).collect())
                }
                _ => SupportHint::Unbounded,
            },
            (ActionKind::LeftMultiplication, Point::Element(g)) => {
                let c = g.chart();
                SupportHint::AffineSheared {
                    u: (s[0].0 - c[0], s[0].1 - c[0]),
                    b: s[1],
                    shear: c[1],
                }
            }
            (ActionKind::AffineOnLine, Point::Real(v)) => SupportHint::AffineSheared {
                u: (f64::NEG_INFINITY, f64::INFINITY),
                b: s[0],
                shear: v[0],
            },
            _ => SupportHint::Unbounded,
        }
    }

    fn chart_dim_of_space(&self) -> Result<usize> {
        match self.space.domain {
            SpaceDomain::Torus(d) | SpaceDomain::RealLine(d) => Ok(d),
            SpaceDomain::Group(_) => Ok(2),
            SpaceDomain::Cylinder { .. } => Err(OrbintError::Unsupported("cylinder has no chart".into())),
        }
    }
}

/// Chart box of `{x : sx ∈ box}`.
fn pullback_box(system: &ActionSystem, s: &GroupElement, b: &[(f64, f64)]) -> Option<Vec<(f64, f64)>> {
    match system.kind {
        ActionKind::Translation if matches!(system.space.domain, SpaceDomain::RealLine(_)) => {
            let t = s.chart();
            Some(b.iter().zip(&t).map(|(&(lo, hi), &ti)| (lo - ti, hi - ti)).collect())
        }
        ActionKind::LeftMultiplication => {
            let (a, bs) = s.affine_pair()?;
            let u = a.ln();
            Some(vec![(b[0].0 - u, b[0].1 - u), ((b[1].0 - bs) / a, (b[1].1 - bs) / a)])
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Checks `∫ f(sx) dμ(x) = Δ(s) ∫ f dμ` for every `s` and `f`.
pub fn relative_invariance_report(
    system: &ActionSystem,
    sample_elems: &[GroupElement],
    panel: &[Integrand],
    cells_per_unit: usize,
    tol: f64,
) -> Result<InvarianceReport> {
    let mut residuals = Vec::new();
    for f in panel {
        let base = match f.closed_form_integral(&system.space.domain) {
            Some(v) => v,
            None => system.space.integrate(cells_per_unit, f.support_box().as_deref(), &mut |x| f.eval(x))?,
        };
        for s in sample_elems {
            let lhs = match (system.kind, f) {
                (ActionKind::Translation, Integrand::Indicator(r @ (BorelRegion::Box { .. } | BorelRegion::Arc { .. }))) => {
                    // {x : x + s ∈ R} = R - s
                    let moved = r.translate(&s.chart().iter().map(|v| -v).collect::<Vec<_>>());
                    Complex64::new(system.space.measure(&moved), 0.0)
                }
                _ => {
                    let restrict = f.support_box().and_then(|b| pullback_box(system, s, &b));
                    system
                        .space
                        .integrate(cells_per_unit, restrict.as_deref(), &mut |x| f.eval(&system.act(s, x)?))?
                }
            };
            residuals.push((lhs - base * system.modular(s)).norm());
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(InvarianceReport {
        pass: max_residual <= tol,
        residuals,
        max_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrucialIdentityReport {
    /// `∫∫ f(tx, t) dμ dρ`, `∫∫ f(x, t) dμ dλ`, `∫∫ f(x, t⁻¹) dμ dρ`.
    pub values: [Complex64; 3],
    pub max_pairwise_gap: f64,
    pub pass: bool,
}

fn axis_cells(resolution: usize, dim: usize) -> usize {
    ((resolution as f64).powf(1.0 / dim as f64).round() as usize).max(1)
}

fn element_from_chart(group: GroupId, c: &[f64]) -> Result<GroupElement> {
    match group {
        GroupId::Torus(_) => GroupElement::torus(c),
        GroupId::RealLine(_) => GroupElement::real(c),
        GroupId::Affine => GroupElement::affine(c[0].exp(), c[1]),
        other => Err(OrbintError::Unsupported(format!("no chart quadrature on {other}"))),
    }
}

fn corner_hull(lo: (f64, f64), hi: (f64, f64), f: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let vals = [f(lo.0, hi.0), f(lo.0, hi.1), f(lo.1, hi.0), f(lo.1, hi.1)];
    (
        vals.iter().copied().fold(f64::INFINITY, f64::min),
        vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// The three integrals of the crucial identity for `f(x, t) = g(x) h(t)`.
/// Chart quadrature uses `resolution` midpoint cells per box (split evenly
/// over the axes) for the ambient measure; level measures use their atoms
/// and the truncation grid.
pub fn crucial_identity_report(
    system: &ActionSystem,
    g: &Integrand,
    h: &TestFunction,
    level: LevelRef,
    trunc: &TruncationPolicy,
    resolution: usize,
    tol: f64,
) -> Result<CrucialIdentityReport> {
    let group = system.chain.ambient;
    let dim_g = group
        .chart_dim()
        .ok_or_else(|| OrbintError::Unsupported("crucial identity needs a chart group".into()))?;
    let dim_x = system.chart_dim_of_space()?;
    let torus_x = matches!(system.space.domain, SpaceDomain::Torus(_));
    let torus_g = matches!(group, GroupId::Torus(_));

    let h_box = if h.periodic || torus_g { vec![(0.0, 1.0); dim_g] } else { h.support_box() };
    // support of t ↦ h(t⁻¹)
    let h_inv_box: Vec<(f64, f64)> = if torus_g || h.periodic {
        vec![(0.0, 1.0); dim_g]
    } else if group == GroupId::Affine {
        let (u, b) = (h_box[0], h_box[1]);
        vec![(-u.1, -u.0), corner_hull(b, u, |bs, us| -bs * (-us).exp())]
    } else {
        h_box.iter().map(|&(a, b)| (-b, -a)).collect()
    };
    // X box containing the support of x ↦ g(tx) for every t in supp h
    let x_box: Vec<(f64, f64)> = if torus_x {
        vec![(0.0, 1.0); dim_x]
    } else {
        let gb = g
            .support_box()
            .ok_or_else(|| OrbintError::TruncationTooSmall("integrand on X needs a bounded support".into()))?;
        match system.kind {
            ActionKind::Translation => gb.iter().zip(&h_box).map(|(&(a, b), &(c, d))| (a - d, b - c)).collect(),
            ActionKind::LeftMultiplication => {
                let (ub, bb) = (h_box[0], h_box[1]);
                let ux = (gb[0].0 - ub.1, gb[0].1 - ub.0);
                let lo = corner_hull(gb[1], bb, |bg, bt| bg - bt);
                let scale = ((-ub.1).exp(), (-ub.0).exp());
                let bx = (
                    [lo.0 * scale.0, lo.0 * scale.1].into_iter().fold(f64::INFINITY, f64::min),
                    [lo.1 * scale.0, lo.1 * scale.1].into_iter().fold(f64::NEG_INFINITY, f64::max),
                );
                vec![ux, bx]
            }
            _ => return Err(OrbintError::Unsupported("crucial identity for this action".into())),
        }
    };
    let nx = axis_cells(resolution, dim_x);
    let x_grids: Vec<Grid1> = x_box.iter().map(|&(a, b)| Grid1::with_cells(a, b, nx)).collect();
    let x_ranges: Vec<_> = x_grids.iter().map(|gr| 0..gr.cells).collect();
    let x_point = |c: &[f64]| -> Result<Point> {
        Ok(match system.space.domain {
            SpaceDomain::Group(gid) => Point::Element(element_from_chart(gid, c)?),
            _ => Point::Real(c.to_vec()),
        })
    };

    let mut mu_g = Complex64::new(0.0, 0.0);
    visit_tensor(&x_grids, &x_ranges, &mut |c, w| {
        mu_g += g.eval(&x_point(c)?)? * w;
        Ok::<(), OrbintError>(())
    })?;

    // ∫ g(tx) dμ(x) on the fixed X grid; tensor bumps factor over the axes
    let separable = match g {
        Integrand::Bump(tf) => Some(tf),
        _ => None,
    };
    let inner = |t: &GroupElement| -> Result<Complex64> {
        if let Some(tf) = separable {
            let tc = t.chart();
            let mut prod = 1.0;
            for (i, gr) in x_grids.iter().enumerate() {
                let s: f64 = (0..gr.cells)
                    .map(|j| {
                        let x = gr.midpoint(j);
                        let y = match system.kind {
                            ActionKind::LeftMultiplication if i == 1 => tc[0].exp() * x + tc[1],
                            _ => x + tc[i],
                        };
                        tf.eval_axis(i, y)
                    })
                    .sum();
                prod *= s * gr.h;
            }
            return Ok(Complex64::new(prod, 0.0));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        visit_tensor(&x_grids, &x_ranges, &mut |c, w| {
            acc += g.eval(&system.act(t, &x_point(c)?)?)? * w;
            Ok::<(), OrbintError>(())
        })?;
        Ok(acc)
    };

    let visit_g = |bx: &[(f64, f64)], visit: &mut dyn FnMut(&GroupElement, f64) -> Result<()>| -> Result<()> {
        match level {
            LevelRef::Ambient => {
                let ng = axis_cells(resolution, dim_g);
                let grids: Vec<Grid1> = bx.iter().map(|&(a, b)| Grid1::with_cells(a, b, ng)).collect();
                let ranges: Vec<_> = grids.iter().map(|gr| 0..gr.cells).collect();
                let scale = system.chain.ambient_scale;
                visit_tensor(&grids, &ranges, &mut |c, w| visit(&element_from_chart(group, c)?, w * scale))
            }
            LevelRef::Index(_) => {
                let hint = if torus_g { SupportHint::Unbounded } else { SupportHint::Box(bx.to_vec()) };
                measures::visit_haar(&system.chain, level, trunc, &hint, visit)
            }
        }
    };

    let (mut i1, mut lam_h, mut rho_hinv) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    visit_g(&h_box, &mut |t, w| {
        let ht = h.eval_element(t);
        if ht != 0.0 {
            i1 += inner(t)? * (ht * w);
            lam_h += ht * system.modular(t) * w;
        }
        Ok(())
    })?;
    visit_g(&h_inv_box, &mut |t, w| {
        rho_hinv += h.eval_element(&inverse(t)) * w;
        Ok(())
    })?;
    let values = [i1, mu_g * lam_h, mu_g * rho_hinv];
    let max_pairwise_gap = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(a, b)| (values[a] - values[b]).norm())
        .fold(0.0, f64::max);
    if !max_pairwise_gap.is_finite() {
        return Err(OrbintError::QuadratureFailure("non-finite crucial identity values".into()));
    }
    Ok(CrucialIdentityReport {
        values,
        max_pairwise_gap,
        pass: max_pairwise_gap <= tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HittingValue {
    Finite(f64),
    /// The truncated value kept growing under window doubling.
    Infinite { last: f64 },
}

impl HittingValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, HittingValue::Finite(_))
    }

    pub fn value(&self) -> f64 {
        match self {
            HittingValue::Finite(v) => *v,
            HittingValue::Infinite { .. } => f64::INFINITY,
        }
    }
}

fn hitting_sum(
    system: &ActionSystem,
    level: LevelRef,
    region: &BorelRegion,
    x: &Point,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
) -> Result<f64> {
    let mut acc = 0.0;
    measures::visit_haar(&system.chain, level, trunc, hint, &mut |t, w| {
        if region.contains(&system.act(t, x)?) {
            acc += w;
        }
        Ok(())
    })?;
    Ok(acc)
}

/// `ρₙ({t ∈ Gₙ : tx ∈ B})`, or the ambient `ρ` version. Ambient values on
/// noncompact groups are taken from quadrature on the truncation window and
/// flagged infinite when they grow by more than the stabilization tolerance
/// across two successive window doublings.
pub fn hitting_measure(
    system: &ActionSystem,
    level: LevelRef,
    region: &BorelRegion,
    x: &Point,
    trunc: &TruncationPolicy,
) -> Result<HittingValue> {
    let bbox = region.bounding_box();
    match level {
        LevelRef::Index(_) => {
            let hint = system.orbit_hint(bbox.as_deref(), x);
            Ok(HittingValue::Finite(hitting_sum(system, level, region, x, trunc, &hint)?))
        }
        LevelRef::Ambient => {
            if system.kind == ActionKind::Translation {
                // {t : x + t ∈ B} = B - x has the Lebesgue measure of B
                let m = system.space.measure(region) * system.chain.ambient_scale;
                return Ok(if m.is_finite() {
                    HittingValue::Finite(m)
                } else {
                    HittingValue::Infinite { last: m }
                });
            }
            if system.chain.ambient.is_compact() {
                let v = hitting_sum(system, level, region, x, trunc, &SupportHint::Unbounded)?;
                return Ok(HittingValue::Finite(v));
            }
            let hint = system.orbit_hint(bbox.as_deref(), x).clipped();
            let t1 = trunc.doubled();
            let t2 = t1.doubled();
            let v0 = hitting_sum(system, level, region, x, trunc, &hint)?;
            let v1 = hitting_sum(system, level, region, x, &t1, &hint)?;
            let v2 = hitting_sum(system, level, region, x, &t2, &hint)?;
            let grows = |a: f64, b: f64| b > a * (1.0 + trunc.stabilization_tol) && b > 0.0;
            Ok(if grows(v0, v1) && grows(v1, v2) {
                HittingValue::Infinite { last: v2 }
            } else {
                HittingValue::Finite(v2)
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// Fraction of sampled points with finite ambient hitting measure, per
    /// cover region.
    pub finite_fractions: Vec<f64>,
    pub sample_size: usize,
    pub pass: bool,
}

/// Sampled certificate that every cover region has finite ambient hitting
/// measure at μ-almost every point.
pub fn integrability_certificate(
    system: &ActionSystem,
    cover: &[BorelRegion],
    sample_size: usize,
    seed: u64,
    trunc: &TruncationPolicy,
) -> Result<IntegrabilityReport> {
    let points = system.space.sample_many(seed, sample_size);
    let mut finite_fractions = Vec::with_capacity(cover.len());
    for region in cover {
        let mut finite = 0usize;
        for x in &points {
            if hitting_measure(system, LevelRef::Ambient, region, x, trunc)?.is_finite() {
                finite += 1;
            }
        }
        finite_fractions.push(finite as f64 / sample_size.max(1) as f64);
    }
    Ok(IntegrabilityReport {
        pass: finite_fractions.iter().all(|&f| f == 1.0),
        finite_fractions,
        sample_size,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HittingScope {
    PerLevel,
    Ambient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingBound {
    pub region_index: usize,
    pub bound: f64,
    pub scope: HittingScope,
}

/// Largest observed level hitting measure of `region` over the given levels
/// and points.
pub fn hitting_bound(
    system: &ActionSystem,
    region_index: usize,
    region: &BorelRegion,
    levels: &[usize],
    points: &[Point],
    trunc: &TruncationPolicy,
) -> Result<HittingBound> {
    let mut bound: f64 = 0.0;
    for &n in levels {
        for x in points {
            bound = bound.max(hitting_measure(system, LevelRef::Index(n), region, x, trunc)?.value());
        }
    }
    Ok(HittingBound {
        region_index,
        bound,
        scope: HittingScope::PerLevel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Profile;

    fn line() -> ActionSystem {
        ActionSystem::line(GroupChain::line_dyadic(1, 0..=12).unwrap(), 4).unwrap()
    }

    #[test]
    fn act_examples() {
        let s = line();
        let y = s.act(&GroupElement::real(&[0.5]).unwrap(), &Point::real1(1.25)).unwrap();
        assert_eq!(y, Point::real1(1.75));
        let chain = GroupChain::line_dyadic(2, [0]).unwrap();
        let t = ActionSystem::new(chain, MeasuredSpace::torus(2), ActionKind::Translation).unwrap();
        let y = t
            .act(&GroupElement::real(&[0.5, 0.75]).unwrap(), &Point::Real(vec![0.75, 0.5]))
            .unwrap();
        assert_eq!(y, Point::Real(vec![0.25, 0.25]));
        let a = ActionSystem::affine_on_itself(GroupChain::affine_levels([0]).unwrap(), vec![(-2.0, 2.0); 2]).unwrap();
        let y = a
            .act(
                &GroupElement::affine(2.0, 1.0).unwrap(),
                &Point::Element(GroupElement::affine(3.0, 4.0).unwrap()),
            )
            .unwrap();
        assert_eq!(y.chart()[1], 9.0);
        assert!((y.chart()[0] - 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hitting_examples() {
        let s = line();
        let trunc = TruncationPolicy::windows(vec![(-8.0, 8.0)]).unwrap();
        let b = BorelRegion::interval(0.0, 1.0);
        assert_eq!(
            hitting_measure(&s, LevelRef::Ambient, &b, &Point::real1(0.3), &trunc).unwrap(),
            HittingValue::Finite(1.0)
        );
        for n in 0..=12usize {
            let v = hitting_measure(&s, LevelRef::Index(n), &b, &Point::real1(0.0), &trunc).unwrap();
            assert_eq!(v, HittingValue::Finite(1.0 + (-(n as f64)).exp2()));
        }
        let torus = ActionSystem::torus(GroupChain::torus_cyclic([4]).unwrap()).unwrap();
        let arc = BorelRegion::half_open(vec![(0.0, 0.3)]);
        let v = hitting_measure(&torus, LevelRef::Index(0), &arc, &Point::real1(0.0), &trunc).unwrap();
        assert_eq!(v, HittingValue::Finite(0.5));
    }

    #[test]
    fn affine_on_line_is_not_integrable() {
        let sys = ActionSystem::affine_on_line(GroupChain::affine_levels([0]).unwrap()).unwrap();
        assert!(sys.negative_control);
        let trunc = TruncationPolicy::new(vec![(-2.0, 2.0), (-4.0, 4.0)], 16, 0.05).unwrap();
        let cover = vec![BorelRegion::interval(-1.0, 1.0)];
        let r = integrability_certificate(&sys, &cover, 5, 3, &trunc).unwrap();
        assert!(!r.pass);
        assert_eq!(r.finite_fractions, vec![0.0]);
    }

    #[test]
    fn translation_systems_are_integrable() {
        let s = line();
        let trunc = TruncationPolicy::windows(vec![(-8.0, 8.0)]).unwrap();
        let r = integrability_certificate(&s, &s.space.exhaustion.clone(), 20, 1, &trunc).unwrap();
        assert!(r.pass);
        let t = ActionSystem::torus(GroupChain::torus_dyadic(0..4).unwrap()).unwrap();
        let r = integrability_certificate(&t, &[BorelRegion::Whole], 20, 1, &TruncationPolicy::compact()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn relative_invariance_examples() {
        let t = ActionSystem::torus(GroupChain::torus_dyadic(0..4).unwrap()).unwrap();
        let arc = Integrand::Indicator(BorelRegion::Arc { start: 0.2, length: 0.35 });
        let s = vec![GroupElement::torus(&[0.123]).unwrap(), GroupElement::torus(&[0.77]).unwrap()];
        let r = relative_invariance_report(&t, &s, &[arc], 1024, 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);

        let l = line();
        let bx = Integrand::Indicator(BorelRegion::interval(-0.5, 0.25));
        let r = relative_invariance_report(&l, &[GroupElement::real(&[3.7]).unwrap()], &[bx], 1024, 1e-9).unwrap();
        assert!(r.pass);

        let a = ActionSystem::affine_on_itself(GroupChain::affine_levels([0]).unwrap(), vec![(-3.0, 3.0), (-6.0, 6.0)])
            .unwrap();
        let bump = Integrand::Bump(TestFunction::new(vec![0.1, 0.2], vec![0.6, 0.8], Profile::Poly(2)));
        let r = relative_invariance_report(&a, &[GroupElement::affine(2.0, 1.0).unwrap()], &[bump], 256, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn crucial_identity_on_unimodular_instances() {
        let t = ActionSystem::torus(GroupChain::torus_dyadic(0..4).unwrap()).unwrap();
        let g = Integrand::Indicator(BorelRegion::Arc { start: 0.1, length: 0.25 });
        let h = TestFunction::on_torus(vec![0.5], vec![0.25], Profile::Indicator);
        let r = crucial_identity_report(&t, &g, &h, LevelRef::Ambient, &TruncationPolicy::compact(), 1 << 10, 1e-2).unwrap();
        for v in r.values {
            assert!((v.re - 0.25 * 0.5).abs() < 2e-3, "{r:?}");
        }

        let l = line();
        let g = Integrand::Bump(TestFunction::bump1(0.3, 0.7, Profile::Poly(2)));
        let h = TestFunction::bump1(-0.2, 0.5, Profile::Poly(1));
        let r = crucial_identity_report(&l, &g, &h, LevelRef::Ambient, &TruncationPolicy::compact(), 1 << 10, 1e-6).unwrap();
        let expected = Profile::Poly(2).integral(0.3, 0.7) * Profile::Poly(1).integral(-0.2, 0.5);
        assert!(r.pass, "{r:?}");
        assert!((r.values[1].re - expected).abs() < 1e-6);
    }
}
