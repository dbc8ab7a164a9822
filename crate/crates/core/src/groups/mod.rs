//! Concrete locally compact groups, their subgroup levels, and group
//! arithmetic.
//!
//! The instance family is closed: tori and real lines with their finite
//! cyclic and dyadic lattice subgroups, finitary permutations with the
//! symmetric groups `S_n`, and the affine group `x ↦ ax + b` with the scale
//! levels `{a = 2^{k/2^m}}`.
//!
//! Affine law: `(a, b)(a', b') = (aa', ab' + b)`, right Haar measure
//! `a⁻¹ da db`, modular function `Δ(a, b) = 1/a`. Chart coordinates for the
//! affine group are `(ln a, b)`, in which the right Haar measure is `du db`.

mod chain;
pub mod exact;
pub mod perm;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{OrbintError, Result};
pub use chain::{
    enumerate_level, enumerate_level_within, modular_value, visit_level, Atom, GroupChain, LevelRef,
    ModularFn, SupportHint, TruncationPolicy, DEFAULT_CELLS_PER_UNIT, DEFAULT_STABILIZATION_TOL,
};
pub use exact::{ExactReal, Rational};
pub use perm::Permutation;

/// Group instances. Subgroup tags name their ambient group through
/// [`GroupId::ambient`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    /// `ℝ^d / ℤ^d`, coordinates in `[0, 1)`.
    Torus(usize),
    RealLine(usize),
    /// `ℤ/nℤ` embedded in `Torus(1)` as `{j/n}`.
    FiniteCyclic(u64),
    /// `2^{-k} ℤ^d` inside `RealLine(d)`.
    ScaledLattice { dim: usize, log2_inv_step: u32 },
    /// Permutations of `{0, …, n-1}` inside the finitary symmetric group.
    SymFinite(usize),
    SymInfinite,
    Affine,
    /// `{(a, b) : a = 2^{k/2^m}, k ∈ ℤ, b ∈ ℝ}`.
    AffineScaleLevel(u32),
}

impl GroupId {
    pub fn ambient(&self) -> GroupId {
        match *self {
            GroupId::FiniteCyclic(_) => GroupId::Torus(1),
            GroupId::ScaledLattice { dim, .. } => GroupId::RealLine(dim),
            GroupId::SymFinite(_) => GroupId::SymInfinite,
            GroupId::AffineScaleLevel(_) => GroupId::Affine,
            g => g,
        }
    }

    pub fn is_ambient(&self) -> bool {
        self.ambient() == *self
    }

    /// Number of real chart coordinates; `None` for permutation groups.
    pub fn chart_dim(&self) -> Option<usize> {
        match self.ambient() {
            GroupId::Torus(d) | GroupId::RealLine(d) => Some(d),
            GroupId::Affine => Some(2),
            _ => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(
            self,
            GroupId::Torus(_) | GroupId::FiniteCyclic(_) | GroupId::SymFinite(_)
        )
    }

    pub fn is_unimodular(&self) -> bool {
        !matches!(self.ambient(), GroupId::Affine)
    }

    /// Exact subgroup test: `other ⊆ self`.
    pub fn contains_group(&self, other: &GroupId) -> bool {
        if self == other {
            return true;
        }
        if self.is_ambient() {
            return other.ambient() == *self;
        }
        match (*self, *other) {
            (GroupId::FiniteCyclic(m), GroupId::FiniteCyclic(n)) => n > 0 && m % n == 0,
            (
                GroupId::ScaledLattice { dim: d1, log2_inv_step: k },
                GroupId::ScaledLattice { dim: d2, log2_inv_step: j },
            ) => d1 == d2 && j <= k,
            (GroupId::SymFinite(m), GroupId::SymFinite(n)) => n <= m,
            (GroupId::AffineScaleLevel(m), GroupId::AffineScaleLevel(n)) => n <= m,
            _ => false,
        }
    }

    /// Smallest listed group containing both, or their common ambient group.
    pub fn join(&self, other: &GroupId) -> Option<GroupId> {
        if self.contains_group(other) {
            Some(*self)
        } else if other.contains_group(self) {
            Some(*other)
        } else if self.ambient() == other.ambient() {
            Some(self.ambient())
        } else {
            None
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Torus(d) => write!(f, "T^{d}"),
            GroupId::RealLine(d) => write!(f, "R^{d}"),
            GroupId::FiniteCyclic(n) => write!(f, "Z/{n}Z"),
            GroupId::ScaledLattice { dim, log2_inv_step } => {
                write!(f, "2^-{log2_inv_step} Z^{dim}")
            }
            GroupId::SymFinite(n) => write!(f, "S_{n}"),
            GroupId::SymInfinite => write!(f, "S_inf"),
            GroupId::Affine => write!(f, "Aff"),
            GroupId::AffineScaleLevel(m) => write!(f, "Aff[2^(Z/2^{m})]"),
        }
    }
}

/// `log2(a) = num / 2^log2_den`, normalized so that `num` is odd unless
/// `log2_den = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicExponent {
    pub num: i64,
    pub log2_den: u32,
}

impl DyadicExponent {
    pub fn new(num: i64, log2_den: u32) -> Self {
        let (mut num, mut den) = (num, log2_den);
        while den > 0 && num % 2 == 0 {
            num /= 2;
            den -= 1;
        }
        if num == 0 {
            den = 0;
        }
        Self { num, log2_den: den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / (1u64 << self.log2_den) as f64
    }
}

impl std::ops::Add for DyadicExponent {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        let den = self.log2_den.max(other.log2_den);
        let a = self.num << (den - self.log2_den);
        let b = other.num << (den - other.log2_den);
        Self::new(a + b, den)
    }
}

impl std::ops::Neg for DyadicExponent {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.num, self.log2_den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Coords {
    /// Floating coordinates. Every finite `f64` is a dyadic rational, so
    /// membership in lattices and rational sets is still decided exactly.
    Real(Vec<f64>),
    Exact(Vec<ExactReal>),
    Affine {
        a: f64,
        b: f64,
        log2_a: Option<DyadicExponent>,
    },
    Perm(Permutation),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    group: GroupId,
    coords: Coords,
}

const EXACT_CONVERSION_LOG2_DEN: u32 = 40;

fn f64_to_exact(x: f64) -> Option<ExactReal> {
    let scale = (1u64 << EXACT_CONVERSION_LOG2_DEN) as f64;
    let scaled = x * scale;
    if scaled.fract() == 0.0 && scaled.abs() < 2f64.powi(62) {
        Some(ExactReal::ratio(scaled as i64, 1i64 << EXACT_CONVERSION_LOG2_DEN))
    } else {
        None
    }
}

fn reduce_mod1(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl GroupElement {
    /// Validating constructor.
    pub fn new(group: GroupId, coords: Coords) -> Result<Self> {
        let mut g = GroupElement { group, coords };
        g.canonicalize()?;
        if !g.group.contains_element(&g) {
            return Err(OrbintError::InvalidElement(format!(
                "coordinates {:?} do not lie in {}",
                g.coords, g.group
            )));
        }
        Ok(g)
    }

    fn canonicalize(&mut self) -> Result<()> {
        let ambient = self.group.ambient();
        match (&mut self.coords, ambient) {
            (Coords::Real(v), GroupId::Torus(d)) | (Coords::Real(v), GroupId::RealLine(d)) => {
                if v.len() != d {
                    return Err(OrbintError::InvalidElement(format!(
                        "expected {d} coordinates, got {}",
                        v.len()
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(OrbintError::InvalidElement("non-finite coordinate".into()));
                }
                if matches!(ambient, GroupId::Torus(_)) {
                    v.iter_mut().for_each(|x| *x = reduce_mod1(*x));
                }
            }
            (Coords::Exact(v), GroupId::Torus(d)) | (Coords::Exact(v), GroupId::RealLine(d)) => {
                if v.len() != d {
                    return Err(OrbintError::InvalidElement(format!(
                        "expected {d} coordinates, got {}",
                        v.len()
                    )));
                }
                if matches!(ambient, GroupId::Torus(_)) {
                    v.iter_mut().for_each(|x| *x = x.fract());
                }
            }
            (Coords::Affine { a, b, log2_a }, GroupId::Affine) => {
                if !(*a > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(OrbintError::InvalidElement(format!(
                        "affine element needs a > 0, got ({a}, {b})"
                    )));
                }
                if let Some(e) = log2_a {
                    *a = e.value().exp2();
                }
            }
            (Coords::Perm(_), GroupId::SymInfinite) => {}
            (c, g) => {
                return Err(OrbintError::InvalidElement(format!(
                    "coordinates {c:?} do not fit group {g}"
                )))
            }
        }
        Ok(())
    }

    pub fn identity(group: GroupId) -> Self {
        let coords = match group.ambient() {
            GroupId::Torus(d) | GroupId::RealLine(d) => Coords::Real(vec![0.0; d]),
            GroupId::Affine => Coords::Affine {
                a: 1.0,
                b: 0.0,
                log2_a: Some(DyadicExponent::new(0, 0)),
            },
            _ => Coords::Perm(Permutation::identity()),
        };
        GroupElement { group, coords }
    }

    pub fn torus(coords: &[f64]) -> Result<Self> {
        Self::new(GroupId::Torus(coords.len()), Coords::Real(coords.to_vec()))
    }

    pub fn real(coords: &[f64]) -> Result<Self> {
        Self::new(GroupId::RealLine(coords.len()), Coords::Real(coords.to_vec()))
    }

    pub fn exact_real(coords: Vec<ExactReal>) -> Result<Self> {
        Self::new(GroupId::RealLine(coords.len()), Coords::Exact(coords))
    }

    /// `j/n ∈ ℤ/nℤ ⊂ T`.
    pub fn cyclic(n: u64, j: i64) -> Self {
        let coords = if n.is_power_of_two() {
            Coords::Real(vec![reduce_mod1(j as f64 / n as f64)])
        } else {
            Coords::Exact(vec![ExactReal::ratio(j, n as i64).fract()])
        };
        GroupElement {
            group: GroupId::FiniteCyclic(n),
            coords,
        }
    }

    /// `index · 2^{-k} ∈ 2^{-k}ℤ^d`.
    pub fn lattice(log2_inv_step: u32, index: &[i64]) -> Self {
        let step = (-(log2_inv_step as f64)).exp2();
        GroupElement {
            group: GroupId::ScaledLattice {
                dim: index.len(),
                log2_inv_step,
            },
            coords: Coords::Real(index.iter().map(|&k| k as f64 * step).collect()),
        }
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Self::new(GroupId::Affine, Coords::Affine { a, b, log2_a: None })
    }

    /// `(2^{k/2^m}, b)` in the scale level `m`.
    pub fn affine_level(m: u32, k: i64, b: f64) -> Self {
        let e = DyadicExponent::new(k, m);
        GroupElement {
            group: GroupId::AffineScaleLevel(m),
            coords: Coords::Affine {
                a: e.value().exp2(),
                b,
                log2_a: Some(e),
            },
        }
    }

    /// Permutation in the smallest `S_n` containing it (at least `S_1`).
    pub fn perm(p: Permutation) -> Self {
        let n = p.support_len().max(1);
        GroupElement {
            group: GroupId::SymFinite(n),
            coords: Coords::Perm(p),
        }
    }

    /// Re-tags the element as a member of `group`, checking membership.
    pub fn in_group(mut self, group: GroupId) -> Result<Self> {
        if !group.contains_element(&self) {
            return Err(OrbintError::InvalidElement(format!(
                "element is not a member of {group}"
            )));
        }
        self.group = group;
        self.canonicalize()?;
        Ok(self)
    }

    /// Coordinates when stored as floats.
    pub fn real_coords(&self) -> Option<&[f64]> {
        match &self.coords {
            Coords::Real(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn set_real_coords(&mut self, values: impl Iterator<Item = f64>) {
        if let Coords::Real(v) = &mut self.coords {
            for (slot, x) in v.iter_mut().zip(values) {
                *slot = x;
            }
        }
    }

    pub(crate) fn set_affine_translation(&mut self, value: f64) {
        if let Coords::Affine { b, .. } = &mut self.coords {
            *b = value;
        }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    /// Real chart coordinates: torus/line coordinates, `(ln a, b)` for the
    /// affine group, image word for permutations.
    pub fn chart(&self) -> Vec<f64> {
        match &self.coords {
            Coords::Real(v) => v.clone(),
            Coords::Exact(v) => v.iter().map(ExactReal::to_f64).collect(),
            Coords::Affine { a, b, log2_a } => {
                let u = match log2_a {
                    Some(e) => e.value() * std::f64::consts::LN_2,
                    None => a.ln(),
                };
                vec![u, *b]
            }
            Coords::Perm(p) => p.images().iter().map(|&i| i as f64).collect(),
        }
    }

    /// Natural coordinates (`(a, b)` for the affine group).
    pub fn values(&self) -> Vec<f64> {
        match &self.coords {
            Coords::Affine { a, b, .. } => vec![*a, *b],
            _ => self.chart(),
        }
    }

    pub fn affine_pair(&self) -> Option<(f64, f64)> {
        match self.coords {
            Coords::Affine { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn permutation(&self) -> Option<&Permutation> {
        match &self.coords {
            Coords::Perm(p) => Some(p),
            _ => None,
        }
    }

    /// Exact coordinates when available: floats convert when their dyadic
    /// denominator is at most `2^40`.
    pub fn exact_coords(&self) -> Option<Vec<ExactReal>> {
        match &self.coords {
            Coords::Exact(v) => Some(v.clone()),
            Coords::Real(v) => v.iter().map(|&x| f64_to_exact(x)).collect(),
            _ => None,
        }
    }
}

impl GroupId {
    /// Exact membership test for an element of the same ambient group.
    pub fn contains_element(&self, g: &GroupElement) -> bool {
        if g.group.ambient() != self.ambient() {
            return false;
        }
        match *self {
            GroupId::Torus(_) | GroupId::RealLine(_) | GroupId::Affine | GroupId::SymInfinite => {
                true
            }
            GroupId::FiniteCyclic(n) => match &g.coords {
                Coords::Exact(v) => v.iter().all(|x| x.is_multiple_of_inverse(n as i64)),
                Coords::Real(v) => v.iter().all(|&x| match f64_to_exact(x) {
                    Some(e) => e.is_multiple_of_inverse(n as i64),
                    None => false,
                }),
                _ => false,
            },
            GroupId::ScaledLattice { log2_inv_step, .. } => {
                let scale = 1i64 << log2_inv_step;
                match &g.coords {
                    Coords::Exact(v) => v.iter().all(|x| x.is_multiple_of_inverse(scale)),
                    Coords::Real(v) => v.iter().all(|&x| (x * scale as f64).fract() == 0.0),
                    _ => false,
                }
            }
            GroupId::SymFinite(n) => match &g.coords {
                Coords::Perm(p) => p.support_len() <= n,
                _ => false,
            },
            GroupId::AffineScaleLevel(m) => match &g.coords {
                Coords::Affine { log2_a: Some(e), .. } => e.log2_den <= m,
                Coords::Affine { a, log2_a: None, .. } => *a == 1.0,
                _ => false,
            },
        }
    }
}

fn add_coords(x: &Coords, y: &Coords) -> Coords {
    match (x, y) {
        (Coords::Real(a), Coords::Real(b)) => {
            Coords::Real(a.iter().zip(b).map(|(p, q)| p + q).collect())
        }
        (Coords::Exact(a), Coords::Exact(b)) => {
            Coords::Exact(a.iter().zip(b).map(|(p, q)| *p + *q).collect())
        }
        (Coords::Exact(e), Coords::Real(r)) | (Coords::Real(r), Coords::Exact(e)) => {
            let converted: Option<Vec<ExactReal>> = r.iter().map(|&x| f64_to_exact(x)).collect();
            match converted {
                Some(rc) => Coords::Exact(e.iter().zip(rc).map(|(p, q)| *p + q).collect()),
                None => Coords::Real(
                    e.iter()
                        .zip(r)
                        .map(|(p, q)| p.to_f64() + q)
                        .collect(),
                ),
            }
        }
        _ => unreachable!("additive coordinates only"),
    }
}

/// Group law in the ambient group. The result is tagged with the smallest
/// listed group containing both factors.
pub fn compose(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let group = g.group.join(&h.group).ok_or_else(|| {
        OrbintError::MismatchedGroups(format!("cannot compose {} with {}", g.group, h.group))
    })?;
    let coords = match (&g.coords, &h.coords) {
        (
            Coords::Affine { a, b, log2_a: ea },
            Coords::Affine {
                a: a2,
                b: b2,
                log2_a: eb,
            },
        ) => Coords::Affine {
            a: a * a2,
            b: a * b2 + b,
            log2_a: match (ea, eb) {
                (Some(x), Some(y)) => Some(*x + *y),
                _ => None,
            },
        },
        (Coords::Perm(p), Coords::Perm(q)) => Coords::Perm(p.compose(q)),
        (x @ (Coords::Real(_) | Coords::Exact(_)), y @ (Coords::Real(_) | Coords::Exact(_))) => {
            if g.group.chart_dim() != h.group.chart_dim() {
                return Err(OrbintError::MismatchedGroups(format!(
                    "dimension mismatch between {} and {}",
                    g.group, h.group
                )));
            }
            add_coords(x, y)
        }
        _ => {
            return Err(OrbintError::MismatchedGroups(format!(
                "incompatible coordinates for {} and {}",
                g.group, h.group
            )))
        }
    };
    let mut out = GroupElement { group, coords };
    out.canonicalize()?;
    Ok(out)
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    let coords = match &g.coords {
        Coords::Real(v) => Coords::Real(v.iter().map(|x| -x).collect()),
        Coords::Exact(v) => Coords::Exact(v.iter().map(|x| -*x).collect()),
        Coords::Affine { a, b, log2_a } => Coords::Affine {
            a: 1.0 / a,
            b: -b / a,
            log2_a: log2_a.map(std::ops::Neg::neg),
        },
        Coords::Perm(p) => Coords::Perm(p.inverse()),
    };
    let mut out = GroupElement {
        group: g.group,
        coords,
    };
    out.canonicalize()
        .expect("inverse of a valid element is valid");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_addition_wraps() {
        let g = GroupElement::torus(&[0.25]).unwrap();
        let h = GroupElement::torus(&[0.85]).unwrap();
        let gh = compose(&g, &h).unwrap();
        assert!((gh.chart()[0] - 0.10).abs() < 1e-15);
    }

    #[test]
    fn affine_law_matches_map_composition() {
        let g = GroupElement::affine(2.0, 1.0).unwrap();
        let h = GroupElement::affine(3.0, 4.0).unwrap();
        assert_eq!(compose(&g, &h).unwrap().affine_pair(), Some((6.0, 9.0)));
        // as maps: g(h(x)) = 2(3x + 4) + 1 = 6x + 9
        let x = 0.7;
        assert_eq!(2.0 * (3.0 * x + 4.0) + 1.0, 6.0 * x + 9.0);
    }

    #[test]
    fn inverses() {
        let t = GroupElement::torus(&[0.3]).unwrap();
        assert!((inverse(&t).chart()[0] - 0.7).abs() < 1e-15);
        assert_eq!(
            inverse(&GroupElement::affine(2.0, 1.0).unwrap()).affine_pair(),
            Some((0.5, -0.5))
        );
        let l = GroupElement::lattice(3, &[3]);
        assert_eq!(inverse(&l).chart(), vec![-0.375]);
        assert!(GroupId::ScaledLattice { dim: 1, log2_inv_step: 3 }.contains_element(&inverse(&l)));
    }

    #[test]
    fn identity_is_neutral_exactly_for_discrete_elements() {
        for j in 0..6 {
            let g = GroupElement::cyclic(6, j);
            let e = compose(&g, &inverse(&g)).unwrap();
            assert_eq!(e.exact_coords().unwrap(), vec![ExactReal::zero()]);
        }
        for p in Permutation::all(4) {
            let g = GroupElement::perm(p);
            assert_eq!(
                compose(&g, &inverse(&g)).unwrap().permutation(),
                Some(&Permutation::identity())
            );
        }
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let t = GroupElement::torus(&[0.3]).unwrap();
        let a = GroupElement::affine(2.0, 1.0).unwrap();
        assert!(matches!(
            compose(&t, &a),
            Err(OrbintError::MismatchedGroups(_))
        ));
        let r = GroupElement::real(&[0.3]).unwrap();
        assert!(compose(&t, &r).is_err());
    }

    #[test]
    fn subgroup_membership_is_exact() {
        assert!(GroupId::FiniteCyclic(8).contains_group(&GroupId::FiniteCyclic(4)));
        assert!(!GroupId::FiniteCyclic(8).contains_group(&GroupId::FiniteCyclic(3)));
        assert!(GroupId::Torus(1).contains_group(&GroupId::FiniteCyclic(3)));
        let third = GroupElement::cyclic(3, 1);
        assert!(GroupId::FiniteCyclic(6).contains_element(&third));
        assert!(!GroupId::FiniteCyclic(4).contains_element(&third));
        let g = GroupElement::affine_level(2, 3, 0.5);
        assert!(GroupId::AffineScaleLevel(2).contains_element(&g));
        assert!(GroupId::AffineScaleLevel(5).contains_element(&g));
        assert!(!GroupId::AffineScaleLevel(1).contains_element(&g));
        let h = GroupElement::affine_level(3, 1, 0.0);
        let gh = compose(&g, &h).unwrap();
        assert_eq!(gh.group(), GroupId::AffineScaleLevel(3));
        assert!(GroupId::AffineScaleLevel(3).contains_element(&gh));
    }

    #[test]
    fn dyadic_exponents_normalize() {
        let e = DyadicExponent::new(4, 3);
        assert_eq!(e, DyadicExponent { num: 1, log2_den: 1 });
        assert_eq!(e + DyadicExponent::new(1, 1), DyadicExponent::new(1, 0));
    }
}
