//! Subgroup chains, modular functions, truncation windows and level
//! enumeration.

use serde::{Deserialize, Serialize};

use super::{GroupElement, GroupId, Permutation};
use crate::error::{OrbintError, Result};
use crate::measures;
use crate::quadrature::Grid1;

/// Modular function of an ambient group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModularFn {
    /// `Δ ≡ 1`.
    Trivial,
    /// `Δ(a, b) = 1/a` on the affine group.
    InverseScale,
}

impl ModularFn {
    pub fn for_group(g: GroupId) -> Self {
        if g.is_unimodular() {
            ModularFn::Trivial
        } else {
            ModularFn::InverseScale
        }
    }

    pub fn value(&self, g: &GroupElement) -> f64 {
        match self {
            ModularFn::Trivial => 1.0,
            ModularFn::InverseScale => match g.affine_pair() {
                Some((a, _)) => 1.0 / a,
                None => 1.0,
            },
        }
    }

    /// `Δ` as a function of the affine chart coordinate `u = ln a`.
    pub fn value_at_log_scale(&self, u: f64) -> f64 {
        match self {
            ModularFn::Trivial => 1.0,
            ModularFn::InverseScale => (-u).exp(),
        }
    }
}

/// Which measure of a chain: a level `ρₙ` or the ambient `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelRef {
    Index(usize),
    Ambient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupChain {
    pub ambient: GroupId,
    pub levels: Vec<GroupId>,
    pub modular: ModularFn,
    pub mc_verified: bool,
    /// False for level families used only to probe full (non-divisibility)
    /// schedules such as `ℤ/nℤ` for every `n`.
    pub nested: bool,
    /// Scale of the ambient reference measure; `1` is the pinned convention.
    pub ambient_scale: f64,
}

impl GroupChain {
    /// Increasing chain; nesting is checked exactly.
    pub fn new(ambient: GroupId, levels: Vec<GroupId>) -> Result<Self> {
        let chain = Self::family(ambient, levels)?;
        for (i, w) in chain.levels.windows(2).enumerate() {
            if !w[1].contains_group(&w[0]) {
                return Err(OrbintError::InvalidChain(format!(
                    "level {} ({}) is not contained in level {} ({})",
                    i,
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        Ok(GroupChain {
            nested: true,
            ..chain
        })
    }

    /// Family of subgroups of one ambient group without the nesting
    /// requirement.
    pub fn family(ambient: GroupId, levels: Vec<GroupId>) -> Result<Self> {
        if !ambient.is_ambient() {
            return Err(OrbintError::InvalidChain(format!(
                "{ambient} is not an ambient group"
            )));
        }
        if levels.is_empty() {
            return Err(OrbintError::InvalidChain("no levels".into()));
        }
        for l in &levels {
            if l.ambient() != ambient {
                return Err(OrbintError::InvalidChain(format!(
                    "level {l} is not a subgroup of {ambient}"
                )));
            }
        }
        Ok(GroupChain {
            ambient,
            levels,
            modular: ModularFn::for_group(ambient),
            mc_verified: false,
            nested: false,
            ambient_scale: 1.0,
        })
    }

    /// `ℤ/2^kℤ ⊂ T` for `k` in `ks`.
    pub fn torus_dyadic(ks: impl IntoIterator<Item = u32>) -> Result<Self> {
        let levels = ks.into_iter().map(|k| GroupId::FiniteCyclic(1u64 << k)).collect();
        Self::new(GroupId::Torus(1), levels)
    }

    /// `ℤ/nℤ ⊂ T` for every `n` in `ns`, not necessarily nested.
    pub fn torus_cyclic(ns: impl IntoIterator<Item = u64>) -> Result<Self> {
        Self::family(
            GroupId::Torus(1),
            ns.into_iter().map(GroupId::FiniteCyclic).collect(),
        )
    }

    /// `2^{-k}ℤ^d ⊂ ℝ^d` for `k` in `ks`.
    pub fn line_dyadic(dim: usize, ks: impl IntoIterator<Item = u32>) -> Result<Self> {
        let levels = ks
            .into_iter()
            .map(|k| GroupId::ScaledLattice {
                dim,
                log2_inv_step: k,
            })
            .collect();
        Self::new(GroupId::RealLine(dim), levels)
    }

    pub fn affine_levels(ms: impl IntoIterator<Item = u32>) -> Result<Self> {
        Self::new(
            GroupId::Affine,
            ms.into_iter().map(GroupId::AffineScaleLevel).collect(),
        )
    }

    pub fn symmetric(ns: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(
            GroupId::SymInfinite,
            ns.into_iter().map(GroupId::SymFinite).collect(),
        )
    }

    /// Same chain with the ambient reference measure multiplied by `c`.
    pub fn with_ambient_scale(mut self, c: f64) -> Self {
        self.ambient_scale = c;
        self
    }

    pub fn level(&self, i: usize) -> Result<GroupId> {
        self.levels.get(i).copied().ok_or(OrbintError::NoSuchLevel(i))
    }

    pub fn group_at(&self, level: LevelRef) -> Result<GroupId> {
        match level {
            LevelRef::Index(i) => self.level(i),
            LevelRef::Ambient => Ok(self.ambient),
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

pub fn modular_value(chain: &GroupChain, g: &GroupElement) -> f64 {
    chain.modular.value(g)
}

pub const DEFAULT_CELLS_PER_UNIT: usize = 1 << 14;
pub const DEFAULT_STABILIZATION_TOL: f64 = 0.05;

/// Explicit truncation for noncompact coordinates. Windows are given in
/// chart coordinates: one per real coordinate, or `(ln a, b)` for the affine
/// group. For `SymInfinite` the upper end of the first window bounds the
/// support of the permutations enumerated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub windows: Vec<(f64, f64)>,
    pub cells_per_unit: usize,
    pub stabilization_tol: f64,
}

impl TruncationPolicy {
    pub fn new(windows: Vec<(f64, f64)>, cells_per_unit: usize, stabilization_tol: f64) -> Result<Self> {
        for &(lo, hi) in &windows {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(OrbintError::InvalidTruncation(format!(
                    "window ({lo}, {hi}) is not a finite nonempty interval"
                )));
            }
        }
        if cells_per_unit == 0 {
            return Err(OrbintError::InvalidTruncation("cells_per_unit must be positive".into()));
        }
        if !(stabilization_tol > 0.0 && stabilization_tol < 0.5) {
            return Err(OrbintError::InvalidTruncation(format!(
                "stabilization tolerance {stabilization_tol} outside (0, 0.5)"
            )));
        }
        Ok(Self {
            windows,
            cells_per_unit,
            stabilization_tol,
        })
    }

    /// Policy for compact groups, where no window is consulted.
    pub fn compact() -> Self {
        Self {
            windows: Vec::new(),
            cells_per_unit: DEFAULT_CELLS_PER_UNIT,
            stabilization_tol: DEFAULT_STABILIZATION_TOL,
        }
    }

    pub fn windows(windows: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(windows, DEFAULT_CELLS_PER_UNIT, DEFAULT_STABILIZATION_TOL)
    }

    pub fn with_cells_per_unit(mut self, cells: usize) -> Self {
        self.cells_per_unit = cells.max(1);
        self
    }

    /// Window for chart axis `i`; a single window is reused on every axis.
    pub fn window(&self, i: usize) -> Result<(f64, f64)> {
        match self.windows.len() {
            0 => Err(OrbintError::InvalidTruncation(
                "a window is required for a noncompact coordinate".into(),
            )),
            1 => Ok(self.windows[0]),
            _ => self.windows.get(i).copied().ok_or_else(|| {
                OrbintError::InvalidTruncation(format!("no window for coordinate {i}"))
            }),
        }
    }

    /// Every window doubled in width about its center.
    pub fn doubled(&self) -> Self {
        let windows = self
            .windows
            .iter()
            .map(|&(lo, hi)| {
                let c = 0.5 * (lo + hi);
                let w = hi - lo;
                (c - w, c + w)
            })
            .collect();
        Self {
            windows,
            ..self.clone()
        }
    }
}

/// A group element with its Haar weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub element: GroupElement,
    pub weight: f64,
}

/// Where in chart coordinates the integrand can be nonzero, used to skip
/// atoms and to detect windows that cut off part of the support. Infinite
/// bounds mean "no restriction".
#[derive(Clone, Debug, PartialEq)]
pub enum SupportHint {
    Unbounded,
    Box(Vec<(f64, f64)>),
    /// Affine elements `(u, b)` with `u ∈ u`-range and `b + e^u·shear ∈ b`-range.
    AffineSheared {
        u: (f64, f64),
        b: (f64, f64),
        shear: f64,
    },
    /// Restrict enumeration to the inner hint without requiring the window
    /// to cover it.
    Clipped(Box<SupportHint>),
}

impl SupportHint {
    /// The underlying hint and whether window coverage is enforced.
    pub fn parts(&self) -> (&SupportHint, bool) {
        match self {
            SupportHint::Clipped(inner) => (inner.parts().0, false),
            h => (h, true),
        }
    }

    pub fn clipped(self) -> SupportHint {
        match self {
            SupportHint::Clipped(_) => self,
            h => SupportHint::Clipped(Box::new(h)),
        }
    }
}

const COVER_SLACK: f64 = 1e-12;

fn check_cover(what: &str, window: (f64, f64), needed: (f64, f64)) -> Result<()> {
    let (lo, hi) = needed;
    if (lo.is_finite() && lo < window.0 - COVER_SLACK) || (hi.is_finite() && hi > window.1 + COVER_SLACK) {
        return Err(OrbintError::TruncationTooSmall(format!(
            "{what} window [{}, {}] does not cover support [{lo}, {hi}]",
            window.0, window.1
        )));
    }
    Ok(())
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.max(b.0), a.1.min(b.1))
}

const MAX_ENUMERABLE_SYM: usize = 10;

/// Visits every atom of level `level` inside the truncation window that can
/// meet the hinted support, with its Fell-normalized weight.
pub fn visit_level(
    chain: &GroupChain,
    level: usize,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
    visit: &mut dyn FnMut(&GroupElement, f64) -> Result<()>,
) -> Result<()> {
    let group = chain.level(level)?;
    let weight = measures::level_atom_weight(chain, level)?;
    let (hint, strict) = hint.parts();
    match group {
        GroupId::FiniteCyclic(n) => {
            for j in 0..n {
                visit(&GroupElement::cyclic(n, j as i64), weight)?;
            }
            Ok(())
        }
        GroupId::ScaledLattice { dim, log2_inv_step } => {
            let scale = (log2_inv_step as f64).exp2();
            let mut ranges = Vec::with_capacity(dim);
            for i in 0..dim {
                let window = trunc.window(i)?;
                let mut range = window;
                if let SupportHint::Box(b) = hint {
                    let needed = b[i.min(b.len() - 1)];
                    if strict {
                        check_cover("lattice", window, needed)?;
                    }
                    range = intersect(window, needed);
                }
                let lo = (range.0 * scale).ceil() as i64;
                let hi = (range.1 * scale).floor() as i64;
                if hi < lo {
                    return Ok(());
                }
                ranges.push((lo, hi));
            }
            let mut index: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            let mut element = GroupElement::lattice(log2_inv_step, &index);
            loop {
                element.set_real_coords(index.iter().map(|&k| k as f64 / scale));
                visit(&element, weight)?;
                let mut axis = dim;
                loop {
                    if axis == 0 {
                        return Ok(());
                    }
                    axis -= 1;
                    if index[axis] < ranges[axis].1 {
                        index[axis] += 1;
                        break;
                    }
                    index[axis] = ranges[axis].0;
                }
            }
        }
        GroupId::SymFinite(n) => {
            if n > MAX_ENUMERABLE_SYM {
                return Err(OrbintError::UnsupportedLevel(format!(
                    "S_{n} is too large to enumerate; use exchangeable blocks"
                )));
            }
            for p in Permutation::all(n) {
                visit(&GroupElement::perm(p).in_group(group)?, weight)?;
            }
            Ok(())
        }
        GroupId::AffineScaleLevel(m) => {
            let step = std::f64::consts::LN_2 / (1u64 << m) as f64;
            let uw = trunc.window(0)?;
            let bw = trunc.window(1)?;
            let (u_needed, b_needed, shear) = match hint {
                SupportHint::Unbounded => ((f64::NEG_INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::INFINITY), 0.0),
                SupportHint::Box(b) => (b[0], b[1], 0.0),
                SupportHint::AffineSheared { u, b, shear } => (*u, *b, *shear),
                SupportHint::Clipped(_) => unreachable!("parts() unwraps clipping"),
            };
            if strict {
                check_cover("scale", uw, u_needed)?;
            }
            let ur = intersect(uw, u_needed);
            let k_lo = (ur.0 / step).ceil() as i64;
            let k_hi = (ur.1 / step).floor() as i64;
            let grid = Grid1::per_unit(bw.0, bw.1, trunc.cells_per_unit);
            let sheared = b_needed.0.is_finite() || b_needed.1.is_finite();
            for k in k_lo..=k_hi {
                let mut element = GroupElement::affine_level(m, k, 0.0);
                let cells = if sheared {
                    let a = element.affine_pair().map_or(1.0, |p| p.0);
                    let lo = b_needed.0 - a * shear;
                    let hi = b_needed.1 - a * shear;
                    if strict {
                        check_cover("translation", bw, (lo, hi))?;
                    }
                    grid.touching(lo, hi)
                } else {
                    0..grid.cells
                };
                for c in cells {
                    element.set_affine_translation(grid.midpoint(c));
                    visit(&element, weight * grid.h)?;
                }
            }
            Ok(())
        }
        other => Err(OrbintError::UnsupportedLevel(format!(
            "{other} has no atomic level enumeration"
        ))),
    }
}

/// All level atoms inside the truncation window.
pub fn enumerate_level(chain: &GroupChain, level: usize, trunc: &TruncationPolicy) -> Result<Vec<Atom>> {
    enumerate_level_within(chain, level, trunc, &SupportHint::Unbounded)
}

pub fn enumerate_level_within(
    chain: &GroupChain,
    level: usize,
    trunc: &TruncationPolicy,
    hint: &SupportHint,
) -> Result<Vec<Atom>> {
    let mut out = Vec::new();
    visit_level(chain, level, trunc, hint, &mut |g, w| {
        out.push(Atom {
            element: g.clone(),
            weight: w,
        });
        Ok(())
    })?;
    Ok(out)
}
