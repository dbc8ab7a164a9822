//! Measured spaces, their points and Borel regions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OrbintError, Result};
use crate::groups::{GroupElement, GroupId};
use crate::quadrature::Grid1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpaceDomain {
    /// Probability Lebesgue measure on `[0, 1)^d`.
    Torus(usize),
    /// Lebesgue measure on `ℝ^d`.
    RealLine(usize),
    /// `{0,1}^len` with product Bernoulli(`p`) measure; coordinates beyond
    /// `len` are never read.
    Cylinder { p: f64, len: usize },
    /// A group acting on itself, with its right Haar measure.
    Group(GroupId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Real(Vec<f64>),
    Bits(Vec<u8>),
    Element(GroupElement),
}

impl Point {
    pub fn real1(x: f64) -> Self {
        Point::Real(vec![x])
    }

    /// Chart coordinates.
    pub fn chart(&self) -> Vec<f64> {
        match self {
            Point::Real(v) => v.clone(),
            Point::Bits(b) => b.iter().map(|&x| f64::from(x)).collect(),
            Point::Element(g) => g.chart(),
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Point::Real(v) => Some(v),
            _ => None,
        }
    }

    /// A group element viewed as a point: chart coordinates for tori and
    /// lines, the element itself otherwise.
    pub fn from_element(g: &GroupElement) -> Self {
        match g.group().ambient() {
            GroupId::Torus(_) | GroupId::RealLine(_) => Point::Real(g.chart()),
            _ => Point::Element(g.clone()),
        }
    }
}

/// Borel sets with exact membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BorelRegion {
    /// Product of intervals in chart coordinates, `[a, b)` when half-open
    /// and `[a, b]` otherwise.
    Box {
        bounds: Vec<(f64, f64)>,
        half_open: bool,
    },
    /// Torus arc `[start, start + length)` taken modulo 1.
    Arc { start: f64, length: f64 },
    /// `ℚ ∩ [a, b]` on a line.
    RationalSet { window: (f64, f64) },
    /// Disjoint union.
    Union(Vec<BorelRegion>),
    Whole,
}

fn in_interval(x: f64, (a, b): (f64, f64), half_open: bool) -> bool {
    if half_open {
        a <= x && x < b
    } else {
        a <= x && x <= b
    }
}

impl BorelRegion {
    pub fn closed(bounds: Vec<(f64, f64)>) -> Self {
        BorelRegion::Box {
            bounds,
            half_open: false,
        }
    }

    pub fn half_open(bounds: Vec<(f64, f64)>) -> Self {
        BorelRegion::Box {
            bounds,
            half_open: true,
        }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::closed(vec![(a, b)])
    }

    fn contains_chart(&self, x: &[f64]) -> bool {
        match self {
            BorelRegion::Box { bounds, half_open } => {
                bounds.len() == x.len() && x.iter().zip(bounds).all(|(&v, &r)| in_interval(v, r, *half_open))
            }
            BorelRegion::Arc { start, length } => (x[0] - start).rem_euclid(1.0) < *length,
            // every finite double is a dyadic rational
            BorelRegion::RationalSet { window } => x[0].is_finite() && in_interval(x[0], *window, false),
            BorelRegion::Union(parts) => parts.iter().any(|p| p.contains_chart(x)),
            BorelRegion::Whole => true,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match x {
            Point::Real(v) => self.contains_chart(v),
            Point::Element(g) => self.contains_element(g),
            Point::Bits(b) => {
                let v: Vec<f64> = b.iter().map(|&x| f64::from(x)).collect();
                self.contains_chart(&v)
            }
        }
    }

    /// Exact membership of a group element, using exact coordinates where
    /// the element carries them.
    pub fn contains_element(&self, g: &GroupElement) -> bool {
        match self {
            BorelRegion::RationalSet { window } => match g.exact_coords() {
                Some(v) if v.len() == 1 => v[0].is_rational() && in_interval(v[0].to_f64(), *window, false),
                _ => false,
            },
            BorelRegion::Union(parts) => parts.iter().any(|p| p.contains_element(g)),
            _ => self.contains_chart(&g.chart()),
        }
    }

    /// Measure under the domain's reference measure.
    pub fn measure(&self, domain: &SpaceDomain) -> f64 {
        match self {
            BorelRegion::Box { bounds, .. } => bounds.iter().map(|(a, b)| (b - a).max(0.0)).product(),
            BorelRegion::Arc { length, .. } => length.clamp(0.0, 1.0),
            BorelRegion::RationalSet { .. } => 0.0,
            BorelRegion::Union(parts) => parts.iter().map(|p| p.measure(domain)).sum(),
            BorelRegion::Whole => match domain {
                SpaceDomain::Torus(_) | SpaceDomain::Cylinder { .. } => 1.0,
                _ => f64::INFINITY,
            },
        }
    }

    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            BorelRegion::Box { bounds, .. } => Some(bounds.clone()),
            BorelRegion::Arc { start, length } => Some(vec![(*start, start + length)]),
            BorelRegion::RationalSet { window } => Some(vec![*window]),
            BorelRegion::Union(parts) => {
                let boxes: Option<Vec<_>> = parts.iter().map(|p| p.bounding_box()).collect();
                let boxes = boxes?;
                let first = boxes.first()?.clone();
                Some(boxes.iter().skip(1).fold(first, |acc, b| {
                    acc.iter()
                        .zip(b)
                        .map(|(x, y)| (x.0.min(y.0), x.1.max(y.1)))
                        .collect()
                }))
            }
            BorelRegion::Whole => None,
        }
    }

    /// Region moved by `offset` in chart coordinates.
    pub fn translate(&self, offset: &[f64]) -> Self {
        match self {
            BorelRegion::Box { bounds, half_open } => BorelRegion::Box {
                bounds: bounds.iter().zip(offset).map(|(&(a, b), &o)| (a + o, b + o)).collect(),
                half_open: *half_open,
            },
            BorelRegion::Arc { start, length } => BorelRegion::Arc {
                start: (start + offset[0]).rem_euclid(1.0),
                length: *length,
            },
            BorelRegion::RationalSet { window } => BorelRegion::RationalSet {
                window: (window.0 + offset[0], window.1 + offset[0]),
            },
            BorelRegion::Union(parts) => BorelRegion::Union(parts.iter().map(|p| p.translate(offset)).collect()),
            BorelRegion::Whole => BorelRegion::Whole,
        }
    }
}

/// `(X, μ)` with an exhaustion by finite-measure regions and a seeded
/// sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredSpace {
    pub domain: SpaceDomain,
    pub exhaustion: Vec<BorelRegion>,
    /// Sampling follows μ restricted to this box when μ is infinite.
    pub sample_window: Option<Vec<(f64, f64)>>,
    /// Quadrature windows for infinite-measure spaces.
    pub quadrature_window: Option<Vec<(f64, f64)>>,
}

impl MeasuredSpace {
    pub fn torus(d: usize) -> Self {
        Self {
            domain: SpaceDomain::Torus(d),
            exhaustion: vec![BorelRegion::Whole],
            sample_window: None,
            quadrature_window: None,
        }
    }

    /// `ℝ^d` exhausted by `[-k, k]^d`, `k = 1..=radius`.
    pub fn real_line(d: usize, radius: usize) -> Self {
        let exhaustion = (1..=radius)
            .map(|k| BorelRegion::closed(vec![(-(k as f64), k as f64); d]))
            .collect();
        Self {
            domain: SpaceDomain::RealLine(d),
            exhaustion,
            sample_window: Some(vec![(-1.0, 1.0); d]),
            quadrature_window: Some(vec![(-(radius as f64), radius as f64); d]),
        }
    }

    pub fn cylinder(p: f64, len: usize) -> Self {
        Self {
            domain: SpaceDomain::Cylinder { p, len },
            exhaustion: vec![BorelRegion::Whole],
            sample_window: None,
            quadrature_window: None,
        }
    }

    /// The affine group with its right Haar measure; windows are in the
    /// chart `(ln a, b)`.
    pub fn affine_group(window: Vec<(f64, f64)>) -> Self {
        let exhaustion = (1..=4)
            .map(|k| {
                let k = k as f64;
                BorelRegion::closed(vec![(-k, k), (-k, k)])
            })
            .collect();
        Self {
            domain: SpaceDomain::Group(GroupId::Affine),
            exhaustion,
            sample_window: Some(window.clone()),
            quadrature_window: Some(window),
        }
    }

    pub fn with_sample_window(mut self, window: Vec<(f64, f64)>) -> Self {
        self.sample_window = Some(window);
        self
    }

    pub fn with_quadrature_window(mut self, window: Vec<(f64, f64)>) -> Self {
        self.quadrature_window = Some(window);
        self
    }

    pub fn measure(&self, region: &BorelRegion) -> f64 {
        region.measure(&self.domain)
    }

    /// The `index`-th sample point of the stream for `seed`; each index
    /// owns an independent substream.
    pub fn sample(&self, seed: u64, index: u64) -> Point {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        match self.domain {
            SpaceDomain::Torus(d) => Point::Real((0..d).map(|_| rng.random::<f64>()).collect()),
            SpaceDomain::RealLine(d) => {
                let w = self.sample_window.clone().unwrap_or_else(|| vec![(-1.0, 1.0); d]);
                Point::Real(w.iter().map(|&(a, b)| a + (b - a) * rng.random::<f64>()).collect())
            }
            SpaceDomain::Cylinder { p, len } => Point::Bits((0..len).map(|_| u8::from(rng.random_bool(p))).collect()),
            SpaceDomain::Group(_) => {
                let w = self
                    .sample_window
                    .clone()
                    .unwrap_or_else(|| vec![(-1.0, 1.0), (-1.0, 1.0)]);
                let u = w[0].0 + (w[0].1 - w[0].0) * rng.random::<f64>();
                let b = w[1].0 + (w[1].1 - w[1].0) * rng.random::<f64>();
                Point::Element(GroupElement::affine(u.exp(), b).expect("finite sample"))
            }
        }
    }

    pub fn sample_many(&self, seed: u64, n: usize) -> Vec<Point> {
        (0..n as u64).map(|i| self.sample(seed, i)).collect()
    }

    /// Midpoint quadrature of `∫ f dμ`, restricted to `restrict` (a chart
    /// box) when given. Cylinder integrals are exact sums over all `2^len`
    /// patterns.
    pub fn integrate(
        &self,
        cells_per_unit: usize,
        restrict: Option<&[(f64, f64)]>,
        f: &mut dyn FnMut(&Point) -> Result<num_complex::Complex64>,
    ) -> Result<num_complex::Complex64> {
        use num_complex::Complex64;
        let mut acc = Complex64::new(0.0, 0.0);
        match self.domain {
            SpaceDomain::Cylinder { p, len } => {
                if len > 20 {
                    return Err(OrbintError::Unsupported(format!(
                        "exact cylinder integral over {len} coordinates"
                    )));
                }
                for mask in 0u64..(1u64 << len) {
                    let bits: Vec<u8> = (0..len).map(|i| ((mask >> i) & 1) as u8).collect();
                    let ones = bits.iter().filter(|&&b| b == 1).count() as i32;
                    let w = p.powi(ones) * (1.0 - p).powi(len as i32 - ones);
                    acc += f(&Point::Bits(bits))? * w;
                }
                return Ok(acc);
            }
            SpaceDomain::Torus(d) => {
                let grids = vec![Grid1::per_unit(0.0, 1.0, cells_per_unit); d];
                let ranges: Vec<_> = grids.iter().map(|g| 0..g.cells).collect();
                crate::quadrature::visit_tensor(&grids, &ranges, &mut |x, w| {
                    acc += f(&Point::Real(x.to_vec()))? * w;
                    Ok::<(), OrbintError>(())
                })?;
            }
            SpaceDomain::RealLine(_) | SpaceDomain::Group(_) => {
                let window = self.quadrature_window.clone().ok_or_else(|| {
                    OrbintError::InvalidTruncation("space has no quadrature window".into())
                })?;
                let grids: Vec<Grid1> = window
                    .iter()
                    .map(|&(a, b)| Grid1::per_unit(a, b, cells_per_unit))
                    .collect();
                let ranges: Vec<_> = grids
                    .iter()
                    .enumerate()
                    .map(|(i, g)| match restrict {
                        Some(r) => g.touching(r[i].0, r[i].1),
                        None => 0..g.cells,
                    })
                    .collect();
                let group = matches!(self.domain, SpaceDomain::Group(_));
                crate::quadrature::visit_tensor(&grids, &ranges, &mut |x, w| {
                    let p = if group {
                        Point::Element(GroupElement::affine(x[0].exp(), x[1])?)
                    } else {
                        Point::Real(x.to_vec())
                    };
                    acc += f(&p)? * w;
                    Ok::<(), OrbintError>(())
                })?;
            }
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(OrbintError::QuadratureFailure(format!("non-finite integral {acc}")));
        }
        Ok(acc)
    }
}
