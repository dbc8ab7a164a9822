//! Conditional expectations onto orbit σ-fields of compact levels.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::Point;
use crate::averaging::Integrand;
use crate::error::{OrbintError, Result};
use crate::groups::Permutation;

/// Largest `n` for which general (nonlinear) cylinder integrands are
/// conditioned by averaging over all `n!` rearrangements.
const MAX_REARRANGEMENT: usize = 8;

/// Orbits of one level acting on a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrbitPartition {
    /// `ℤ/2ⁿℤ` orbits on the torus arc `[a, b)`; `grid_log2` fixes the
    /// discretization `2^{-R}(ℤ + 1/2)` used when listing blocks.
    TorusDyadic {
        level_log2: u32,
        region: (f64, f64),
        grid_log2: u32,
    },
    /// `S_n` orbits on the Bernoulli cylinder: classes of points with the
    /// same multiset of the first `n` coordinates.
    Exchangeable { n: usize },
}

/// One orbit with its μ-weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl OrbitPartition {
    pub fn torus(level_log2: u32) -> Self {
        OrbitPartition::TorusDyadic {
            level_log2,
            region: (0.0, 1.0),
            grid_log2: level_log2 + 4,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (OrbitPartition::TorusDyadic { region, .. }, Point::Real(v)) => {
                v.len() == 1 && region.0 <= v[0] && v[0] < region.1
            }
            (OrbitPartition::Exchangeable { n }, Point::Bits(b)) => b.len() >= *n,
            _ => false,
        }
    }

    /// Points of the orbit of `x` inside the region.
    fn torus_orbit(level_log2: u32, region: (f64, f64), x: f64) -> Vec<f64> {
        let n = 1u64 << level_log2;
        let step = 1.0 / n as f64;
        (0..n)
            .map(|j| {
                let y = x + j as f64 * step;
                y - y.floor()
            })
            .filter(|&y| region.0 <= y && y < region.1)
            .collect()
    }

    /// The blocks of the discretized region. Cylinder blocks list all `2ⁿ`
    /// patterns of the first `n` coordinates and need `n ≤ 16`.
    pub fn blocks(&self, p: f64) -> Result<Vec<Block>> {
        match *self {
            OrbitPartition::TorusDyadic {
                level_log2,
                region,
                grid_log2,
            } => {
                if grid_log2 < level_log2 {
                    return Err(OrbintError::DomainError("grid coarser than the level".into()));
                }
                let cells = 1u64 << grid_log2;
                let period = 1u64 << (grid_log2 - level_log2);
                let h = 1.0 / cells as f64;
                let mut blocks: Vec<Block> = (0..period)
                    .map(|_| Block {
                        points: Vec::new(),
                        weights: Vec::new(),
                    })
                    .collect();
                for i in 0..cells {
                    let x = (i as f64 + 0.5) * h;
                    if region.0 <= x && x < region.1 {
                        let b = &mut blocks[(i % period) as usize];
                        b.points.push(Point::real1(x));
                        b.weights.push(h);
                    }
                }
                Ok(blocks.into_iter().filter(|b| !b.points.is_empty()).collect())
            }
            OrbitPartition::Exchangeable { n } => {
                if n > 16 {
                    return Err(OrbintError::Unsupported(format!("listing 2^{n} cylinder patterns")));
                }
                let mut blocks: Vec<Block> = (0..=n)
                    .map(|_| Block {
                        points: Vec::new(),
                        weights: Vec::new(),
                    })
                    .collect();
                for mask in 0u64..(1u64 << n) {
                    let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                    let k = mask.count_ones() as usize;
                    blocks[k].weights.push(p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
                    blocks[k].points.push(Point::Bits(bits));
                }
                Ok(blocks)
            }
        }
    }
}

/// Linear functional `c + Σ aᵢ xᵢ` extracted from an integrand built from
/// constants and coordinates.
fn linear_form(f: &Integrand) -> Option<(f64, Vec<f64>)> {
    match f {
        Integrand::Constant(c) if c.im == 0.0 => Some((c.re, Vec::new())),
        Integrand::Coordinate(i) => {
            let mut v = vec![0.0; i + 1];
            v[*i] = 1.0;
            Some((0.0, v))
        }
        Integrand::Linear { constant, coeffs } => Some((*constant, coeffs.clone())),
        Integrand::Scaled(c, g) if c.im == 0.0 => {
            let (k, v) = linear_form(g)?;
            Some((c.re * k, v.into_iter().map(|a| a * c.re).collect()))
        }
        Integrand::Sum(parts) => {
            let mut k = 0.0;
            let mut v: Vec<f64> = Vec::new();
            for part in parts {
                let (pk, pv) = linear_form(part)?;
                k += pk;
                if pv.len() > v.len() {
                    v.resize(pv.len(), 0.0);
                }
                v.iter_mut().zip(&pv).for_each(|(a, b)| *a += b);
            }
            Some((k, v))
        }
        _ => None,
    }
}

/// `E(f | ℐₙ)` as an integrand.
pub fn conditional_integrand(partition: &OrbitPartition, f: &Integrand) -> Result<Integrand> {
    match partition {
        OrbitPartition::Exchangeable { n } => {
            let n = *n;
            if let Some((constant, mut coeffs)) = linear_form(f) {
                if coeffs.len() < n {
                    coeffs.resize(n, 0.0);
                }
                let mean = coeffs[..n].iter().sum::<f64>() / n as f64;
                coeffs[..n].iter_mut().for_each(|a| *a = mean);
                return Ok(Integrand::Linear { constant, coeffs });
            }
            if n > MAX_REARRANGEMENT {
                return Err(OrbintError::Unsupported(format!(
                    "conditioning a nonlinear integrand on S_{n} orbits"
                )));
            }
            let perms: Arc<Vec<Permutation>> = Arc::new(Permutation::all(n));
            let g = f.clone();
            let part = partition.clone();
            Ok(Integrand::closure("exchangeable conditional", None, None, move |x| {
                let Point::Bits(bits) = x else {
                    return Err(OrbintError::PointNotInRegion);
                };
                if !part.contains(x) {
                    return Err(OrbintError::PointNotInRegion);
                }
                let mut acc = Complex64::new(0.0, 0.0);
                let mut y = bits.clone();
                for p in perms.iter() {
                    for i in 0..n {
                        y[p.apply(i)] = bits[i];
                    }
                    acc += g.eval(&Point::Bits(y.clone()))?;
                }
                Ok(acc / perms.len() as f64)
            }))
        }
        OrbitPartition::TorusDyadic { level_log2, region, .. } => {
            let (level_log2, region) = (*level_log2, *region);
            let g = f.clone();
            Ok(Integrand::closure("orbit conditional", Some(vec![region]), None, move |x| {
                let Point::Real(v) = x else {
                    return Err(OrbintError::PointNotInRegion);
                };
                if v.len() != 1 || !(region.0 <= v[0] && v[0] < region.1) {
                    return Err(OrbintError::PointNotInRegion);
                }
                let orbit = OrbitPartition::torus_orbit(level_log2, region, v[0]);
                let mut acc = Complex64::new(0.0, 0.0);
                for y in &orbit {
                    acc += g.eval(&Point::real1(*y))?;
                }
                Ok(acc / orbit.len() as f64)
            }))
        }
    }
}

/// μ-weighted average of `f` over the orbit block containing `x`.
pub fn orbit_conditional_expectation(partition: &OrbitPartition, f: &Integrand, x: &Point) -> Result<Complex64> {
    if !partition.contains(x) {
        return Err(OrbintError::PointNotInRegion);
    }
    conditional_integrand(partition, f)?.eval(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    /// `max |E_{n+1}(Eₙ f) - E_{n+1} f|` over consecutive levels and samples.
    pub tower_residual: f64,
    /// `|E_N f(x) - limit|` at the last level, per sample point.
    pub final_deviations: Vec<f64>,
    pub median_final_deviation: f64,
    pub fraction_within_band: f64,
    pub pass: bool,
}

/// Criteria for a reversed-martingale check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleTolerance {
    pub tower: f64,
    /// Allowed `|E_N f(x) - limit|`.
    pub band: f64,
    /// Required fraction of samples inside the band.
    pub min_fraction: f64,
}

/// Checks the tower property along consecutive partitions (each coarser
/// than the previous) and the approach of the last conditional expectation
/// to `limit`.
pub fn reversed_martingale_check(
    partitions: &[OrbitPartition],
    f: &Integrand,
    x_sample: &[Point],
    limit: Complex64,
    tol: MartingaleTolerance,
) -> Result<MartingaleReport> {
    let last = partitions
        .last()
        .ok_or_else(|| OrbintError::DomainError("empty level range".into()))?;
    let conditioned: Vec<Integrand> = partitions
        .iter()
        .map(|p| conditional_integrand(p, f))
        .collect::<Result<_>>()?;
    let mut tower_residual: f64 = 0.0;
    for k in 0..partitions.len().saturating_sub(1) {
        let nested = conditional_integrand(&partitions[k + 1], &conditioned[k])?;
        for x in x_sample {
            let r = (nested.eval(x)? - conditioned[k + 1].eval(x)?).norm();
            tower_residual = tower_residual.max(r);
        }
    }
    let top = conditional_integrand(last, f)?;
    let final_deviations: Vec<f64> = x_sample
        .iter()
        .map(|x| Ok((top.eval(x)? - limit).norm()))
        .collect::<Result<_>>()?;
    let within = final_deviations.iter().filter(|&&d| d <= tol.band).count();
    let fraction_within_band = within as f64 / final_deviations.len().max(1) as f64;
    let mut sorted = final_deviations.clone();
    sorted.sort_by(f64::total_cmp);
    let median_final_deviation = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    Ok(MartingaleReport {
        pass: tower_residual <= tol.tower && fraction_within_band >= tol.min_fraction,
        tower_residual,
        final_deviations,
        median_final_deviation,
        fraction_within_band,
    })
}
