//! Composite midpoint rules on uniform grids.

use std::ops::Range;

/// Uniform cell grid on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1 {
    pub lo: f64,
    pub h: f64,
    pub cells: usize,
}

impl Grid1 {
    pub fn with_cells(lo: f64, hi: f64, cells: usize) -> Self {
        let cells = cells.max(1);
        Self {
            lo,
            h: (hi - lo) / cells as f64,
            cells,
        }
    }

    /// `ceil(width · cells_per_unit)` cells.
    pub fn per_unit(lo: f64, hi: f64, cells_per_unit: usize) -> Self {
        let cells = ((hi - lo) * cells_per_unit as f64).ceil().max(1.0) as usize;
        Self::with_cells(lo, hi, cells)
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.h * self.cells as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.h
    }

    /// Cells meeting `[a, b]`; infinite ends select the whole grid.
    pub fn touching(&self, a: f64, b: f64) -> Range<usize> {
        let first = if a.is_finite() {
            ((a - self.lo) / self.h).floor().max(0.0) as usize
        } else {
            0
        };
        let last = if b.is_finite() {
            ((b - self.lo) / self.h).ceil().max(0.0) as usize
        } else {
            self.cells
        };
        first.min(self.cells)..last.min(self.cells)
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        (0..self.cells).map(|i| f(self.midpoint(i))).sum::<f64>() * self.h
    }
}

/// Visits the midpoints of the tensor grid restricted to `ranges`, each with
/// the cell volume as weight.
pub fn visit_tensor<E>(
    grids: &[Grid1],
    ranges: &[Range<usize>],
    visit: &mut dyn FnMut(&[f64], f64) -> Result<(), E>,
) -> Result<(), E> {
    if ranges.iter().any(|r| r.is_empty()) {
        return Ok(());
    }
    let weight: f64 = grids.iter().map(|g| g.h).product();
    let mut index: Vec<usize> = ranges.iter().map(|r| r.start).collect();
    let mut point: Vec<f64> = index.iter().zip(grids).map(|(&i, g)| g.midpoint(i)).collect();
    loop {
        visit(&point, weight)?;
        let mut axis = grids.len();
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            if index[axis] + 1 < ranges[axis].end {
                index[axis] += 1;
                point[axis] = grids[axis].midpoint(index[axis]);
                break;
            }
            index[axis] = ranges[axis].start;
            point[axis] = grids[axis].midpoint(index[axis]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_is_exact_for_linear() {
        let g = Grid1::with_cells(0.0, 1.0, 7);
        assert!((g.integrate(|x| 3.0 * x + 1.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn midpoint_error_is_second_order() {
        let exact = 1.0 / 3.0;
        let e1 = (Grid1::with_cells(0.0, 1.0, 64).integrate(|x| x * x) - exact).abs();
        let e2 = (Grid1::with_cells(0.0, 1.0, 128).integrate(|x| x * x) - exact).abs();
        assert!((e1 / e2 - 4.0).abs() < 1e-6);
    }

    #[test]
    fn touching_clamps() {
        let g = Grid1::with_cells(0.0, 1.0, 10);
        assert_eq!(g.touching(0.25, 0.55), 2..6);
        assert_eq!(g.touching(-5.0, 0.05), 0..1);
        assert_eq!(g.touching(f64::NEG_INFINITY, f64::INFINITY), 0..10);
    }
}
