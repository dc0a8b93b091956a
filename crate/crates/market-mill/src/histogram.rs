use crate::error::{MillError, Result};
use crate::series::PairSet;

/// Reflection used to split a joint density into symmetric and antisymmetric
/// parts. X0 and Y0 flip one coordinate's sign; Diag swaps coordinates;
/// AntiDiag swaps and flips both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymmetryAxis {
    X0,
    Y0,
    Diag,
    AntiDiag,
}

impl AsymmetryAxis {
    pub const ALL: [AsymmetryAxis; 4] =
        [AsymmetryAxis::X0, AsymmetryAxis::Y0, AsymmetryAxis::Diag, AsymmetryAxis::AntiDiag];

    pub fn name(&self) -> &'static str {
        match self {
            AsymmetryAxis::X0 => "x0",
            AsymmetryAxis::Y0 => "y0",
            AsymmetryAxis::Diag => "diag",
            AsymmetryAxis::AntiDiag => "antidiag",
        }
    }
}

/// Square 2d histogram of (push, response) pairs over the closed square
/// [-extent, extent]^2, with edges symmetric about zero. Pairs outside the
/// square are counted in n_total but not binned.
#[derive(Debug, Clone)]
pub struct BivariateHistogram {
    bin_width: f64,
    extent: f64,
    n_axis: usize,
    counts: Vec<u64>,
    n_total: u64,
    n_in: u64,
}

impl BivariateHistogram {
    /// Empty histogram. bin_width must divide 2 * extent to within 1e-9 so
    /// the grid closes under every reflection.
    pub fn new(bin_width: f64, extent: f64) -> Result<Self> {
        if !(bin_width.is_finite() && bin_width > 0.0 && extent.is_finite() && extent > 0.0) {
            return Err(MillError::InvalidConfig(format!(
                "histogram needs positive finite bin_width and extent, got {bin_width} and {extent}"
            )));
        }
        let ratio = 2.0 * extent / bin_width;
        let n_axis = ratio.round();
        if n_axis < 1.0 || (ratio - n_axis).abs() > 1e-9 {
            return Err(MillError::GridNotReflectionClosed(format!(
                "bin_width {bin_width} does not divide the span {} evenly",
                2.0 * extent
            )));
        }
        let n_axis = n_axis as usize;
        Ok(Self {
            bin_width,
            extent,
            n_axis,
            counts: vec![0; n_axis * n_axis],
            n_total: 0,
            n_in: 0,
        })
    }

    pub fn from_pairs(pairs: &PairSet, bin_width: f64, extent: f64) -> Result<Self> {
        let mut h = Self::new(bin_width, extent)?;
        h.accumulate(pairs);
        Ok(h)
    }

    /// Adds pairs; callable repeatedly to pool several series.
    pub fn accumulate(&mut self, pairs: &PairSet) {
        for &(x, y) in pairs.pairs() {
            self.n_total += 1;
            if let (Some(ix), Some(iy)) = (self.axis_bin(x), self.axis_bin(y)) {
                self.counts[iy * self.n_axis + ix] += 1;
                self.n_in += 1;
            }
        }
    }

    /// Adds another histogram's counts. Grids must match exactly.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.bin_width != other.bin_width || self.extent != other.extent {
            return Err(MillError::GridNotReflectionClosed(format!(
                "cannot merge grids ({}, {}) and ({}, {})",
                self.bin_width, self.extent, other.bin_width, other.extent
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_total += other.n_total;
        self.n_in += other.n_in;
        Ok(())
    }

    /// Bin index along one axis; None outside the closed square. The top
    /// edge +extent belongs to the last bin.
    pub fn axis_bin(&self, v: f64) -> Option<usize> {
        if !(-self.extent..=self.extent).contains(&v) {
            return None;
        }
        let i = ((v + self.extent) / self.bin_width) as usize;
        Some(i.min(self.n_axis - 1))
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn n_axis(&self) -> usize {
        self.n_axis
    }

    /// Pairs offered, including those off the square.
    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    /// Pairs binned.
    pub fn n_in(&self) -> u64 {
        self.n_in
    }

    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.n_axis + ix]
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width - self.extent
    }

    /// Empirical density in 1/dollar^2, normalized over the square.
    pub fn density(&self, ix: usize, iy: usize) -> f64 {
        if self.n_in == 0 {
            return 0.0;
        }
        self.count(ix, iy) as f64 / (self.n_in as f64 * self.bin_width * self.bin_width)
    }
}

/// Antisymmetric part of a histogram under one reflection, and its positive
/// half. On reflection-closed grids the antisymmetric part of the mill
/// density concentrates in the even sectors.
#[derive(Debug, Clone)]
pub struct AsymmetryPattern {
    axis: AsymmetryAxis,
    bin_width: f64,
    extent: f64,
    n_axis: usize,
    p_asym: Vec<f64>,
    p_mill: Vec<f64>,
}

impl AsymmetryPattern {
    pub fn axis(&self) -> AsymmetryAxis {
        self.axis
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn n_axis(&self) -> usize {
        self.n_axis
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width - self.extent
    }

    /// Antisymmetric density component; antisymmetric bin for bin.
    pub fn asym(&self, ix: usize, iy: usize) -> f64 {
        self.p_asym[iy * self.n_axis + ix]
    }

    /// Positive part of the antisymmetric component.
    pub fn mill_component(&self, ix: usize, iy: usize) -> f64 {
        self.p_mill[iy * self.n_axis + ix]
    }
}

fn reflect(axis: AsymmetryAxis, ix: usize, iy: usize, n: usize) -> (usize, usize) {
    match axis {
        AsymmetryAxis::X0 => (n - 1 - ix, iy),
        AsymmetryAxis::Y0 => (ix, n - 1 - iy),
        AsymmetryAxis::Diag => (iy, ix),
        AsymmetryAxis::AntiDiag => (n - 1 - iy, n - 1 - ix),
    }
}

/// Splits off the antisymmetric density component under the given axis:
/// p_asym(b) = (density(b) - density(reflected b)) / 2, and its positive
/// part. Histograms built here are always square with zero-symmetric edges,
/// which every axis requires; the check stays as a guard.
pub fn asymmetric_component(
    h: &BivariateHistogram,
    axis: AsymmetryAxis,
) -> Result<AsymmetryPattern> {
    let n = h.n_axis();
    if h.counts.len() != n * n {
        return Err(MillError::GridNotReflectionClosed(format!(
            "grid is not square under {:?}",
            axis
        )));
    }
    let mut p_asym = vec![0.0; n * n];
    let mut p_mill = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            let (rx, ry) = reflect(axis, ix, iy, n);
            let a = 0.5 * (h.density(ix, iy) - h.density(rx, ry));
            p_asym[iy * n + ix] = a;
            p_mill[iy * n + ix] = a.max(0.0);
        }
    }
    Ok(AsymmetryPattern {
        axis,
        bin_width: h.bin_width(),
        extent: h.extent(),
        n_axis: n,
        p_asym,
        p_mill,
    })
}
