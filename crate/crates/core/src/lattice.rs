//! Periodic uniform lattices in one or two dimensions.
//!
//! A [`Grid`] covers `[-L, L)` on every axis with `n` nodes per axis. All
//! spectral work goes through [`Transform`], which owns the scratch memory
//! for the (row-major, square) multi-dimensional FFT. Integrals use the
//! rectangle rule `sum(f) * dx^dim`, which is spectrally accurate for smooth
//! decaying periodic data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const MIN_POINTS: usize = 8;

struct GridInner {
    dim: usize,
    half_width: f64,
    n: usize,
    dx: f64,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
    k_squared: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Immutable periodic lattice. Cloning is cheap (shared handle).
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.inner.dim)
            .field("half_width", &self.inner.half_width)
            .field("n", &self.inner.n)
            .field("dx", &self.inner.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim
                && self.inner.n == other.inner.n
                && self.inner.half_width == other.inner.half_width)
    }
}

/// Build a grid on `[-half_width, half_width)^dim` with `n` points per axis.
pub fn make_grid(dim: usize, half_width: f64, n: usize) -> Result<Grid> {
    Grid::new(dim, half_width, n)
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidResolution(n));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidHalfWidth(half_width));
        }
        let dx = 2.0 * half_width / n as f64;
        let coords = (0..n).map(|i| -half_width + i as f64 * dx).collect();
        let dk = PI / half_width;
        let wavenumbers: Vec<f64> = (0..n).map(|i| dk * signed_mode(i, n) as f64).collect();
        let k_squared = match dim {
            1 => wavenumbers.iter().map(|k| k * k).collect(),
            _ => {
                let mut out = Vec::with_capacity(n * n);
                for ki in &wavenumbers {
                    for kj in &wavenumbers {
                        out.push(ki * ki + kj * kj);
                    }
                }
                out
            }
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                half_width,
                n,
                dx,
                coords,
                wavenumbers,
                k_squared,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn half_width(&self) -> f64 {
        self.inner.half_width
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.inner.n
    }

    pub fn spacing(&self) -> f64 {
        self.inner.dx
    }

    /// Total number of nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinates along one axis: `x_i = -L + i dx`.
    pub fn axis_coords(&self) -> &[f64] {
        &self.inner.coords
    }

    /// Wavenumbers along one axis in FFT order: `(pi/L) m`, `m` in `[-n/2, n/2)`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// `|k|^2` for every flattened mode.
    pub fn k_squared(&self) -> &[f64] {
        &self.inner.k_squared
    }

    /// Volume element `dx^dim` of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        self.inner.dx.powi(self.inner.dim as i32)
    }

    /// Weight turning `sum |F|^2` of the unnormalised DFT into the continuous
    /// `L^2` norm: `dx^dim / n^dim`.
    pub fn spectral_weight(&self) -> f64 {
        self.cell_volume() / self.len() as f64
    }

    /// Position of flattened node `index` (row-major, axis 0 slowest).
    pub fn position(&self, index: usize) -> [f64; 2] {
        let n = self.inner.n;
        match self.inner.dim {
            1 => [self.inner.coords[index], 0.0],
            _ => [self.inner.coords[index / n], self.inner.coords[index % n]],
        }
    }

    /// `|x|^2` of flattened node `index`, measured from the domain centre.
    pub fn radius_squared(&self, index: usize) -> f64 {
        let [a, b] = self.position(index);
        a * a + b * b
    }

    /// Signed mode numbers of a flattened spectral index.
    pub fn modes(&self, index: usize) -> [i64; 2] {
        let n = self.inner.n;
        match self.inner.dim {
            1 => [signed_mode(index, n), 0],
            _ => [signed_mode(index / n, n), signed_mode(index % n, n)],
        }
    }

    /// Rectangle-rule integral of nodal values.
    pub fn integrate<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        values.into_iter().sum::<f64>() * self.cell_volume()
    }

    /// Sample a function of position on every node.
    pub fn sample<F: FnMut([f64; 2]) -> Complex64>(&self, mut f: F) -> Vec<Complex64> {
        (0..self.len()).map(|i| f(self.position(i))).collect()
    }

    fn same_layout(&self, other: &Grid) -> bool {
        self == other
    }
}

fn signed_mode(index: usize, n: usize) -> i64 {
    if index < n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

/// Scratch-owning FFT driver for one grid.
pub struct Transform {
    grid: Grid,
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Transform {
    pub fn new(grid: &Grid) -> Self {
        let scratch_len = grid
            .inner
            .forward
            .get_inplace_scratch_len()
            .max(grid.inner.inverse.get_inplace_scratch_len());
        let transposed = if grid.dim() == 2 {
            vec![Complex64::new(0.0, 0.0); grid.len()]
        } else {
            Vec::new()
        };
        Self {
            grid: grid.clone(),
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            transposed,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// In-place unnormalised forward DFT over every axis.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let plan = Arc::clone(&self.grid.inner.forward);
        self.apply(plan.as_ref(), data);
    }

    /// In-place inverse DFT including the `1/n^dim` normalisation.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let plan = Arc::clone(&self.grid.inner.inverse);
        self.apply(plan.as_ref(), data);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn apply(&mut self, plan: &dyn Fft<f64>, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.grid.len());
        plan.process_with_scratch(data, &mut self.scratch);
        if self.grid.dim() == 2 {
            let n = self.grid.points();
            transpose(data, &mut self.transposed, n);
            plan.process_with_scratch(&mut self.transposed, &mut self.scratch);
            transpose(&self.transposed, data, n);
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Complex amplitude on a grid, stamped with physical time.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    time: f64,
}

impl PartialEq for ComplexField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.time == other.time && self.values == other.values
    }
}

impl ComplexField {
    /// Checked constructor: value count must match the grid and every
    /// amplitude must be finite.
    pub fn new(grid: &Grid, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if !time.is_finite() {
            return Err(Error::InvalidParameter(format!("field time {time}")));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            time,
        })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>, time: f64) -> Self {
        Self { grid, values, time }
    }

    pub fn zeros(grid: &Grid, time: f64) -> Self {
        Self::from_parts(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.len()], time)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Pointwise complex conjugate; time stamp unchanged.
    pub fn conj(&self) -> Self {
        let values = self.values.iter().map(|v| v.conj()).collect();
        Self::from_parts(self.grid.clone(), values, self.time)
    }

    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self::new(&self.grid, values, self.time)
    }

    /// `max |u|` over the nodes.
    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rectangle-rule `||u||_2^2`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|v| v.norm_sqr()))
    }

    /// Rectangle-rule `||u - v||_2^2`; both fields must share a grid.
    pub fn distance_sq(&self, other: &ComplexField) -> Result<f64> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::InvalidParameter("fields live on different grids".into()));
        }
        Ok(self.grid.integrate(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm_sqr()),
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Unnormalised DFT of the values.
    pub fn to_spectral(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        Transform::new(&self.grid).forward(&mut buf);
        buf
    }

    /// Inverse of [`ComplexField::to_spectral`].
    pub fn from_spectral(grid: &Grid, mut spectrum: Vec<Complex64>, time: f64) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: spectrum.len(),
            });
        }
        Transform::new(grid).inverse(&mut spectrum);
        Self::new(grid, spectrum, time)
    }
}

/// Multiply `spectrum` by `i k_axis`, dropping the unpaired `-n/2` mode so
/// that real fields keep real derivatives.
pub(crate) fn apply_derivative(grid: &Grid, spectrum: &mut [Complex64], axis: usize) {
    let n = grid.points();
    let ks = grid.wavenumbers();
    let nyquist = n / 2;
    for (idx, v) in spectrum.iter_mut().enumerate() {
        let along = match (grid.dim(), axis) {
            (1, _) => idx,
            (_, 0) => idx / n,
            _ => idx % n,
        };
        if along == nyquist {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, ks[along]);
        }
    }
}

/// Spectral gradient: one field per axis, computed as `i k` in frequency space.
pub fn spectral_gradient(field: &ComplexField) -> Vec<ComplexField> {
    let grid = field.grid();
    let mut transform = Transform::new(grid);
    let mut spectrum = field.values().to_vec();
    transform.forward(&mut spectrum);
    (0..grid.dim())
        .map(|axis| {
            let mut buf = spectrum.clone();
            apply_derivative(grid, &mut buf, axis);
            transform.inverse(&mut buf);
            ComplexField::from_parts(grid.clone(), buf, field.time())
        })
        .collect()
}
