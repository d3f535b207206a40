//! Periodic sampling box, real grid functions and their Fourier coefficients.
//!
//! Convention: `coeff(k) = h^n sum_j exp(-i xi_k . x_j) f(x_j)` with
//! `x_j = -L + j h`, `h = 2L/N` and `xi_k = (pi/L) k`, so a mass-one function
//! has `coeff(0) = 1` and continuum Fourier symbols apply unchanged.
//! Coefficients are stored in FFT order (`k = 0, 1, .., N/2-1, -N/2, .., -1`
//! along every axis), row-major.

pub mod fhwg;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, FhwError, Result};

/// Cubic periodic box `[-L, L)^n` with power-of-two sample counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    sizes: Vec<usize>,
    half_length: f64,
}

impl BoxGrid {
    pub fn new(sizes: Vec<usize>, half_length: f64) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return domain(format!("dimension must be 1, 2 or 3, got {}", sizes.len()));
        }
        for &s in &sizes {
            if s < 8 || !s.is_power_of_two() {
                return domain(format!("axis sizes must be powers of two >= 8, got {s}"));
            }
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return domain(format!("half length must be positive, got {half_length}"));
        }
        Ok(Self { sizes, half_length })
    }

    /// Box with the same sample count along each of `n` axes.
    pub fn cube(n: usize, size: usize, half_length: f64) -> Result<Self> {
        Self::new(vec![size; n], half_length)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_length / self.sizes[axis] as f64
    }

    /// Smallest spacing over the axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Volume `(2L)^n` of the box.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dim() as i32)
    }

    /// Sample coordinates along one axis.
    pub fn coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        (0..self.sizes[axis])
            .map(|j| -self.half_length + j as f64 * h)
            .collect()
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.sizes[a + 1];
        }
        strides
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.sizes[a];
            flat /= self.sizes[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate().take(self.dim()) {
            flat = flat * self.sizes[a] + i;
        }
        flat
    }

    /// Physical coordinates of a flat position.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = -self.half_length + idx[a] as f64 * self.spacing(a);
        }
        x
    }

    /// Signed wavenumber of an FFT-order index.
    pub fn signed_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.sizes[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT-order index of a signed wavenumber.
    pub fn unsigned_index(&self, axis: usize, k: i64) -> usize {
        let n = self.sizes[axis] as i64;
        k.rem_euclid(n) as usize
    }

    /// Angular frequency `(pi/L) k` of an FFT-order index.
    pub fn frequency(&self, axis: usize, i: usize) -> f64 {
        std::f64::consts::PI / self.half_length * self.signed_index(axis, i) as f64
    }

    /// Frequency vector of a flat spectral position.
    pub fn xi(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.dim() {
            xi[a] = self.frequency(a, idx[a]);
        }
        xi
    }

    /// `|xi|^2` for every spectral position.
    pub fn xi_sq(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| self.xi(f).iter().map(|v| v * v).sum())
            .collect()
    }

    /// Flat position of the mode `-k`.
    pub fn negated(&self, flat: usize) -> usize {
        let idx = self.unravel(flat);
        let mut neg = [0; 3];
        for a in 0..self.dim() {
            neg[a] = (self.sizes[a] - idx[a]) % self.sizes[a];
        }
        self.ravel(&neg[..self.dim()])
    }

    /// Largest `|xi|` that is resolved along every axis, `pi N_min / (2L)`.
    pub fn nyquist(&self) -> f64 {
        let nmin = *self.sizes.iter().min().unwrap() as f64;
        std::f64::consts::PI * nmin / (2.0 * self.half_length)
    }
}

/// Real samples on a `BoxGrid`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: BoxGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: BoxGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FhwError::Precondition(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FhwError::Precondition(format!("non-finite sample at position {i}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: BoxGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn zeros(grid: BoxGrid) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Samples `f` at every grid point; `f` receives the first `n` coordinates.
    pub fn from_fn(grid: BoxGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                f(&x[..n])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Riemann-sum `L^p` norm `(h^n sum |f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (self.grid.cell_volume() * s).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    /// Average over the box.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Discrete pairing `h^n sum f g`.
    pub fn pairing(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(self.grid.cell_volume() * s)
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(FhwError::Precondition("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|v| c * v).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self::from_raw(self.grid.clone(), values))
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(-1.0, other)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Sup-norm distance.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Complex Fourier coefficients in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: BoxGrid,
    coeffs: Vec<Complex64>,
    modulo_polynomials: bool,
}

impl SpectralField {
    pub fn new(grid: BoxGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(FhwError::Precondition(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid,
            coeffs,
            modulo_polynomials: false,
        })
    }

    pub fn zeros(grid: BoxGrid) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            coeffs,
            modulo_polynomials: false,
        }
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Set when a negative-order operator discarded the zero mode.
    pub fn modulo_polynomials(&self) -> bool {
        self.modulo_polynomials
    }

    /// Coefficient at signed wavenumber `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let idx: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(a, &ka)| self.grid.unsigned_index(a, ka))
            .collect();
        self.coeffs[self.grid.ravel(&idx)]
    }

    pub fn set_coeff(&mut self, k: &[i64], v: Complex64) {
        let idx: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(a, &ka)| self.grid.unsigned_index(a, ka))
            .collect();
        let flat = self.grid.ravel(&idx);
        self.coeffs[flat] = v;
    }

    /// `sum |coeff|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|coeff(-k) - conj(coeff(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|f| (self.coeffs[self.grid.negated(f)] - self.coeffs[f].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(FhwError::Precondition("spectral fields live on different grids".into()));
        }
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += b);
        out.modulo_polynomials |= other.modulo_polynomials;
        Ok(out)
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if forward {
        p.plan_fft_forward(len)
    } else {
        p.plan_fft_inverse(len)
    }
}

/// Unnormalized in-place DFT along every axis.
fn fft_nd(grid: &BoxGrid, data: &mut [Complex64], forward: bool) {
    let strides = grid.strides();
    for axis in 0..grid.dim() {
        let len = grid.sizes()[axis];
        let stride = strides[axis];
        let fft = plan(len, forward);
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let block = len * stride;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// `(-1)^{sum of indices}`, the phase of the shift `x_0 = -L`.
fn checkerboard(grid: &BoxGrid, flat: usize) -> f64 {
    let idx = grid.unravel(flat);
    let s: usize = idx[..grid.dim()].iter().sum();
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled DFT approximating the continuum Fourier transform.
pub fn forward(f: &GridFunction) -> SpectralField {
    let grid = f.grid().clone();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&grid, &mut data, true);
    let hn = grid.cell_volume();
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= hn * checkerboard(&grid, flat);
    }
    // The DFT of real data is Hermitian only up to rounding. Averaging each
    // (k, -k) pair makes it exact, so even real multipliers keep it exact and
    // blocks holding nothing but rounding noise still invert.
    for flat in 0..data.len() {
        let neg = grid.negated(flat);
        if neg > flat {
            let avg = 0.5 * (data[flat] + data[neg].conj());
            data[flat] = avg;
            data[neg] = avg.conj();
        } else if neg == flat {
            data[flat].im = 0.0;
        }
    }
    SpectralField {
        grid,
        coeffs: data,
        modulo_polynomials: false,
    }
}

/// Inverse transform together with the discarded imaginary residue
/// (largest `|Im|` of the complex samples).
pub fn inverse_with_residue(field: &SpectralField) -> Result<(GridFunction, f64)> {
    let grid = field.grid().clone();
    let scale = field.max_abs();
    let defect = field.hermitian_defect();
    if defect > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(FhwError::Consistency(format!(
            "Hermitian symmetry violated by {defect:e} (max coefficient {scale:e})"
        )));
    }
    let mut data = field.coeffs().to_vec();
    for (flat, c) in data.iter_mut().enumerate() {
        *c *= checkerboard(&grid, flat);
    }
    fft_nd(&grid, &mut data, false);
    let norm = 1.0 / grid.box_volume();
    let mut residue = 0.0f64;
    let values = data
        .iter()
        .map(|c| {
            residue = residue.max((c.im * norm).abs());
            c.re * norm
        })
        .collect();
    Ok((GridFunction::from_raw(grid, values), residue))
}

/// Inverse of [`forward`]; fails if the coefficients are not Hermitian.
pub fn inverse(field: &SpectralField) -> Result<GridFunction> {
    Ok(inverse_with_residue(field)?.0)
}

/// Multiplies every coefficient by `m(xi)`, `xi` given as its first `n` components.
pub fn apply_multiplier(field: &SpectralField, m: impl Fn(&[f64]) -> f64) -> Result<SpectralField> {
    let grid = field.grid();
    let n = grid.dim();
    let mut out = field.clone();
    for (flat, c) in out.coeffs.iter_mut().enumerate() {
        let xi = grid.xi(flat);
        let v = m(&xi[..n]);
        if !v.is_finite() {
            return Err(FhwError::Propagation {
                xi: xi[..n].to_vec(),
                value: v,
            });
        }
        *c *= v;
    }
    Ok(out)
}

/// Radial multiplier `m(|xi|^2)`, evaluated once per distinct `|xi|^2`.
pub fn apply_radial(field: &SpectralField, m: impl Fn(f64) -> f64) -> Result<SpectralField> {
    let table = radial_table(field.grid(), m)?;
    let mut out = field.clone();
    out.coeffs.iter_mut().zip(&table).for_each(|(c, v)| *c *= v);
    Ok(out)
}

/// Values of a radial symbol on the lattice, in FFT order.
pub fn radial_table(grid: &BoxGrid, m: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let xi_sq = grid.xi_sq();
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut table = Vec::with_capacity(xi_sq.len());
    for (flat, &q) in xi_sq.iter().enumerate() {
        let v = *cache.entry(q.to_bits()).or_insert_with(|| m(q));
        if !v.is_finite() {
            let n = grid.dim();
            return Err(FhwError::Propagation {
                xi: grid.xi(flat)[..n].to_vec(),
                value: v,
            });
        }
        table.push(v);
    }
    Ok(table)
}

/// Multiplies coefficients by a precomputed table.
pub fn apply_table(field: &SpectralField, table: &[f64]) -> SpectralField {
    debug_assert_eq!(table.len(), field.coeffs.len());
    let mut out = field.clone();
    out.coeffs.iter_mut().zip(table).for_each(|(c, v)| *c *= v);
    out
}

/// Whether the mode survives the two-thirds rule.
pub fn dealias_mask(grid: &BoxGrid) -> Vec<bool> {
    (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            (0..grid.dim()).all(|a| {
                let k = grid.signed_index(a, idx[a]).unsigned_abs() as usize;
                3 * k <= grid.sizes()[a]
            })
        })
        .collect()
}

/// Zeros every coefficient with some `|k_d| > N_d/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mask = dealias_mask(field.grid());
    let mut out = field.clone();
    for (c, keep) in out.coeffs.iter_mut().zip(mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// `(-Delta)^{s/2}`: multiplies by `|xi|^s`. The zero mode maps to zero; for
/// `s < 0` the result is flagged as defined modulo polynomials.
pub fn fractional_laplacian(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(field.clone());
    }
    let mut out = apply_radial(field, |q| if q == 0.0 { 0.0 } else { q.powf(0.5 * s) })?;
    if s < 0.0 {
        out.modulo_polynomials = true;
    }
    Ok(out)
}
