use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Parity of a field in the cross-stream variable `x2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    /// No parity asserted.
    Any,
}

impl Parity {
    /// Parity of a pointwise product.
    pub fn times(self, other: Parity) -> Parity {
        use Parity::*;
        match (self, other) {
            (Even, Even) | (Odd, Odd) => Even,
            (Even, Odd) | (Odd, Even) => Odd,
            _ => Any,
        }
    }

    /// Parity of a sum.
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::Any
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Any => Parity::Any,
        }
    }
}

/// Behaviour of a Fourier symbol under `ξ2 ↦ −ξ2`, declared by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolParity {
    /// `m(ξ1, −ξ2) = m(ξ1, ξ2)`: preserves parity.
    Even,
    /// `m(ξ1, −ξ2) = −m(ξ1, ξ2)`: flips parity.
    Odd,
    /// Neither; the output carries no parity tag.
    Mixed,
}

impl SymbolParity {
    fn apply(self, p: Parity) -> Parity {
        match self {
            SymbolParity::Even => p,
            SymbolParity::Odd => p.flipped(),
            SymbolParity::Mixed => Parity::Any,
        }
    }
}

/// A real periodic field on a torus, stored by its Fourier coefficients.
///
/// Coefficients use the symmetric convention
/// `F[f](ξ) = (L1 L2)^{-1/2} ∫ f(x) e^{-2πi x·ξ} dx`, so the coefficient vector
/// is an isometric image of `L²(T²_L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    parity: Parity,
    zero_mean: bool,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, coeffs: vec![ZERO; grid.len()], parity: Parity::Even, zero_mean: true }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let zero_mean = coeffs[0] == ZERO;
        Ok(Self { grid, coeffs, parity, zero_mean })
    }

    /// Builds a field from a function of the integer wavenumbers `(k1, k2)`;
    /// entries outside the band are zero.
    pub fn from_modes(grid: TorusGrid, parity: Parity, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let coeffs = (0..grid.len())
            .map(|idx| {
                if grid.is_nyquist(idx) {
                    ZERO
                } else {
                    let (k1, k2) = grid.wavenumbers(idx);
                    f(k1, k2)
                }
            })
            .collect::<Vec<_>>();
        let zero_mean = coeffs[0] == ZERO;
        Self { grid, coeffs, parity, zero_mean }
    }

    /// A random real field with coefficients uniform in the unit square on
    /// `|k1|, |k2| ≤ kmax`, Hermitian-symmetrized and optionally parity projected.
    pub fn random<R: Rng + ?Sized>(grid: TorusGrid, rng: &mut R, kmax: i64, parity: Parity, zero_mean: bool) -> Self {
        let raw: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let (k1, k2) = grid.wavenumbers(i);
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                if grid.is_nyquist(i) || k1.abs() > kmax || k2.abs() > kmax {
                    ZERO
                } else {
                    Complex64::new(re, im)
                }
            })
            .collect();
        let mut coeffs: Vec<Complex64> = (0..grid.len()).map(|i| (raw[i] + raw[grid.negate(i)].conj()) * 0.5).collect();
        if zero_mean {
            coeffs[0] = ZERO;
        }
        let f = Self { grid, zero_mean: coeffs[0] == ZERO, coeffs, parity: Parity::Any };
        f.parity_project(parity)
    }

    /// Fourier analysis of `n1 × n2` row-major samples at the grid nodes.
    pub fn analyze(grid: TorusGrid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {}x{} samples, got {}",
                grid.n1,
                grid.n2,
                samples.len()
            )));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf, grid.n1, grid.n2);
        let scale = grid.area().sqrt() / grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Self::from_coeffs(grid, buf, Parity::Any)
    }

    /// Samples at the grid nodes.
    pub fn synthesize(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        fft::backward(&mut buf, self.grid.n1, self.grid.n2);
        let scale = 1.0 / self.grid.area().sqrt();
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Samples of the in-band part of the field on a refined `m1 × m2` grid.
    pub fn synthesize_padded(&self, m1: usize, m2: usize) -> Vec<f64> {
        let g = &self.grid;
        let mut buf = vec![ZERO; m1 * m2];
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO || g.is_nyquist(idx) {
                continue;
            }
            let (k1, k2) = g.wavenumbers(idx);
            let p1 = k1.rem_euclid(m1 as i64) as usize;
            let p2 = k2.rem_euclid(m2 as i64) as usize;
            buf[p1 * m2 + p2] = c;
        }
        fft::backward(&mut buf, m1, m2);
        let scale = 1.0 / g.area().sqrt();
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Analysis of samples on a refined `m1 × m2` grid, truncated to the band of `grid`.
    pub fn analyze_padded(grid: TorusGrid, samples: &[f64], m1: usize, m2: usize, parity: Parity) -> Self {
        debug_assert_eq!(samples.len(), m1 * m2);
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf, m1, m2);
        let scale = grid.area().sqrt() / (m1 * m2) as f64;
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let (k1, k2) = grid.wavenumbers(idx);
            let p1 = k1.rem_euclid(m1 as i64) as usize;
            let p2 = k2.rem_euclid(m2 as i64) as usize;
            out.coeffs[idx] = buf[p1 * m2 + p2] * scale;
        }
        out.parity = parity;
        out.zero_mean = out.coeffs[0] == ZERO;
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutable access to the coefficients; the caller is responsible for the tags.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// Re-tags the field without touching coefficients.
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.grid.index_of(k1, k2).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn mean_coeff(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn check_grid(&self, other: &ScalarField) -> Result<()> {
        self.grid.check_same(&other.grid)
    }

    fn zip(&self, other: &ScalarField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        debug_assert!(self.grid.same_shape(&other.grid));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Self {
            grid: self.grid,
            coeffs,
            parity: self.parity.plus(other.parity),
            zero_mean: self.zero_mean && other.zero_mean,
        }
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        debug_assert!(self.grid.same_shape(&x.grid));
        for (y, &v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += v * a;
        }
        self.parity = self.parity.plus(x.parity);
        self.zero_mean &= x.zero_mean;
    }

    /// `L²(T²_L)` pairing `∫ f g`, evaluated through Plancherel.
    pub fn inner_product(&self, other: &ScalarField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.dot(other))
    }

    pub(crate) fn dot(&self, other: &ScalarField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `(Σ ⟨ξ⟩^{2s} |F[f](ξ)|²)^{1/2}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let [a, b] = self.grid.xi(idx);
                (1.0 + a * a + b * b).powf(s) * c.norm_sqr()
            })
            .sum();
        sum.sqrt()
    }

    /// Fraction of the `L²` energy carried by modes in the outer half of the band.
    pub fn tail_mass(&self) -> f64 {
        let q1 = (self.grid.n1 / 4) as i64;
        let q2 = (self.grid.n2 / 4) as i64;
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let (k1, k2) = self.grid.wavenumbers(*idx);
                k1.abs() > q1 || k2.abs() > q2
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        tail / total
    }

    /// Largest absolute nodal value.
    pub fn max_abs(&self) -> f64 {
        self.synthesize().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fraction of the energy carried by modes with `k2 ≠ 0`.
    pub fn cross_stream_energy_fraction(&self) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let cross: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.grid.wavenumbers(*idx).1 != 0)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        cross / total
    }

    /// `max_ξ |F(−ξ) − conj F(ξ)|`; zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.coeffs[self.grid.negate(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `L²` norm of the part violating the given parity.
    pub fn parity_defect(&self, tag: Parity) -> f64 {
        if tag == Parity::Any {
            return 0.0;
        }
        self.sub(&self.parity_project(tag)).norm_l2()
    }

    /// Orthogonal projection onto fields that are even (or odd) in `x2`.
    pub fn parity_project(&self, tag: Parity) -> Self {
        let sign = match tag {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::Any => return self.clone(),
        };
        let g = self.grid;
        let coeffs = (0..g.len())
            .map(|i| {
                let j = g.flip_x2(i);
                if i == j {
                    if sign > 0.0 {
                        self.coeffs[i]
                    } else {
                        ZERO
                    }
                } else {
                    (self.coeffs[i] + self.coeffs[j] * sign) * 0.5
                }
            })
            .collect::<Vec<_>>();
        let zero_mean = coeffs[0] == ZERO;
        Self { grid: g, coeffs, parity: tag, zero_mean }
    }

    pub fn zero_mean_project(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = ZERO;
        out.zero_mean = true;
        out
    }

    /// Zeroes the Nyquist row and column.
    pub fn band_limit(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.grid.len() {
            if self.grid.is_nyquist(i) {
                out.coeffs[i] = ZERO;
            }
        }
        out
    }

    /// `f ∘ R` with `R(x1, x2) = (−x1, x2)`.
    pub fn reflect_x1(&self) -> Self {
        let g = self.grid;
        let coeffs = (0..g.len()).map(|i| self.coeffs[g.flip_x1(i)]).collect();
        Self { grid: g, coeffs, parity: self.parity, zero_mean: self.zero_mean }
    }

    /// Fourier multiplier `F[out](ξ) = m(ξ) F[self](ξ)` on the band.
    ///
    /// `m(0)` is evaluated like any other lattice point, so the caller's symbol
    /// must define it.
    pub fn apply_multiplier(&self, symbol: impl Fn([f64; 2]) -> Complex64, parity: SymbolParity) -> Self {
        let g = self.grid;
        let m0 = symbol([0.0, 0.0]);
        let coeffs = (0..g.len())
            .map(|i| {
                let c = self.coeffs[i];
                if g.is_nyquist(i) || c == ZERO {
                    ZERO
                } else {
                    symbol(g.xi(i)) * c
                }
            })
            .collect::<Vec<_>>();
        Self {
            grid: g,
            coeffs,
            parity: parity.apply(self.parity),
            zero_mean: self.zero_mean || m0 == ZERO,
        }
    }

    /// `∂_j` with `j ∈ {1, 2}`.
    pub fn derivative(&self, j: usize) -> Self {
        match j {
            1 => self.apply_multiplier(|xi| Complex64::new(0.0, 2.0 * PI * xi[0]), SymbolParity::Even),
            2 => self.apply_multiplier(|xi| Complex64::new(0.0, 2.0 * PI * xi[1]), SymbolParity::Odd),
            _ => panic!("derivative direction must be 1 or 2, got {j}"),
        }
    }

    pub fn d1(&self) -> Self {
        self.derivative(1)
    }

    pub fn d2(&self) -> Self {
        self.derivative(2)
    }

    pub fn laplacian(&self) -> Self {
        self.apply_multiplier(|xi| Complex64::new(-4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]), 0.0), SymbolParity::Even)
    }

    /// Riesz transform `R_j` with symbol `i ξ_j / |ξ|`, vanishing at the origin.
    pub fn riesz(&self, j: usize) -> Self {
        assert!(j == 1 || j == 2, "riesz direction must be 1 or 2, got {j}");
        let parity = if j == 1 { SymbolParity::Even } else { SymbolParity::Odd };
        self.apply_multiplier(
            |xi| {
                let r = xi[0].hypot(xi[1]);
                if r == 0.0 {
                    ZERO
                } else {
                    Complex64::new(0.0, xi[j - 1] / r)
                }
            },
            parity,
        )
    }

    /// `Δ^{-1}` on zero-mean fields.
    pub fn inv_laplacian(&self) -> Result<Self> {
        if self.coeffs[0] != ZERO {
            return Err(Error::Domain("inverse Laplacian needs a zero-mean field".into()));
        }
        Ok(self.apply_multiplier(
            |xi| {
                let s = xi[0] * xi[0] + xi[1] * xi[1];
                if s == 0.0 {
                    ZERO
                } else {
                    Complex64::new(-1.0 / (4.0 * PI * PI * s), 0.0)
                }
            },
            SymbolParity::Even,
        ))
    }

    /// `(1 − γ∂1 − μΔ)^{-1}`; the denominator `1 − 2πiγξ1 + 4π²μ|ξ|²` has real part at least one.
    pub fn helmholtz_inverse(&self, gamma: f64, mu: f64) -> Self {
        self.apply_multiplier(|xi| helmholtz_symbol(gamma, mu, xi).inv(), SymbolParity::Even)
    }
}

/// Symbol of `1 − γ∂1 − μΔ`.
pub(crate) fn helmholtz_symbol(gamma: f64, mu: f64, xi: [f64; 2]) -> Complex64 {
    let s = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]);
    Complex64::new(1.0 + mu * s, -2.0 * PI * gamma * xi[0])
}

/// A pair of scalar fields `(u1, u2)` on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub c1: ScalarField,
    pub c2: ScalarField,
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Result<Self> {
        c1.check_grid(&c2)?;
        Ok(Self { c1, c2 })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self { c1: ScalarField::zeros(grid), c2: ScalarField::zeros(grid).with_parity(Parity::Odd) }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.c1.grid()
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        match j {
            1 => &self.c1,
            2 => &self.c2,
            _ => panic!("vector component must be 1 or 2, got {j}"),
        }
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { c1: f(&self.c1), c2: f(&self.c2) }
    }

    pub fn add(&self, o: &VectorField) -> Self {
        Self { c1: self.c1.add(&o.c1), c2: self.c2.add(&o.c2) }
    }

    pub fn sub(&self, o: &VectorField) -> Self {
        Self { c1: self.c1.sub(&o.c1), c2: self.c2.sub(&o.c2) }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|f| f.scale(a))
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        self.c1.axpy(a, &x.c1);
        self.c2.axpy(a, &x.c2);
    }

    pub fn dot(&self, o: &VectorField) -> f64 {
        self.c1.dot(&o.c1) + self.c2.dot(&o.c2)
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn gradient(f: &ScalarField) -> Self {
        Self { c1: f.d1(), c2: f.d2() }
    }

    pub fn divergence(&self) -> ScalarField {
        self.c1.d1().add(&self.c2.d2())
    }

    /// Leray projection with symbol `I − ξ⊗ξ/|ξ|²`; identity at the origin.
    pub fn leray(&self) -> Self {
        let g = *self.grid();
        let mut c1 = self.c1.clone();
        let mut c2 = self.c2.clone();
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                c1.coeffs[i] = ZERO;
                c2.coeffs[i] = ZERO;
                continue;
            }
            let xi = g.xi(i);
            let s = xi[0] * xi[0] + xi[1] * xi[1];
            if s == 0.0 {
                continue;
            }
            let (a, b) = (self.c1.coeffs[i], self.c2.coeffs[i]);
            let proj = (a * xi[0] + b * xi[1]) / s;
            c1.coeffs[i] = a - proj * xi[0];
            c2.coeffs[i] = b - proj * xi[1];
        }
        Self { c1, c2 }
    }

    pub fn reflect_x1(&self) -> Self {
        Self { c1: self.c1.reflect_x1().scale(-1.0), c2: self.c2.reflect_x1() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(3.0, 2.0, 16, 12).unwrap()
    }

    fn nodal(g: &TorusGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(g.len());
        for i1 in 0..g.n1 {
            for i2 in 0..g.n2 {
                let [x1, x2] = g.node(i1, i2);
                v.push(f(x1, x2));
            }
        }
        v
    }

    #[test]
    fn constant_and_single_mode() {
        let g = grid();
        let c = ScalarField::analyze(g, &vec![1.7; g.len()]).unwrap();
        assert!((c.coeff(0, 0).re - 1.7 * g.area().sqrt()).abs() < 1e-13);
        assert!(c.coeffs()[1..].iter().all(|z| z.norm() < 1e-13));

        let f = ScalarField::analyze(g, &nodal(&g, |x1, _| (2.0 * PI * x1 / g.l1).cos())).unwrap();
        let half = g.area().sqrt() / 2.0;
        assert!((f.coeff(1, 0) - Complex64::new(half, 0.0)).norm() < 1e-13);
        assert!((f.coeff(-1, 0) - Complex64::new(half, 0.0)).norm() < 1e-13);
        let rest: f64 = f.norm_l2().powi(2) - 2.0 * half * half;
        assert!(rest.abs() < 1e-12);
    }

    #[test]
    fn shape_error() {
        let g = grid();
        assert!(matches!(ScalarField::analyze(g, &[0.0; 5]), Err(Error::Shape(_))));
    }

    #[test]
    fn derivative_of_cosine() {
        let g = grid();
        let f = ScalarField::analyze(g, &nodal(&g, |x1, _| (2.0 * PI * x1 / g.l1).cos())).unwrap();
        let df = f.d1().synthesize();
        let expect = nodal(&g, |x1, _| -(2.0 * PI / g.l1) * (2.0 * PI * x1 / g.l1).sin());
        for (a, b) in df.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn even_projection_kills_sine_in_x2() {
        let g = grid();
        let f = ScalarField::analyze(g, &nodal(&g, |_, x2| (2.0 * PI * x2 / g.l2).sin())).unwrap();
        assert!(f.parity_project(Parity::Even).norm_l2() < 1e-13);
        assert!((f.parity_project(Parity::Odd).norm_l2() - f.norm_l2()).abs() < 1e-13);
    }

    #[test]
    fn inv_laplacian_needs_zero_mean() {
        let g = grid();
        let c = ScalarField::analyze(g, &vec![1.0; g.len()]).unwrap();
        assert!(matches!(c.inv_laplacian(), Err(Error::Domain(_))));
    }

    #[test]
    fn padded_synthesis_matches_nodal_values() {
        let g = grid();
        let f = ScalarField::analyze(
            g,
            &nodal(&g, |x1, x2| (2.0 * PI * x1 / g.l1).sin() * (4.0 * PI * x2 / g.l2).cos() + 0.3),
        )
        .unwrap();
        let (m1, m2) = (2 * g.n1, 2 * g.n2);
        let fine = f.synthesize_padded(m1, m2);
        let coarse = f.synthesize();
        for i1 in 0..g.n1 {
            for i2 in 0..g.n2 {
                assert!((fine[(2 * i1) * m2 + 2 * i2] - coarse[i1 * g.n2 + i2]).abs() < 1e-13);
            }
        }
        let back = ScalarField::analyze_padded(g, &fine, m1, m2, Parity::Any);
        assert!(back.sub(&f).norm_l2() < 1e-13);
    }
}
