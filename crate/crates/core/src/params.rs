//! Parameter geometry of the roll-wave problem.
//!
//! The admissible region is
//!
//! ```text
//! E = { (γ, κ) ∈ (1, ∞)² : 0 < κ − γ ≤ (4μ/σ) γ (γ² − 1) }
//! ```
//!
//! together with its mirror image −E. Everything in this module is a closed-form
//! function of `(μ, σ, γ, κ)`; the helpers for the negative region act on
//! `(|γ|, |κ|)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether `(γ, κ)` sits on the lower border of E.
pub const BORDER_RTOL: f64 = 1e-10;

const GAMMA_MIN_MAX_ITER: usize = 200;

/// Fixed physical parameters: inverse Reynolds number `mu` and inverse Bond number `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl PhysicalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "physical parameters must be positive, got mu = {mu}, sigma = {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// The slope `4μ/σ` of the upper boundary of E.
    fn border_coefficient(&self) -> f64 {
        4.0 * self.mu / self.sigma
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { mu: 0.15, sigma: 2.0 }
    }
}

/// Bifurcation parameters: relative wave speed `gamma` and incline steepness `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub gamma: f64,
    pub kappa: f64,
}

impl DriveParams {
    pub fn new(gamma: f64, kappa: f64) -> Self {
        Self { gamma, kappa }
    }

    /// The drive lying exactly on the border of E for the given speed.
    pub fn on_border(phys: &PhysicalParams, gamma: f64) -> Self {
        let kappa = gamma + phys.border_coefficient() * gamma * (gamma * gamma - 1.0);
        Self { gamma, kappa }
    }

    /// Speed of the traveling frame, `γ + κ`.
    pub fn frame_speed(&self) -> f64 {
        self.gamma + self.kappa
    }

    pub fn negated(&self) -> Self {
        Self { gamma: -self.gamma, kappa: -self.kappa }
    }

    pub fn distance(&self, other: &DriveParams) -> f64 {
        (self.gamma - other.gamma).hypot(self.kappa - other.kappa)
    }
}

/// Where a drive sits relative to E ∪ (−E).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    InteriorE,
    BorderE,
    InteriorNegE,
    BorderNegE,
    Outside,
}

impl RegionClass {
    pub fn is_inside(self) -> bool {
        self != RegionClass::Outside
    }

    pub fn is_border(self) -> bool {
        matches!(self, RegionClass::BorderE | RegionClass::BorderNegE)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, RegionClass::InteriorNegE | RegionClass::BorderNegE)
    }

    /// Lower-case tag used in output files.
    pub fn tag(self) -> &'static str {
        match self {
            RegionClass::InteriorE | RegionClass::InteriorNegE => "interior",
            RegionClass::BorderE | RegionClass::BorderNegE => "border",
            RegionClass::Outside => "outside",
        }
    }
}

fn classify_positive(phys: &PhysicalParams, gamma: f64, kappa: f64) -> Option<bool> {
    if !(gamma > 1.0 && kappa > 1.0) {
        return None;
    }
    let gap = kappa - gamma;
    if gap <= 0.0 {
        return None;
    }
    let bound = phys.border_coefficient() * gamma * (gamma * gamma - 1.0);
    if (gap - bound).abs() <= BORDER_RTOL * gap.abs().max(bound.abs()) {
        Some(true)
    } else if gap < bound {
        Some(false)
    } else {
        None
    }
}

/// Classifies `drive` against E ∪ (−E). Border membership is decided with
/// relative tolerance [`BORDER_RTOL`].
pub fn classify(phys: &PhysicalParams, drive: &DriveParams) -> RegionClass {
    let (g, k) = (drive.gamma, drive.kappa);
    if let Some(border) = classify_positive(phys, g, k) {
        return if border { RegionClass::BorderE } else { RegionClass::InteriorE };
    }
    if let Some(border) = classify_positive(phys, -g, -k) {
        return if border { RegionClass::BorderNegE } else { RegionClass::InteriorNegE };
    }
    RegionClass::Outside
}

/// `(|γ|, |κ|, is_border)` for a drive in E ∪ (−E).
fn positive_representative(phys: &PhysicalParams, drive: &DriveParams) -> Result<(f64, f64, bool)> {
    let class = classify(phys, drive);
    if !class.is_inside() {
        return Err(Error::Domain(format!(
            "(gamma, kappa) = ({}, {}) lies outside E and -E",
            drive.gamma, drive.kappa
        )));
    }
    Ok((drive.gamma.abs(), drive.kappa.abs(), class.is_border()))
}

/// The unique `γ ∈ (1, κ)` with `γ² = 1 + (σ/4μ)(κ/γ − 1)`.
pub fn gamma_min(phys: &PhysicalParams, kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::Domain(format!("gamma_min needs kappa > 1, got {kappa}")));
    }
    let c = phys.sigma / (4.0 * phys.mu);
    let f = |g: f64| g * g - 1.0 - c * (kappa / g - 1.0);
    let df = |g: f64| 2.0 * g + c * kappa / (g * g);

    // f(1) < 0 < f(κ); f is increasing on (0, ∞).
    let (mut lo, mut hi) = (1.0_f64, kappa);
    let mut iter = 0;
    while hi - lo > 1e-6 * hi && iter < GAMMA_MIN_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    let mut g = 0.5 * (lo + hi);
    while iter < GAMMA_MIN_MAX_ITER {
        let step = f(g) / df(g);
        let next = g - step;
        let next = if next <= lo || next >= hi { 0.5 * (lo + hi) } else { next };
        if f(next) < 0.0 {
            lo = next;
        } else {
            hi = next;
        }
        let done = (next - g).abs() <= 1e-15 * next;
        g = next;
        iter += 1;
        if done {
            break;
        }
    }
    Ok(g)
}

/// Radius `ρ = sqrt((κ/γ − 1) / (16π²μ))` of the circle carrying the kernel frequencies.
pub fn rho(phys: &PhysicalParams, drive: &DriveParams) -> Result<f64> {
    let (g, k, _) = positive_representative(phys, drive)?;
    Ok(((k / g - 1.0) / (16.0 * PI * PI * phys.mu)).sqrt())
}

/// `χ = (1/γ) sqrt(1 + (σ/4μ)(κ/γ − 1))`, equal to one exactly on the border.
pub fn chi(phys: &PhysicalParams, drive: &DriveParams) -> Result<f64> {
    let (g, k, border) = positive_representative(phys, drive)?;
    if border {
        return Ok(1.0);
    }
    let value = (1.0 + phys.sigma / (4.0 * phys.mu) * (k / g - 1.0)).sqrt() / g;
    if value >= 1.0 {
        return Err(Error::Domain(format!("chi = {value} >= 1 off the border")));
    }
    Ok(value)
}

/// Torus side lengths `(L1, L2)` that put the kernel frequencies on the lattice `Z/L1 × Z/L2`.
pub fn period_lengths(phys: &PhysicalParams, drive: &DriveParams) -> Result<(f64, f64)> {
    let (_, _, border) = positive_representative(phys, drive)?;
    let r = rho(phys, drive)?;
    if border {
        return Ok((1.0 / r, 1.0 / r));
    }
    let c = chi(phys, drive)?;
    Ok((1.0 / (r * c), 1.0 / (r * (1.0 - c * c).sqrt())))
}

/// The frequency set `V(γ, κ)`: four points on interior drives, two on the border.
///
/// Ordered as `(+,+), (−,+), (+,−), (−,−)` in the signs of `(ξ1, ξ2)`; the border
/// case keeps only the first two.
pub fn kernel_frequencies(phys: &PhysicalParams, drive: &DriveParams) -> Result<Vec<[f64; 2]>> {
    let (_, _, border) = positive_representative(phys, drive)?;
    let r = rho(phys, drive)?;
    let c = chi(phys, drive)?;
    let x1 = r * c;
    if border {
        return Ok(vec![[x1, 0.0], [-x1, 0.0]]);
    }
    let x2 = r * (1.0 - c * c).sqrt();
    Ok(vec![[x1, x2], [-x1, x2], [x1, -x2], [-x1, -x2]])
}

/// One sample of the boundary of E at fixed tilt: `γ_min(κ) ≤ γ < κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub kappa: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
}

/// Samples the lower and upper boundaries of E at `n` evenly spaced tilts.
pub fn region_boundary_scan(
    phys: &PhysicalParams,
    kappa_lo: f64,
    kappa_hi: f64,
    n: usize,
) -> Result<Vec<BoundaryRow>> {
    if !(kappa_lo > 1.0 && kappa_hi > kappa_lo && kappa_hi.is_finite()) || n < 2 {
        return Err(Error::Domain(format!(
            "boundary scan needs 1 < kappa_lo < kappa_hi and n >= 2, got ({kappa_lo}, {kappa_hi}, {n})"
        )));
    }
    let step = (kappa_hi - kappa_lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let kappa = if i == n - 1 { kappa_hi } else { kappa_lo + step * i as f64 };
            Ok(BoundaryRow { kappa, gamma_min: gamma_min(phys, kappa)?, gamma_max: kappa })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phys() -> PhysicalParams {
        PhysicalParams::new(0.15, 2.0).unwrap()
    }

    #[test]
    fn classify_examples() {
        let p = phys();
        assert_eq!(classify(&p, &DriveParams::new(5.0, 10.0)), RegionClass::InteriorE);
        assert_eq!(classify(&p, &DriveParams::new(2.0, 3.8)), RegionClass::BorderE);
        assert_eq!(classify(&p, &DriveParams::new(0.5, 10.0)), RegionClass::Outside);
        assert_eq!(classify(&p, &DriveParams::new(-5.0, -10.0)), RegionClass::InteriorNegE);
        assert_eq!(classify(&p, &DriveParams::new(-2.0, -3.8)), RegionClass::BorderNegE);
        assert_eq!(classify(&p, &DriveParams::new(5.0, 4.0)), RegionClass::Outside);
        assert_eq!(classify(&p, &DriveParams::new(5.0, -10.0)), RegionClass::Outside);
        // above the upper boundary κ − γ > (4μ/σ)γ(γ²−1)
        assert_eq!(classify(&p, &DriveParams::new(2.0, 5.0)), RegionClass::Outside);
    }

    #[test]
    fn gamma_min_brackets_and_limits() {
        let p = phys();
        let g = gamma_min(&p, 10.0).unwrap();
        assert!((g - 2.977).abs() < 1e-3, "{g}");
        assert!((gamma_min(&p, 3.8).unwrap() - 2.0).abs() < 1e-12);
        let g = gamma_min(&p, 1.0 + 1e-6).unwrap();
        assert!(g > 1.0 && g < 1.0 + 1e-3, "{g}");
        assert!(matches!(gamma_min(&p, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_min(&p, 0.3), Err(Error::Domain(_))));
    }

    #[test]
    fn helper_values() {
        let p = phys();
        let d = DriveParams::new(5.0, 10.0);
        // quoted reference values are rounded; compare loosely and against the formulas tightly
        let (r, c) = (rho(&p, &d).unwrap(), chi(&p, &d).unwrap());
        assert!((r - 0.20548).abs() < 2e-4 * r);
        assert!((c - 0.41633).abs() < 1e-5);
        let r_ref = (1.0f64 / (16.0 * PI * PI * 0.15)).sqrt();
        let c_ref = (1.0f64 + 2.0 / 0.6).sqrt() / 5.0;
        assert!((r - r_ref).abs() < 1e-15 && (c - c_ref).abs() < 1e-15);
        assert_eq!(chi(&p, &DriveParams::new(2.0, 3.8)).unwrap(), 1.0);
        assert!(matches!(rho(&p, &DriveParams::new(5.0, 4.0)), Err(Error::Domain(_))));
        assert!(matches!(chi(&p, &DriveParams::new(5.0, 4.0)), Err(Error::Domain(_))));
        // negative region shares the helpers of its mirror
        let m = DriveParams::new(-5.0, -10.0);
        assert_eq!(rho(&p, &m).unwrap(), rho(&p, &d).unwrap());
        assert_eq!(chi(&p, &m).unwrap(), chi(&p, &d).unwrap());
    }

    #[test]
    fn period_length_examples() {
        let p = phys();
        let (l1, l2) = period_lengths(&p, &DriveParams::new(5.0, 10.0)).unwrap();
        assert!((l1 - 11.688).abs() < 2e-4 * l1 && (l2 - 5.352).abs() < 2e-4 * l2, "{l1} {l2}");
        let (l1, l2) = period_lengths(&p, &DriveParams::new(2.0, 3.8)).unwrap();
        assert!((l1 - 5.130).abs() < 1e-3 && l1 == l2);
        assert!(period_lengths(&p, &DriveParams::new(0.5, 10.0)).is_err());
    }

    #[test]
    fn period_lengths_blow_up_near_upper_edge() {
        let p = phys();
        let mut prev = (0.0, 0.0);
        for delta in [1.0, 0.5, 0.1, 0.01, 1e-3, 1e-4] {
            let (l1, l2) = period_lengths(&p, &DriveParams::new(10.0 - delta, 10.0)).unwrap();
            assert!(l1 > prev.0 && l2 > prev.1);
            prev = (l1, l2);
        }
        assert!(prev.0 > 1e3 && prev.1 > 1e2);
    }

    #[test]
    fn kernel_frequency_examples() {
        let p = phys();
        let d = DriveParams::new(5.0, 10.0);
        let v = kernel_frequencies(&p, &d).unwrap();
        assert_eq!(v.len(), 4);
        let (l1, l2) = period_lengths(&p, &d).unwrap();
        let r = rho(&p, &d).unwrap();
        for xi in &v {
            assert!((xi[0].abs() - 0.08555).abs() < 2e-4 * xi[0].abs());
            assert!((xi[1].abs() - 0.18683).abs() < 2e-4 * xi[1].abs());
            assert!(((xi[0] * l1).abs() - 1.0).abs() < 1e-12);
            assert!(((xi[1] * l2).abs() - 1.0).abs() < 1e-12);
            assert!((xi[0].hypot(xi[1]) - r).abs() < 1e-14);
            assert!(v.contains(&[-xi[0], -xi[1]]));
            assert!(v.contains(&[xi[0], -xi[1]]));
        }
        let v = kernel_frequencies(&p, &DriveParams::new(2.0, 3.8)).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0][0] - 0.19493).abs() < 1e-5 && v[0][1] == 0.0);
    }

    #[test]
    fn boundary_scan_rows() {
        let p = phys();
        let rows = region_boundary_scan(&p, 1.5, 12.0, 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r.gamma_min < r.gamma_max && r.gamma_min > 1.0));
        let rows = region_boundary_scan(&p, 1.5, 12.0, 22).unwrap();
        let at10 = rows.iter().find(|r| (r.kappa - 10.0).abs() < 1e-12).unwrap();
        assert!((at10.gamma_min - gamma_min(&p, 10.0).unwrap()).abs() < 1e-14);
        assert!(region_boundary_scan(&p, 12.0, 1.5, 10).is_err());
        assert!(region_boundary_scan(&p, 1.5, 12.0, 1).is_err());
    }

    #[test]
    fn border_constructor_classifies_as_border() {
        let p = phys();
        for g in [1.2, 2.0, 2.977, 4.0, 9.0] {
            let d = DriveParams::on_border(&p, g);
            assert_eq!(classify(&p, &d), RegionClass::BorderE, "{g}");
            assert!((gamma_min(&p, d.kappa).unwrap() - g).abs() < 1e-10 * g);
        }
    }
}
