//! The nonlinear remainder `N` of the traveling-wave system and its exact derivative.
//!
//! ```text
//! N1 = (1 + η) u·∇u − γ η ∂1u − μ ∇·(η 𝕊u) + η ∇(1 − σΔ)η
//! N2 = ∇·(η u)
//! ```
//!
//! All products are formed on a doubled grid, which is exact for the cubic
//! term and the quadratic ones alike.

use crate::linear::{apply_ps, apply_pt, LinearOperator, Residual, State};
use crate::params::{DriveParams, PhysicalParams};
use crate::spectral::{Padding, Parity, ScalarField, TorusGrid, VectorField};

/// Nodal values of a state and the derivatives `N` needs, on the padded grid.
#[derive(Clone, Debug)]
struct Samples {
    u: [Vec<f64>; 2],
    /// `du[i][j] = ∂_j u_i`.
    du: [[Vec<f64>; 2]; 2],
    eta: Vec<f64>,
    /// `∇(1 − σΔ)η`.
    grad_w: [Vec<f64>; 2],
}

/// Padded evaluation context for `N` on a fixed grid.
#[derive(Clone, Debug)]
pub struct NonlinearMap {
    pub phys: PhysicalParams,
    pub grid: TorusGrid,
    pad: Padding,
}

fn tags(standard: bool) -> [Parity; 2] {
    if standard {
        [Parity::Even, Parity::Odd]
    } else {
        [Parity::Any, Parity::Any]
    }
}

/// `𝕊u` as `(S11, S12, S22)` from the velocity gradient.
fn stress(du: &[[Vec<f64>; 2]; 2], p: usize) -> [f64; 3] {
    let (a, b) = (du[0][0][p], du[1][1][p]);
    [4.0 * a + 2.0 * b, du[0][1][p] + du[1][0][p], 2.0 * a + 4.0 * b]
}

impl NonlinearMap {
    pub fn new(phys: PhysicalParams, grid: TorusGrid) -> Self {
        Self { phys, grid, pad: Padding::cubic(grid) }
    }

    fn sample(&self, s: &State) -> Samples {
        let p = &self.pad;
        let u = [p.samples(&s.u.c1), p.samples(&s.u.c2)];
        let du = [
            [p.samples(&s.u.c1.d1()), p.samples(&s.u.c1.d2())],
            [p.samples(&s.u.c2.d1()), p.samples(&s.u.c2.d2())],
        ];
        let w = s.eta.sub(&s.eta.laplacian().scale(self.phys.sigma));
        Samples { u, du, eta: p.samples(&s.eta), grad_w: [p.samples(&w.d1()), p.samples(&w.d2())] }
    }

    /// Turns padded nodal values of `A`, `B = η𝕊u`-type and `C = ηu`-type terms into
    /// `(A − μ∇·B, ∇·C)`.
    fn assemble(&self, a: [Vec<f64>; 2], b: [Vec<f64>; 3], c: [Vec<f64>; 2], standard: bool) -> Residual {
        let [even, odd] = tags(standard);
        let p = &self.pad;
        let a1 = p.collect(&a[0], even);
        let a2 = p.collect(&a[1], odd);
        let b11 = p.collect(&b[0], even);
        let b12 = p.collect(&b[1], odd);
        let b22 = p.collect(&b[2], even);
        let c1 = p.collect(&c[0], even);
        let c2 = p.collect(&c[1], odd);
        let mu = self.phys.mu;
        let f1 = a1.sub(&b11.d1().add(&b12.d2()).scale(mu));
        let f2 = a2.sub(&b12.d1().add(&b22.d2()).scale(mu));
        let g = c1.d1().add(&c2.d2());
        Residual { f: VectorField { c1: f1, c2: f2 }, g }
    }

    pub fn apply_n(&self, drive: &DriveParams, state: &State) -> Residual {
        let s = self.sample(state);
        let n = self.pad.len();
        let gamma = drive.gamma;
        let mut a = [vec![0.0; n], vec![0.0; n]];
        let mut b = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut c = [vec![0.0; n], vec![0.0; n]];
        for p in 0..n {
            let eta = s.eta[p];
            for i in 0..2 {
                let conv = s.u[0][p] * s.du[i][0][p] + s.u[1][p] * s.du[i][1][p];
                a[i][p] = (1.0 + eta) * conv - gamma * eta * s.du[i][0][p] + eta * s.grad_w[i][p];
                c[i][p] = eta * s.u[i][p];
            }
            let st = stress(&s.du, p);
            for k in 0..3 {
                b[k][p] = eta * st[k];
            }
        }
        self.assemble(a, b, c, state.has_standard_parity())
    }

    /// `P(γ, κ) + N(γ, κ)`.
    pub fn residual(&self, linear: &LinearOperator, state: &State) -> Residual {
        linear.apply(state).add(&self.apply_n(&linear.drive, state))
    }

    /// Freezes a base state for repeated derivative evaluations.
    pub fn linearize(&self, drive: &DriveParams, base: &State) -> Linearization<'_> {
        let s = self.sample(base);
        let n = self.pad.len();
        let mut conv = [vec![0.0; n], vec![0.0; n]];
        let mut st = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for p in 0..n {
            for i in 0..2 {
                conv[i][p] = s.u[0][p] * s.du[i][0][p] + s.u[1][p] * s.du[i][1][p];
            }
            let v = stress(&s.du, p);
            for k in 0..3 {
                st[k][p] = v[k];
            }
        }
        Linearization { map: self, gamma: drive.gamma, base: s, conv, stress: st, zero: base.norm() == 0.0 }
    }

    /// Exact derivative `DN(base)·dir`.
    pub fn apply_dn(&self, drive: &DriveParams, base: &State, dir: &State) -> Residual {
        self.linearize(drive, base).apply_dn(dir)
    }

    /// `−η∂1u` as a momentum row, the γ-derivative of `N`.
    fn gamma_term(&self, state: &State) -> Residual {
        let p = &self.pad;
        let eta = p.samples(&state.eta);
        let [even, odd] = tags(state.has_standard_parity());
        let comp = |u: &ScalarField, parity| {
            let d = p.samples(&u.d1());
            let v: Vec<f64> = eta.iter().zip(&d).map(|(e, x)| -e * x).collect();
            p.collect(&v, parity)
        };
        Residual {
            f: VectorField { c1: comp(&state.u.c1, even), c2: comp(&state.u.c2, odd) },
            g: ScalarField::zeros(self.grid).with_parity(even),
        }
    }

    /// `∂_γ(P + N) = P_s + (−η∂1u, 0)`.
    pub fn jac_gamma(&self, state: &State) -> Residual {
        apply_ps(state).add(&self.gamma_term(state))
    }

    /// `∂_κ(P + N) = P_t`, since `N` does not depend on κ.
    pub fn jac_kappa(&self, state: &State) -> Residual {
        apply_pt(state)
    }
}

/// Derivative of `N` at a frozen base state.
#[derive(Clone, Debug)]
pub struct Linearization<'a> {
    map: &'a NonlinearMap,
    gamma: f64,
    base: Samples,
    conv: [Vec<f64>; 2],
    stress: [Vec<f64>; 3],
    zero: bool,
}

impl Linearization<'_> {
    pub fn apply_dn(&self, dir: &State) -> Residual {
        let grid = self.map.grid;
        if self.zero {
            let mut r = Residual::zeros(grid);
            if !dir.has_standard_parity() {
                r = r.untagged();
            }
            return r;
        }
        let d = self.map.sample(dir);
        let b = &self.base;
        let n = self.map.pad.len();
        let gamma = self.gamma;
        let mut da = [vec![0.0; n], vec![0.0; n]];
        let mut db = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut dc = [vec![0.0; n], vec![0.0; n]];
        for p in 0..n {
            let (eta, deta) = (b.eta[p], d.eta[p]);
            for i in 0..2 {
                let dconv = d.u[0][p] * b.du[i][0][p]
                    + d.u[1][p] * b.du[i][1][p]
                    + b.u[0][p] * d.du[i][0][p]
                    + b.u[1][p] * d.du[i][1][p];
                da[i][p] = deta * self.conv[i][p] + (1.0 + eta) * dconv
                    - gamma * (deta * b.du[i][0][p] + eta * d.du[i][0][p])
                    + deta * b.grad_w[i][p]
                    + eta * d.grad_w[i][p];
                dc[i][p] = deta * b.u[i][p] + eta * d.u[i][p];
            }
            let sd = stress(&d.du, p);
            for k in 0..3 {
                db[k][p] = deta * self.stress[k][p] + eta * sd[k];
            }
        }
        self.map.assemble(da, db, dc, dir.has_standard_parity())
    }
}

pub fn apply_n(phys: &PhysicalParams, drive: &DriveParams, state: &State) -> Residual {
    NonlinearMap::new(*phys, *state.grid()).apply_n(drive, state)
}

/// `(P + N)(γ, κ, state)`.
pub fn residual(phys: &PhysicalParams, drive: &DriveParams, state: &State) -> Residual {
    let grid = *state.grid();
    NonlinearMap::new(*phys, grid).residual(&LinearOperator::new(*phys, *drive, grid), state)
}

pub fn apply_dn(phys: &PhysicalParams, drive: &DriveParams, base: &State, dir: &State) -> Residual {
    NonlinearMap::new(*phys, *base.grid()).apply_dn(drive, base, dir)
}

/// Full Jacobian action `P·dir + DN(base)·dir`.
pub fn apply_dj(phys: &PhysicalParams, drive: &DriveParams, base: &State, dir: &State) -> Residual {
    let grid = *base.grid();
    LinearOperator::new(*phys, *drive, grid).apply(dir).add(&apply_dn(phys, drive, base, dir))
}

pub fn jac_gamma(phys: &PhysicalParams, state: &State) -> Residual {
    NonlinearMap::new(*phys, *state.grid()).jac_gamma(state)
}

pub fn jac_kappa(state: &State) -> Residual {
    apply_pt(state)
}
