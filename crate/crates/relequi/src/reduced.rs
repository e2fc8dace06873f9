//! The exact reduced equations of motion in the moving frame, as the
//! Euler-Lagrange system of the Routhian
//!   L = g3 v0^2/2 + (g3 x0^2/2) [ (x.v)^2/x3^2 + |v|^2 - W^2 ] + U(x)/(sqrt(g3) x0),
//!   W = J/(g3 x0^2) - v^T Q x,
//! with the angular momentum J pinned to the relative-equilibrium value
//! g3 * omega. States are (x0, x_5..x_{2N}, v0, v_5..v_{2N}).

use nalgebra::{DMatrix, DVector};

use crate::central::CentralConfig;
use crate::error::{Error, Result};
use crate::masses::MassSystem;
use crate::potential;

/// Exact reduced dynamics bound to a solved configuration.
#[derive(Debug, Clone)]
pub struct ReducedDynamics {
    masses: MassSystem,
    /// Unit shape frame Ehat_5..Ehat_{2N} and Ehat_3.
    e3_hat: DVector<f64>,
    shape: Vec<DVector<f64>>,
    /// q_jk = <Ehat_j, Ehat_k-perp> over the shape indices.
    q: DMatrix<f64>,
    pub g3: f64,
    /// Rotation rate of the relative equilibrium at this scale.
    pub omega_re: f64,
    /// Angular momentum constant J = g3 * omega_re.
    pub j_const: f64,
}

impl ReducedDynamics {
    pub fn new(m: &MassSystem, c: &CentralConfig) -> Result<Self> {
        let nx = 2 * m.n() - 4;
        let e3_hat = c.eigvec_hat(2);
        let shape: Vec<DVector<f64>> = (0..nx).map(|k| c.eigvec_hat(4 + k)).collect();
        let mut q = DMatrix::zeros(nx, nx);
        for j in 0..nx {
            let pj = potential::perp(&shape[j]);
            for k in 0..nx {
                q[(k, j)] = potential::mass_dot(m, &shape[k], &pj);
            }
        }
        // omega at this scale: omega^2 = lambda(E3) = g3^{-3/2} lambda*
        let omega_re = c.lambda.sqrt();
        Ok(ReducedDynamics {
            masses: m.clone(),
            e3_hat,
            shape,
            q,
            g3: c.g3,
            omega_re,
            j_const: c.g3 * omega_re,
        })
    }

    pub fn shape_dim(&self) -> usize {
        self.shape.len()
    }

    /// Phase-space dimension 2 (2N - 3).
    pub fn dim(&self) -> usize {
        2 * (self.shape.len() + 1)
    }

    /// The equilibrium state (x0 = 1, everything else 0).
    pub fn equilibrium(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.dim());
        s[0] = 1.0;
        s
    }

    fn split(&self, state: &DVector<f64>) -> (f64, DVector<f64>, f64, DVector<f64>) {
        let nx = self.shape.len();
        let x0 = state[0];
        let x = DVector::from_iterator(nx, (1..=nx).map(|i| state[i]));
        let v0 = state[nx + 1];
        let v = DVector::from_iterator(nx, (nx + 2..2 * nx + 2).map(|i| state[i]));
        (x0, x, v0, v)
    }

    /// The planar configuration point of the shape coordinates:
    /// x3 Ehat3 + sum x_k Ehat_k (unit sphere chart).
    fn config_point(&self, x: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
        let x3sq = 1.0 - x.dot(x);
        if x3sq <= 0.0 {
            return Err(Error::Chart(format!("x3^2 = {x3sq} <= 0")));
        }
        let x3 = x3sq.sqrt();
        let mut pt = &self.e3_hat * x3;
        for (k, e) in self.shape.iter().enumerate() {
            pt += e * x[k];
        }
        Ok((pt, x3))
    }

    /// U(x) and its shape gradient dU/dx_k = dU(Ehat_k - (x_k/x3) Ehat3).
    fn potential_and_gradient(&self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        let (pt, x3) = self.config_point(x)?;
        let u = potential::value(&self.masses, &pt)?;
        let nx = self.shape.len();
        let mut g = DVector::zeros(nx);
        for k in 0..nx {
            let dir = &self.shape[k] - &self.e3_hat * (x[k] / x3);
            g[k] = potential::d1(&self.masses, &pt, &dir);
        }
        Ok((u, g))
    }

    /// Time derivative of the state. Errors when the chart degenerates
    /// (x3 -> 0) or the shape collapses (x0 <= 0).
    pub fn rhs(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
        let nx = self.shape.len();
        let (x0, x, v0, v) = self.split(state);
        if x0 <= 0.0 {
            return Err(Error::Singularity(format!("x0 = {x0} <= 0")));
        }
        let x3sq = 1.0 - x.dot(&x);
        if x3sq <= 0.0 {
            return Err(Error::Chart(format!("x3^2 = {x3sq} <= 0")));
        }
        let (g3, j) = (self.g3, self.j_const);
        let qx = &self.q * &x;
        let qv = &self.q * &v;
        let w = j / (g3 * x0 * x0) - v.dot(&qx);
        let xv = x.dot(&v);
        let (u, gu) = self.potential_and_gradient(&x)?;

        // radial equation
        let a0 = x0 * (xv * xv / x3sq + v.dot(&v) - w * w) + 2.0 * j * w / (g3 * x0)
            - u / (g3.powf(1.5) * x0 * x0);

        // shape equations: A a = b with
        // A = Id + x x^T / x3^2 - (Qx)(Qx)^T
        let mut a_mat = DMatrix::identity(nx, nx);
        for i in 0..nx {
            for k in 0..nx {
                a_mat[(i, k)] += x[i] * x[k] / x3sq - qx[i] * qx[k];
            }
        }
        let p = &x * (xv / x3sq) + &v + &qx * w;
        let dldx = ((&v * xv + &x * (xv * xv / x3sq)) / x3sq - &qv * w) * (g3 * x0 * x0)
            + &gu / (g3.sqrt() * x0);
        let b = dldx / (g3 * x0 * x0)
            - &p * (2.0 * v0 / x0)
            - (&x * (v.dot(&v) / x3sq)
                + &v * (xv / x3sq)
                + &x * (2.0 * xv * xv / (x3sq * x3sq))
                - &qx * (2.0 * j * v0 / (g3 * x0 * x0 * x0))
                + &qv * w);
        let acc = a_mat
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Singularity("degenerate shape mass matrix".into()))?;

        let mut out = DVector::zeros(self.dim());
        out[0] = v0;
        for k in 0..nx {
            out[1 + k] = v[k];
        }
        out[nx + 1] = a0;
        for k in 0..nx {
            out[nx + 2 + k] = acc[k];
        }
        Ok(out)
    }

    /// Conserved energy of the reduced flow:
    /// g3 v0^2/2 + (g3 x0^2/2)[(x.v)^2/x3^2 + |v|^2 - (v.Qx)^2]
    /// + J^2/(2 g3 x0^2) - U(x)/(sqrt(g3) x0).
    pub fn energy(&self, state: &DVector<f64>) -> Result<f64> {
        let (x0, x, v0, v) = self.split(state);
        let x3sq = 1.0 - x.dot(&x);
        if x3sq <= 0.0 || x0 <= 0.0 {
            return Err(Error::Chart("state outside the chart".into()));
        }
        let qx = &self.q * &x;
        let xv = x.dot(&v);
        let (u, _) = self.potential_and_gradient(&x)?;
        Ok(self.g3 * v0 * v0 / 2.0
            + self.g3 * x0 * x0 / 2.0 * (xv * xv / x3sq + v.dot(&v) - v.dot(&qx).powi(2))
            + self.j_const * self.j_const / (2.0 * self.g3 * x0 * x0)
            - u / (self.g3.sqrt() * x0))
    }

    /// Canonical momenta of the state: y0 = g3 v0 and
    /// y_k = g3 x0^2 [ x_k (x.v)/x3^2 + v_k + W (Qx)_k ].
    pub fn canonical_momenta(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
        let nx = self.shape.len();
        let (x0, x, v0, v) = self.split(state);
        let x3sq = 1.0 - x.dot(&x);
        if x3sq <= 0.0 {
            return Err(Error::Chart("state outside the chart".into()));
        }
        let qx = &self.q * &x;
        let w = self.j_const / (self.g3 * x0 * x0) - v.dot(&qx);
        let xv = x.dot(&v);
        let mut y = DVector::zeros(nx + 1);
        y[0] = self.g3 * v0;
        for k in 0..nx {
            y[1 + k] = self.g3 * x0 * x0 * (x[k] * xv / x3sq + v[k] + w * qx[k]);
        }
        Ok(y)
    }

    /// Invert the Legendre transform: velocities from momenta at given
    /// positions. The map y = G v + b is linear in v.
    pub fn velocities_from_momenta(
        &self,
        x0: f64,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let nx = self.shape.len();
        let x3sq = 1.0 - x.dot(x);
        if x3sq <= 0.0 {
            return Err(Error::Chart("state outside the chart".into()));
        }
        let qx = &self.q * x;
        // y_k/ (g3 x0^2) = [Id + x x^T/x3^2 - (Qx)(Qx)^T] v + (J/(g3 x0^2)) (Qx)_k
        let mut g = DMatrix::identity(nx, nx);
        for i in 0..nx {
            for k in 0..nx {
                g[(i, k)] += x[i] * x[k] / x3sq - qx[i] * qx[k];
            }
        }
        let rhs = DVector::from_iterator(nx, (0..nx).map(|k| y[1 + k]))
            / (self.g3 * x0 * x0)
            - &qx * (self.j_const / (self.g3 * x0 * x0));
        let v = g
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singularity("degenerate Legendre transform".into()))?;
        Ok(v)
    }

    /// theta-dot along a reduced state (quadrature integrand for the frame
    /// angle): J/(g3 x0^2) - v.Qx.
    pub fn theta_dot(&self, state: &DVector<f64>) -> f64 {
        let (x0, x, _, v) = self.split(state);
        self.j_const / (self.g3 * x0 * x0) - v.dot(&(&self.q * &x))
    }

    /// Full planar positions implied by a reduced state and frame angle:
    /// r = sqrt(g3) x0 A(theta) (x3 Ehat3 + sum x_k Ehat_k). Lets callers
    /// recompute the angular momentum sum m_j r_j x rdot_j independently.
    pub fn reconstruct_positions(
        &self,
        state: &DVector<f64>,
        theta: f64,
    ) -> Result<DVector<f64>> {
        let (x0, x, _, _) = self.split(state);
        let (pt, _) = self.config_point(&x)?;
        let (c, s) = (theta.cos(), theta.sin());
        let scale = self.g3.sqrt() * x0;
        let n = pt.len() / 2;
        let mut r = DVector::zeros(2 * n);
        for k in 0..n {
            r[2 * k] = scale * (c * pt[2 * k] - s * pt[2 * k + 1]);
            r[2 * k + 1] = scale * (s * pt[2 * k] + c * pt[2 * k + 1]);
        }
        Ok(r)
    }

    pub fn masses(&self) -> &MassSystem {
        &self.masses
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::solve_lagrange;
    use crate::masses::MassSystem;
    use approx::assert_relative_eq;

    fn setup() -> (MassSystem, ReducedDynamics) {
        let m = MassSystem::new(vec![0.98, 0.01, 0.01]).unwrap();
        let mn = m.normalized_to_unit_total();
        let c = solve_lagrange(&m).unwrap();
        let dyn_ = ReducedDynamics::new(&mn, &c).unwrap();
        (mn, dyn_)
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let (_, d) = setup();
        let f = d.rhs(&d.equilibrium()).unwrap();
        assert!(f.amax() < 1e-12, "fixed point residual {}", f.amax());
    }

    #[test]
    fn linearization_reproduces_h2_frequencies() {
        let (_, d) = setup();
        let eq = d.equilibrium();
        let n = d.dim();
        let h = 1e-6;
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let mut sp = eq.clone();
            sp[c] += h;
            let mut sm = eq.clone();
            sm[c] -= h;
            let fp = d.rhs(&sp).unwrap();
            let fm = d.rhs(&sm).unwrap();
            for r in 0..n {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let eig = jac
            .map(|x| nalgebra::Complex::new(x, 0.0))
            .eigenvalues()
            .unwrap();
        let mut freqs: Vec<f64> = eig.iter().map(|e| e.im.abs()).collect();
        freqs.sort_by(f64::total_cmp);
        let beta = 0.0197f64;
        let g = (1.0 - 27.0 * beta).sqrt();
        let w0 = beta.powf(0.75);
        let expect = [
            ((1.0 - g) / 2.0).sqrt() * w0,
            ((1.0 + g) / 2.0).sqrt() * w0,
            w0,
        ];
        for (i, e) in expect.iter().enumerate() {
            assert_relative_eq!(freqs[2 * i + 1], e, max_relative = 1e-5);
        }
    }

    #[test]
    fn momentum_velocity_round_trip() {
        let (_, d) = setup();
        let mut s = d.equilibrium();
        s[0] = 1.02;
        s[1] = 0.01;
        s[2] = -0.015;
        s[3] = 0.005;
        s[4] = 0.002;
        s[5] = -0.004;
        let y = d.canonical_momenta(&s).unwrap();
        assert_relative_eq!(y[0], d.g3 * s[3], epsilon = 1e-15);
        let nx = d.shape_dim();
        let x = DVector::from_vec(vec![s[1], s[2]]);
        let v = d.velocities_from_momenta(s[0], &x, &y).unwrap();
        for k in 0..nx {
            assert_relative_eq!(v[k], s[nx + 2 + k], epsilon = 1e-12);
        }
    }

    #[test]
    fn momenta_vanish_at_equilibrium() {
        let (_, d) = setup();
        let y = d.canonical_momenta(&d.equilibrium()).unwrap();
        assert!(y.amax() < 1e-14);
    }

    #[test]
    fn theta_dot_at_equilibrium_is_omega() {
        let (_, d) = setup();
        assert_relative_eq!(d.theta_dot(&d.equilibrium()), d.omega_re, epsilon = 1e-14);
    }

    #[test]
    fn chart_errors() {
        let (_, d) = setup();
        let mut s = d.equilibrium();
        s[1] = 1.2; // |x| > 1
        assert!(matches!(d.rhs(&s), Err(Error::Chart(_))));
        let mut s = d.equilibrium();
        s[0] = -0.1;
        assert!(matches!(d.rhs(&s), Err(Error::Singularity(_))));
    }
}
