//! Numerical propagation of the reduced and polynomial-Hamiltonian fields,
//! shooting for periodic orbits, pseudo-arclength continuation of the
//! Lyapunov/Weinstein families, and Floquet analysis.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianExpansion;
use crate::poly::TruncPoly;
use crate::reduced::ReducedDynamics;

/// A first-order autonomous field with an energy integral.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, state: &DVector<f64>) -> Result<DVector<f64>>;
    fn energy(&self, state: &DVector<f64>) -> Result<f64>;
    /// Jacobian of the field; default is central finite differences.
    fn jacobian(&self, state: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut j = DMatrix::zeros(n, n);
        let h = 1e-7;
        for c in 0..n {
            let mut sp = state.clone();
            sp[c] += h;
            let mut sm = state.clone();
            sm[c] -= h;
            let fp = self.eval(&sp)?;
            let fm = self.eval(&sm)?;
            for r in 0..n {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Ok(j)
    }
}

/// The exact reduced equations of motion.
pub struct ReducedField(pub ReducedDynamics);

impl VectorField for ReducedField {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
        self.0.rhs(state)
    }
    fn energy(&self, state: &DVector<f64>) -> Result<f64> {
        self.0.energy(state)
    }
}

/// Hamilton's equations of the degree-4 polynomial H2 + H3 + H4 in the
/// translated variables (q, p); the equilibrium is the origin.
pub struct PolyField {
    dof: usize,
    h: TruncPoly,
    /// dq_i/dt = dH/dp_i, dp_i/dt = -dH/dq_i
    grad_q: Vec<TruncPoly>,
    grad_p: Vec<TruncPoly>,
    jac: Vec<Vec<TruncPoly>>,
}

impl PolyField {
    pub fn new(h: &HamiltonianExpansion) -> PolyField {
        let n = h.dof;
        let poly = h.poly();
        let grad_q: Vec<TruncPoly> = (0..n).map(|i| poly.partial(i)).collect();
        let grad_p: Vec<TruncPoly> = (0..n).map(|i| poly.partial(n + i)).collect();
        // field components: f_i = grad_p[i] (i < n), f_{n+i} = -grad_q[i]
        let mut jac = Vec::with_capacity(2 * n);
        for i in 0..n {
            jac.push((0..2 * n).map(|c| grad_p[i].partial(c)).collect());
        }
        for i in 0..n {
            jac.push(
                (0..2 * n)
                    .map(|c| grad_q[i].partial(c).scale(-1.0))
                    .collect(),
            );
        }
        PolyField {
            dof: n,
            h: poly,
            grad_q,
            grad_p,
            jac,
        }
    }
}

impl VectorField for PolyField {
    fn dim(&self) -> usize {
        2 * self.dof
    }
    fn eval(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
        let pt: Vec<f64> = state.as_slice().to_vec();
        let mut out = DVector::zeros(2 * self.dof);
        for i in 0..self.dof {
            out[i] = self.grad_p[i].eval_real(&pt).re;
            out[self.dof + i] = -self.grad_q[i].eval_real(&pt).re;
        }
        Ok(out)
    }
    fn energy(&self, state: &DVector<f64>) -> Result<f64> {
        Ok(self.h.eval_real(state.as_slice()).re)
    }
    fn jacobian(&self, state: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = 2 * self.dof;
        let pt: Vec<f64> = state.as_slice().to_vec();
        let mut j = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] = self.jac[r][c].eval_real(&pt).re;
            }
        }
        Ok(j)
    }
}

// ---------------------------------------------------------------------------
// integrators
// ---------------------------------------------------------------------------

/// Fehlberg 7(8): 13 stages, embedded error estimate.
mod rk78 {
    pub const STAGES: usize = 13;
    pub const A: [[f64; 12]; STAGES] = [
        [0.0; 12],
        [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 20.0, 0.0, 0.0, 0.25, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            -25.0 / 108.0,
            0.0,
            0.0,
            125.0 / 108.0,
            -65.0 / 27.0,
            125.0 / 54.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            31.0 / 300.0,
            0.0,
            0.0,
            0.0,
            61.0 / 225.0,
            -2.0 / 9.0,
            13.0 / 900.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            2.0,
            0.0,
            0.0,
            -53.0 / 6.0,
            704.0 / 45.0,
            -107.0 / 9.0,
            67.0 / 90.0,
            3.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            -91.0 / 108.0,
            0.0,
            0.0,
            23.0 / 108.0,
            -976.0 / 135.0,
            311.0 / 54.0,
            -19.0 / 60.0,
            17.0 / 6.0,
            -1.0 / 12.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            2383.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -301.0 / 82.0,
            2133.0 / 4100.0,
            45.0 / 82.0,
            45.0 / 164.0,
            18.0 / 41.0,
            0.0,
            0.0,
        ],
        [
            3.0 / 205.0,
            0.0,
            0.0,
            0.0,
            0.0,
            -6.0 / 41.0,
            -3.0 / 205.0,
            -3.0 / 41.0,
            3.0 / 41.0,
            6.0 / 41.0,
            0.0,
            0.0,
        ],
        [
            -1777.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -289.0 / 82.0,
            2193.0 / 4100.0,
            51.0 / 82.0,
            33.0 / 164.0,
            12.0 / 41.0,
            0.0,
            1.0,
        ],
    ];
    /// 8th-order weights.
    pub const B: [f64; STAGES] = [
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        34.0 / 105.0,
        9.0 / 35.0,
        9.0 / 35.0,
        9.0 / 280.0,
        9.0 / 280.0,
        0.0,
        41.0 / 840.0,
        41.0 / 840.0,
    ];
}

/// Controls for the adaptive integrator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepControl {
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tol: 1e-12,
            h_init: 1e-2,
            h_min: 1e-12,
            h_max: 1.0,
        }
    }
}

fn rk78_step(
    field: &dyn VectorField,
    state: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, f64)> {
    use rk78::*;
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(STAGES);
    for s in 0..STAGES {
        let mut y = state.clone();
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                y += kj * (h * a);
            }
        }
        k.push(field.eval(&y)?);
    }
    let mut out = state.clone();
    for (s, ks) in k.iter().enumerate() {
        if B[s] != 0.0 {
            out += ks * (h * B[s]);
        }
    }
    // Fehlberg error estimate: (41/840) h (k0 + k10 - k11 - k12)
    let err = (&k[0] + &k[10] - &k[11] - &k[12]).amax() * h.abs() * 41.0 / 840.0;
    Ok((out, err))
}

/// Adaptive RK78 propagation from 0 to `t` (either sign).
pub fn integrate(
    field: &dyn VectorField,
    state: &DVector<f64>,
    t: f64,
    ctrl: &StepControl,
) -> Result<DVector<f64>> {
    Ok(integrate_path(field, state, t, ctrl, false)?.1)
}

/// Adaptive propagation, optionally recording the accepted steps (t, state).
#[allow(clippy::type_complexity)]
pub fn integrate_path(
    field: &dyn VectorField,
    state: &DVector<f64>,
    t: f64,
    ctrl: &StepControl,
    record: bool,
) -> Result<(Vec<(f64, DVector<f64>)>, DVector<f64>)> {
    let mut s = state.clone();
    let mut tau = 0.0f64;
    let dir = t.signum();
    let mut h = ctrl.h_init.min(ctrl.h_max).copysign(dir);
    let mut path = Vec::new();
    if record {
        path.push((0.0, s.clone()));
    }
    if t == 0.0 {
        return Ok((path, s));
    }
    let scale = ctrl.tol.max(1e-300);
    while (t - tau) * dir > 0.0 {
        if ((t - tau).abs()) < h.abs() {
            h = t - tau;
        }
        let (cand, err) = rk78_step(field, &s, h)?;
        if err <= scale || h.abs() <= ctrl.h_min * 1.01 {
            tau += h;
            s = cand;
            if record {
                path.push((tau, s.clone()));
            }
        }
        // PI-free step update with the usual safety factor
        let fac = if err > 0.0 {
            0.9 * (scale / err).powf(1.0 / 8.0)
        } else {
            2.0
        };
        let fac = fac.clamp(0.2, 2.5);
        h = (h.abs() * fac).clamp(ctrl.h_min, ctrl.h_max).copysign(dir);
        if h.abs() < ctrl.h_min && (t - tau) * dir > 0.0 && scale < err {
            return Err(Error::Stiffness(tau));
        }
    }
    Ok((path, s))
}

/// Two-stage Gauss-Legendre (order 4, symplectic, implicit). Fixed step;
/// stage equations solved by fixed-point iteration.
pub fn integrate_symplectic(
    field: &dyn VectorField,
    state: &DVector<f64>,
    t: f64,
    steps: usize,
) -> Result<DVector<f64>> {
    let h = t / steps as f64;
    let sq3 = 3.0f64.sqrt();
    let a11 = 0.25;
    let a12 = 0.25 - sq3 / 6.0;
    let a21 = 0.25 + sq3 / 6.0;
    let a22 = 0.25;
    let mut s = state.clone();
    for _ in 0..steps {
        let f0 = field.eval(&s)?;
        let mut k1 = f0.clone();
        let mut k2 = f0;
        for it in 0..100 {
            let y1 = &s + (&k1 * a11 + &k2 * a12) * h;
            let y2 = &s + (&k1 * a21 + &k2 * a22) * h;
            let n1 = field.eval(&y1)?;
            let n2 = field.eval(&y2)?;
            let delta = (&n1 - &k1).amax().max((&n2 - &k2).amax());
            k1 = n1;
            k2 = n2;
            if delta < 1e-15 * (1.0 + k1.amax()) {
                break;
            }
            if it == 99 {
                return Err(Error::Stiffness(h));
            }
        }
        s += (k1 + k2) * (h * 0.5);
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// periodic orbits
// ---------------------------------------------------------------------------

/// Which one-parameter family an orbit belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family {
    /// Keplerian oscillation on the invariant manifold x = y = 0.
    Trivial,
    /// Lyapunov family of the k-th elliptic frequency (0 = radial).
    Lyapunov(usize),
    /// Energy-parameterized Weinstein family of the same mode.
    Weinstein(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbit {
    pub family: Family,
    pub state0: Vec<f64>,
    pub period: f64,
    pub residual: f64,
    pub floquet: Vec<(f64, f64)>,
    pub energy: f64,
    pub amplitude: f64,
    /// Frame rotation over one reduced period (filled for reduced-dynamics
    /// orbits).
    pub delta_theta: Option<f64>,
}

/// Linear mode of the field at a fixed point: the invariant plane of the
/// eigenvalue pair +- i omega closest to `target`, normalized, plus the
/// attained frequency.
pub fn linear_mode(
    field: &dyn VectorField,
    fixed_point: &DVector<f64>,
    target: f64,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    let jac = field.jacobian(fixed_point)?;
    let n = jac.nrows();
    let jc = jac.map(|x| Complex::new(x, 0.0));
    let eig = jc
        .clone()
        .eigenvalues()
        .ok_or_else(|| Error::Classification("eigenvalue iteration failed".into()))?;
    let mut best = None;
    for ev in eig.iter() {
        if ev.im > 0.0 {
            let d = (ev.im - target).abs();
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, *ev));
            }
        }
    }
    let (_, ev) = best.ok_or_else(|| {
        Error::Classification("no elliptic eigenvalue near the requested frequency".into())
    })?;
    // inverse iteration for the eigenvector
    let shift = Complex::new(ev.re, ev.im * (1.0 + 1e-9));
    let mut m = jc;
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = m.lu();
    let mut v = DVector::from_element(n, Complex::new(1.0, 0.37));
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Classification("inverse iteration singular".into()))?;
        let nrm = v.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Classification("inverse iteration diverged".into()));
        }
        v /= Complex::new(nrm, 0.0);
    }
    let re: DVector<f64> = v.map(|c| c.re);
    let im: DVector<f64> = v.map(|c| c.im);
    let nrm = re.norm().max(1e-300);
    Ok((&re / nrm, &im / nrm, ev.im))
}

/// Monodromy matrix along one period via the variational equations.
pub fn monodromy(
    field: &dyn VectorField,
    state0: &DVector<f64>,
    period: f64,
    ctrl: &StepControl,
) -> Result<DMatrix<f64>> {
    let n = field.dim();
    struct Augmented<'a> {
        inner: &'a dyn VectorField,
        n: usize,
    }
    impl VectorField for Augmented<'_> {
        fn dim(&self) -> usize {
            self.n * (self.n + 1)
        }
        fn eval(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
            let n = self.n;
            let x = DVector::from_iterator(n, (0..n).map(|i| state[i]));
            let fx = self.inner.eval(&x)?;
            let jac = self.inner.jacobian(&x)?;
            let mut out = DVector::zeros(n * (n + 1));
            for i in 0..n {
                out[i] = fx[i];
            }
            // Phi' = J(x) Phi, Phi stored column-major after the state
            for c in 0..n {
                for r in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += jac[(r, k)] * state[n + c * n + k];
                    }
                    out[n + c * n + r] = acc;
                }
            }
            Ok(out)
        }
        fn energy(&self, _state: &DVector<f64>) -> Result<f64> {
            Ok(0.0)
        }
    }
    let mut aug0 = DVector::zeros(n * (n + 1));
    for i in 0..n {
        aug0[i] = state0[i];
    }
    for i in 0..n {
        aug0[n + i * n + i] = 1.0;
    }
    let aug = Augmented { inner: field, n };
    let end = integrate(&aug, &aug0, period, ctrl)?;
    let mut m = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            m[(r, c)] = end[n + c * n + r];
        }
    }
    Ok(m)
}

/// Floquet multipliers, sorted by modulus descending.
pub fn floquet(
    field: &dyn VectorField,
    state0: &DVector<f64>,
    period: f64,
    ctrl: &StepControl,
) -> Result<Vec<(f64, f64)>> {
    let m = monodromy(field, state0, period, ctrl)?;
    let eig = m
        .map(|x| Complex::new(x, 0.0))
        .eigenvalues()
        .ok_or_else(|| Error::Classification("monodromy eigenvalues failed".into()))?;
    let mut out: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    out.sort_by(|a, b| {
        let (na, nb) = (a.0.hypot(a.1), b.0.hypot(b.1));
        nb.total_cmp(&na)
    });
    Ok(out)
}

/// Settings for the periodic-orbit correction.
#[derive(Debug, Clone, Copy)]
pub struct ShootingControl {
    pub residual_tol: f64,
    pub max_iter: usize,
    pub step: StepControl,
}

impl Default for ShootingControl {
    fn default() -> Self {
        ShootingControl {
            residual_tol: 1e-10,
            max_iter: 40,
            step: StepControl::default(),
        }
    }
}

/// Differential correction: least-squares Newton on
///   [ flow_T(s) - s ; <s - anchor, f(anchor)> ; <s - center, dir> - a ]
/// over the unknowns (s, T). The phase row removes the time-shift
/// degeneracy, the amplitude row pins the family parameter.
#[allow(clippy::too_many_arguments)]
pub fn shoot_periodic(
    field: &dyn VectorField,
    guess: &DVector<f64>,
    guess_period: f64,
    center: &DVector<f64>,
    direction: &DVector<f64>,
    amplitude: f64,
    family: Family,
    ctrl: &ShootingControl,
) -> Result<PeriodicOrbit> {
    let n = field.dim();
    let mut s = guess.clone();
    let mut period = guess_period;
    let f_anchor = field.eval(guess)?;
    let mut best_res = f64::INFINITY;
    for _ in 0..ctrl.max_iter {
        let flow = integrate(field, &s, period, &ctrl.step)?;
        let fs_end = field.eval(&flow)?;
        let mut fvec = DVector::zeros(n + 2);
        for i in 0..n {
            fvec[i] = flow[i] - s[i];
        }
        fvec[n] = (&s - guess).dot(&f_anchor);
        fvec[n + 1] = (&s - center).dot(direction) - amplitude;
        let res = fvec.amax();
        if res < best_res {
            best_res = res;
        }
        if res < ctrl.residual_tol {
            let fl = floquet(field, &s, period, &ctrl.step)?;
            let energy = field.energy(&s)?;
            let amp = (&s - center).dot(direction);
            if matches!(family, Family::Lyapunov(_) | Family::Weinstein(_))
                && amp.abs() < 1e-3 * amplitude.abs()
            {
                return Err(Error::FamilyCollapse(amp));
            }
            return Ok(PeriodicOrbit {
                family,
                state0: s.as_slice().to_vec(),
                period,
                residual: res,
                floquet: fl,
                energy,
                amplitude: amp,
                delta_theta: None,
            });
        }
        // Jacobian: [M - I, f(flow) ; f_anchor^T, 0 ; dir^T, 0]
        let m = monodromy(field, &s, period, &ctrl.step)?;
        let mut jac = DMatrix::zeros(n + 2, n + 1);
        for r in 0..n {
            for c in 0..n {
                jac[(r, c)] = m[(r, c)] - if r == c { 1.0 } else { 0.0 };
            }
            jac[(r, n)] = fs_end[r];
        }
        for c in 0..n {
            jac[(n, c)] = f_anchor[c];
            jac[(n + 1, c)] = direction[c];
        }
        let svd = jac.svd(true, true);
        let delta = svd
            .solve(&(-fvec), 1e-13)
            .map_err(|e| Error::Convergence(format!("least-squares step failed: {e}")))?;
        for i in 0..n {
            s[i] += delta[i];
        }
        period += delta[n];
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::Convergence("period escaped to nonsense".into()));
        }
    }
    Err(Error::Convergence(format!(
        "shooting stalled at residual {best_res:e}"
    )))
}

/// Continue a converged orbit in amplitude: secant predictor plus corrector,
/// halving the step on failure until the budget is exhausted.
pub fn continue_family(
    field: &dyn VectorField,
    seed: &PeriodicOrbit,
    center: &DVector<f64>,
    direction: &DVector<f64>,
    steps: usize,
    d_amplitude: f64,
    ctrl: &ShootingControl,
) -> Result<Vec<PeriodicOrbit>> {
    let mut branch = vec![seed.clone()];
    let mut da = d_amplitude;
    while branch.len() < steps + 1 {
        let last = branch.last().unwrap();
        let target = last.amplitude + da;
        // secant prediction through the last two orbits
        let (sp, tp) = if branch.len() >= 2 {
            let prev = &branch[branch.len() - 2];
            let ratio = if (last.amplitude - prev.amplitude).abs() > 1e-300 {
                da / (last.amplitude - prev.amplitude)
            } else {
                1.0
            };
            let s_last = DVector::from_column_slice(&last.state0);
            let s_prev = DVector::from_column_slice(&prev.state0);
            (
                &s_last + (&s_last - &s_prev) * ratio,
                last.period + (last.period - prev.period) * ratio,
            )
        } else {
            (
                DVector::from_column_slice(&last.state0) + direction * da,
                last.period,
            )
        };
        match shoot_periodic(
            field,
            &sp,
            tp,
            center,
            direction,
            target,
            last.family.clone(),
            ctrl,
        ) {
            Ok(orbit) => {
                branch.push(orbit);
            }
            Err(_) if da.abs() > d_amplitude.abs() / 16.0 => {
                da *= 0.5;
            }
            Err(e) => {
                return if branch.len() > 1 {
                    Ok(branch)
                } else {
                    Err(Error::ContinuationEnd(format!("{e}")))
                };
            }
        }
    }
    Ok(branch)
}

/// Frame-angle increment over a recorded trajectory, by Simpson quadrature
/// of theta-dot between the stored samples.
pub fn reconstruct_theta(dynamics: &ReducedDynamics, path: &[(f64, DVector<f64>)]) -> f64 {
    let mut theta = 0.0;
    for w in path.windows(2) {
        let (t0, s0) = &w[0];
        let (t1, s1) = &w[1];
        let h = t1 - t0;
        let mid = (s0 + s1) * 0.5;
        let f0 = dynamics.theta_dot(s0);
        let fm = dynamics.theta_dot(&mid);
        let f1 = dynamics.theta_dot(s1);
        theta += h / 6.0 * (f0 + 4.0 * fm + f1);
    }
    theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Harmonic oscillator for integrator checks.
    struct Sho;
    impl VectorField for Sho {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![s[1], -s[0]]))
        }
        fn energy(&self, s: &DVector<f64>) -> Result<f64> {
            Ok(0.5 * (s[0] * s[0] + s[1] * s[1]))
        }
    }

    #[test]
    fn rk78_hits_machine_precision() {
        let s0 = DVector::from_vec(vec![1.0, 0.0]);
        let ctrl = StepControl::default();
        let s = integrate(&Sho, &s0, 2.0 * std::f64::consts::PI, &ctrl).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-11, "period error {}", (s[0] - 1.0).abs());
        assert!(s[1].abs() < 1e-11);
    }

    #[test]
    fn rk78_order_is_high() {
        // fixed-step error should fall by ~2^8 when halving h
        let s0 = DVector::from_vec(vec![1.0, 0.0]);
        let exact = 1.0f64.cos();
        let run = |h: f64| {
            let mut s = s0.clone();
            let n = (1.0 / h) as usize;
            for _ in 0..n {
                s = rk78_step(&Sho, &s, h).unwrap().0;
            }
            (s[0] - exact).abs()
        };
        let e1 = run(0.05);
        let e2 = run(0.025);
        let order = (e1 / e2).log2();
        assert!(order > 6.5, "observed order {order}");
    }

    #[test]
    fn symplectic_energy_stays_bounded() {
        let s0 = DVector::from_vec(vec![1.0, 0.0]);
        let e0 = Sho.energy(&s0).unwrap();
        let s = integrate_symplectic(&Sho, &s0, 200.0 * std::f64::consts::PI, 20000).unwrap();
        let drift = (Sho.energy(&s).unwrap() - e0).abs();
        assert!(drift < 1e-9, "symplectic drift {drift}");
    }

    #[test]
    fn time_reversal() {
        let ctrl = StepControl::default();
        let s0 = DVector::from_vec(vec![0.3, -0.2]);
        let fwd = integrate(&Sho, &s0, 7.3, &ctrl).unwrap();
        let back = integrate(&Sho, &fwd, -7.3, &ctrl).unwrap();
        assert!((&back - &s0).amax() < 1e-10);
    }

    #[test]
    fn sho_shooting_and_floquet() {
        let ctrl = ShootingControl::default();
        let center = DVector::zeros(2);
        let dir = DVector::from_vec(vec![1.0, 0.0]);
        let guess = DVector::from_vec(vec![0.5, 0.0]);
        let orbit = shoot_periodic(
            &Sho,
            &guess,
            6.0,
            &center,
            &dir,
            0.5,
            Family::Lyapunov(0),
            &ctrl,
        )
        .unwrap();
        assert_relative_eq!(orbit.period, 2.0 * std::f64::consts::PI, epsilon = 1e-9);
        assert!(orbit.residual < 1e-10);
        // all multipliers at 1 for the 1-dof oscillator
        for (re, im) in &orbit.floquet {
            assert_relative_eq!(re.hypot(*im), 1.0, epsilon = 1e-8);
        }
        let prod: f64 = orbit.floquet.iter().map(|(re, im)| re.hypot(*im)).product();
        assert_relative_eq!(prod, 1.0, epsilon = 1e-8);
    }
}
