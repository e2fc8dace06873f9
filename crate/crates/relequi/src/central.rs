//! Central configurations and their eigenstructure: the Lagrange equilateral
//! and Euler collinear three-body solutions. (Euler-Moulton N-body solutions
//! live in `collinear`.)

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::masses::MassSystem;
use crate::potential::{self, mass_dot, mass_norm, perp};

/// Which family a solved configuration belongs to.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum ConfigKind {
    Lagrange { beta: f64, alpha: f64 },
    Euler3 { sigma: f64, kappa: f64 },
    Collinear,
}

/// A planar central configuration with the eigenframe of the linearized
/// gradient map. Eigenvectors are stored in the paper's order
/// E1 = (1,0,...,1,0), E2 = E1-perp, E3 = r, E4 = r-perp, then the
/// shape directions E5..E_{2N} normalized to unit mass norm.
#[derive(Debug, Clone, Serialize)]
pub struct CentralConfig {
    pub points: Vec<f64>,
    pub lambda: f64,
    pub inertia: f64,
    pub g3: f64,
    pub eigvals: Vec<f64>,
    pub eigvecs: Vec<Vec<f64>>,
    pub gs: Vec<f64>,
    pub kind: ConfigKind,
}

/// Residual tolerance demanded of every returned configuration.
pub const SOLVER_TOL: f64 = 1e-12;

impl CentralConfig {
    pub fn n(&self) -> usize {
        self.points.len() / 2
    }

    pub fn points_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.points)
    }

    pub fn eigvec(&self, k: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.eigvecs[k])
    }

    /// Unit (mass-norm) eigenvector.
    pub fn eigvec_hat(&self, k: usize) -> DVector<f64> {
        let v = self.eigvec(k);
        &v / self.gs[k].sqrt()
    }

    /// Max-norm residual of the central configuration equation
    /// grad U + lambda r = 0.
    pub fn residual(&self, m: &MassSystem) -> Result<f64> {
        let r = self.points_vec();
        let g = potential::mass_gradient(m, &r)?;
        Ok((g + self.lambda * &r).amax())
    }

    /// Rescale the configuration; `lambda` scales as s^-3, the shape
    /// eigenvalues as s^-2 and the unit eigenvectors are unchanged.
    pub fn scaled(&self, target: ScaleTarget) -> CentralConfig {
        let s = match target {
            ScaleTarget::UnitNorm => 1.0 / self.inertia.sqrt(),
            ScaleTarget::UnitLambda => self.lambda.powf(1.0 / 3.0),
        };
        let mut c = self.clone();
        for p in &mut c.points {
            *p *= s;
        }
        c.lambda = self.lambda / (s * s * s);
        c.inertia = self.inertia * s * s;
        c.g3 = c.inertia;
        // D scales like s^-2 overall: I^{1/2} lambda -> s * s^-3 = s^-2
        for v in &mut c.eigvals {
            *v /= s * s;
        }
        // E3 = r and E4 = r-perp carry the scale; E1, E2 and the unit
        // shape vectors do not.
        for p in &mut c.eigvecs[2] {
            *p *= s;
        }
        for p in &mut c.eigvecs[3] {
            *p *= s;
        }
        c.gs[2] = c.inertia;
        c.gs[3] = c.inertia;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScaleTarget {
    UnitNorm,
    UnitLambda,
}

/// The linearization of grad U at the configuration:
/// D = I^{1/2} (lambda Id + M^-1 B) - 3 I^{-1/2} lambda E3 E3^T M.
pub fn hessian_gradient_map(m: &MassSystem, c: &CentralConfig) -> Result<DMatrix<f64>> {
    let n2 = 2 * m.n();
    let r = c.points_vec();
    let b = potential::hessian(m, &r)?;
    let mut minv_b = b;
    for i in 0..n2 {
        let mi = m.mass(i / 2);
        for j in 0..n2 {
            minv_b[(i, j)] /= mi;
        }
    }
    let i_sqrt = c.inertia.sqrt();
    let mut d = minv_b;
    for i in 0..n2 {
        d[(i, i)] += c.lambda;
    }
    d *= i_sqrt;
    let coef = 3.0 / i_sqrt * c.lambda;
    for i in 0..n2 {
        for j in 0..n2 {
            d[(i, j)] -= coef * r[i] * r[j] * m.mass(j / 2);
        }
    }
    Ok(d)
}

/// Eigenpairs of D restricted to the mass-metric orthogonal complement of
/// span{E1, E2, E3, E4}, sorted ascending. Restricting first keeps the
/// split exact even when a shape eigenvalue collides with a trivial one.
fn shape_eigenpairs(
    m: &MassSystem,
    d: &DMatrix<f64>,
    frame: &[DVector<f64>; 4],
) -> (Vec<f64>, Vec<DVector<f64>>) {
    let n2 = d.nrows();
    // mass-orthonormal basis of the complement, grown from coordinate vectors
    let mut basis: Vec<DVector<f64>> = frame
        .iter()
        .map(|e| {
            let nrm = mass_norm(m, e);
            e / nrm
        })
        .collect();
    let mut complement: Vec<DVector<f64>> = Vec::new();
    for i in 0..n2 {
        if complement.len() == n2 - 4 {
            break;
        }
        let mut v = DVector::zeros(n2);
        v[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = mass_dot(m, b, &v);
                v -= c * b;
            }
        }
        let nrm = mass_norm(m, &v);
        if nrm > 1e-8 {
            v /= nrm;
            basis.push(v.clone());
            complement.push(v);
        }
    }
    let k = complement.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        let dwi = d * &complement[i];
        for j in 0..k {
            g[(i, j)] = mass_dot(m, &complement[j], &dwi);
        }
    }
    let g = (&g + g.transpose()) * 0.5;
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for &c in &order {
        vals.push(eig.eigenvalues[c]);
        let mut v = DVector::zeros(n2);
        for i in 0..k {
            v += eig.eigenvectors[(i, c)] * &complement[i];
        }
        let nrm = mass_norm(m, &v);
        v /= nrm;
        fix_sign(&mut v);
        vecs.push(v);
    }
    (vals, vecs)
}

/// Sign convention: first component of magnitude above 1e-9 is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    for i in 0..v.len() {
        if v[i].abs() > 1e-9 {
            if v[i] < 0.0 {
                *v = -v.clone();
            }
            return;
        }
    }
}

fn frame_vectors(n: usize, r: &DVector<f64>) -> [DVector<f64>; 4] {
    let mut e1 = DVector::zeros(2 * n);
    let mut e2 = DVector::zeros(2 * n);
    for k in 0..n {
        e1[2 * k] = 1.0;
        e2[2 * k + 1] = 1.0;
    }
    [e1, e2, r.clone(), perp(r)]
}

/// Assemble a CentralConfig from a solved configuration vector, pulling the
/// shape eigenpairs (E5..E_{2N}) out of the D matrix. `pair_order` selects
/// the paper's per-family index convention for the shape pairs.
fn assemble(
    m: &MassSystem,
    r: DVector<f64>,
    kind: ConfigKind,
) -> Result<CentralConfig> {
    let n = m.n();
    let inertia = mass_dot(m, &r, &r);
    let u = potential::value(m, &r)?;
    let lambda = u / inertia;
    let [e1, e2, e3, e4] = frame_vectors(n, &r);

    let mut cfg = CentralConfig {
        points: r.as_slice().to_vec(),
        lambda,
        inertia,
        g3: inertia,
        eigvals: vec![inertia.sqrt() * lambda, inertia.sqrt() * lambda, 0.0, 0.0],
        eigvecs: vec![
            e1.as_slice().to_vec(),
            e2.as_slice().to_vec(),
            e3.as_slice().to_vec(),
            e4.as_slice().to_vec(),
        ],
        gs: vec![m.total(), m.total(), inertia, inertia],
        kind,
    };

    let d = hessian_gradient_map(m, &cfg)?;
    let frame = [e1, e2, e3, e4];
    let (vals, vecs) = shape_eigenpairs(m, &d, &frame);
    let mut shape: Vec<(f64, DVector<f64>)> = vals.into_iter().zip(vecs).collect();
    if shape.len() != 2 * n - 4 {
        return Err(Error::Classification(format!(
            "expected {} shape eigenpairs, found {}",
            2 * n - 4,
            shape.len()
        )));
    }

    match cfg.kind {
        ConfigKind::Lagrange { .. } => {
            // ascending (lambda5 <= lambda6), E6 = E5-perp
            shape.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (l5, v5) = shape[0].clone();
            let l6 = shape[1].0;
            let mut v6 = perp(&v5);
            fix_sign(&mut v6);
            cfg.eigvals.extend([l5, l6]);
            cfg.eigvecs.push(v5.as_slice().to_vec());
            cfg.eigvecs.push(v6.as_slice().to_vec());
            cfg.gs.extend([1.0, 1.0]);
        }
        ConfigKind::Euler3 { .. } | ConfigKind::Collinear => {
            // collinear pairing: odd index carries the large eigenvalue
            // lambda_{2k-1} > 3 sqrt(g3) lambda, its partner is the perp
            // vector with lambda_{2k} = (3 sqrt(g3) lambda - lambda_{2k-1})/2
            let bound = 3.0 * inertia.sqrt() * lambda;
            let mut large: Vec<(f64, DVector<f64>)> = shape
                .iter()
                .filter(|(v, _)| *v > bound - 1e-9)
                .cloned()
                .collect();
            large.sort_by(|a, b| a.0.total_cmp(&b.0));
            if large.len() != n - 2 {
                return Err(Error::Classification(format!(
                    "expected {} eigenvalues above 3 sqrt(g3) lambda, found {}",
                    n - 2,
                    large.len()
                )));
            }
            for (lk, vk) in large {
                let partner = 0.5 * (bound - lk);
                let mut vperp = perp(&vk);
                fix_sign(&mut vperp);
                cfg.eigvals.extend([lk, partner]);
                cfg.eigvecs.push(vk.as_slice().to_vec());
                cfg.eigvecs.push(vperp.as_slice().to_vec());
                cfg.gs.extend([1.0, 1.0]);
            }
        }
    }

    let res = cfg.residual(m)?;
    if res > SOLVER_TOL {
        return Err(Error::Convergence(format!(
            "central configuration residual {res:e}"
        )));
    }
    Ok(cfg)
}

/// The Lagrange (equilateral) central configuration with ||r|| = 1, for
/// masses normalized to unit total.
pub fn solve_lagrange(m: &MassSystem) -> Result<CentralConfig> {
    if m.n() != 3 {
        return Err(Error::Mass("Lagrange solver needs exactly 3 bodies".into()));
    }
    let m = m.normalized_to_unit_total();
    let (m1, m2, m3) = (m.mass(0), m.mass(1), m.mass(2));
    let beta = m1 * m2 + m2 * m3 + m1 * m3;
    let sb = beta.sqrt();
    let sq3 = 3.0f64.sqrt();
    let r = DVector::from_vec(vec![
        -sq3 * m3 / (2.0 * sb),
        (2.0 * m2 + m3) / (2.0 * sb),
        -sq3 * m3 / (2.0 * sb),
        -(2.0 * m1 + m3) / (2.0 * sb),
        sq3 * (m1 + m2) / (2.0 * sb),
        -(m1 - m2) / (2.0 * sb),
    ]);
    let alpha = (1.0 - 3.0 * beta).max(0.0).sqrt();
    assemble(&m, r, ConfigKind::Lagrange { beta, alpha })
}

/// Collinear three-body configuration for the given left-to-right ordering
/// of body indices, normalized to I = 1. Solves for the paper's (sigma,
/// kappa) parameters of the permuted masses.
pub fn solve_euler3(m: &MassSystem, ordering: [usize; 3]) -> Result<CentralConfig> {
    if m.n() != 3 {
        return Err(Error::Mass("Euler solver needs exactly 3 bodies".into()));
    }
    let mp = m.normalized_to_unit_total().permuted(&ordering)?;
    let (m1, m2, m3) = (mp.mass(0), mp.mass(1), mp.mass(2));

    // I = 1 pins kappa as a function of sigma
    let kappa = |s: f64| {
        1.0 / (m1 * m2 * (s + 0.5).powi(2) + m2 * m3 * (s - 0.5).powi(2) + m1 * m3).sqrt()
    };
    let positions = |s: f64| {
        let k = kappa(s);
        [
            -k * (m2 * (s + 0.5) + m3),
            k * (m1 * (s + 0.5) + m3 * (s - 0.5)),
            k * (m2 * (0.5 - s) + m1),
        ]
    };
    // scalar residual: first central-configuration equation
    let f = |s: f64| {
        let xi = positions(s);
        let r12 = xi[1] - xi[0];
        let r13 = xi[2] - xi[0];
        let r23 = xi[2] - xi[1];
        let u = m1 * m2 / r12 + m1 * m3 / r13 + m2 * m3 / r23;
        let lam = u; // I = 1
        m2 * (xi[1] - xi[0]) / r12.powi(3) + m3 * (xi[2] - xi[0]) / r13.powi(3) + lam * xi[0]
    };

    // bracket the root on (-1/2, 1/2), then bisect + Newton polish
    let grid = 4000;
    let lo = -0.5 + 1e-6;
    let hi = 0.5 - 1e-6;
    let mut bracket = None;
    let mut prev = f(lo);
    for i in 1..=grid {
        let s = lo + (hi - lo) * i as f64 / grid as f64;
        let v = f(s);
        if prev == 0.0 || prev * v < 0.0 {
            bracket = Some((lo + (hi - lo) * (i - 1) as f64 / grid as f64, s));
            break;
        }
        prev = v;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::Convergence("no sign change for the Euler configuration".into())
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(a) * f(mid) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    let mut sigma = 0.5 * (a + b);
    for _ in 0..8 {
        let h = 1e-7;
        let df = (f(sigma + h) - f(sigma - h)) / (2.0 * h);
        if df.abs() < 1e-300 {
            break;
        }
        sigma -= f(sigma) / df;
    }
    let kap = kappa(sigma);
    let xi = positions(sigma);

    // permute bodies back to the input mass order
    let mut pts = vec![0.0; 6];
    for (slot, &body) in ordering.iter().enumerate() {
        pts[2 * body] = xi[slot];
    }
    let r = DVector::from_column_slice(&pts);
    assemble(
        &m.normalized_to_unit_total(),
        r,
        ConfigKind::Euler3 { sigma, kappa: kap },
    )
}

/// The paper's admissibility window for the (sigma, kappa) parameters of an
/// Euler configuration: sigma = 0 and kappa > 2, or f_k(|sigma|) < kappa^2 <
/// g_k(|sigma|).
pub fn euler3_admissible(sigma: f64, kappa: f64) -> bool {
    let s = sigma.abs();
    if s < 1e-9 {
        return kappa > 2.0;
    }
    let p = -16.0 * s.powi(4) + 40.0 * s * s + 7.0;
    let f = -4.0 * p * p / ((4.0 * s * s - 1.0).powi(3) * (16.0 * s.powi(4) - 8.0 * s * s + 49.0));
    let g = -p * p
        / (4.0
            * s
            * (2.0 * s - 1.0).powi(3)
            * (16.0 * s.powi(4) + 32.0 * s.powi(3) + 40.0 * s * s + 24.0 * s + 21.0));
    let k2 = kappa * kappa;
    f < k2 && k2 < g
}

/// Explicit eigendata of the Euler configuration: lambda6 as a closed form
/// in (sigma, kappa), lambda5 = 3 lambda - 2 lambda6.
pub fn euler3_lambda6(sigma: f64, kappa: f64) -> f64 {
    (-64.0 * sigma.powi(4) + 160.0 * sigma * sigma + 28.0)
        / (kappa.powi(5) * (4.0 * sigma * sigma - 1.0).powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn msys(masses: &[f64]) -> MassSystem {
        MassSystem::new(masses.to_vec()).unwrap()
    }

    #[test]
    fn lagrange_equal_masses() {
        let m = msys(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        let c = solve_lagrange(&m).unwrap();
        let beta: f64 = 1.0 / 3.0;
        assert_relative_eq!(c.lambda, beta.powf(1.5), epsilon = 1e-14);
        assert_relative_eq!(c.inertia, 1.0, epsilon = 1e-13);
        // alpha = 0 forces lambda5 = lambda6 = (3/2) beta^{3/2}
        assert_relative_eq!(c.eigvals[4], 1.5 * beta.powf(1.5), epsilon = 1e-12);
        assert_relative_eq!(c.eigvals[5], 1.5 * beta.powf(1.5), epsilon = 1e-12);
    }

    #[test]
    fn lagrange_heavy_primary() {
        let m = msys(&[0.98, 0.01, 0.01]);
        let c = solve_lagrange(&m).unwrap();
        let beta = 0.0197f64;
        let alpha = (1.0 - 3.0 * beta).sqrt();
        assert_relative_eq!(c.lambda, beta.powf(1.5), epsilon = 1e-13);
        assert_relative_eq!(
            c.eigvals[4],
            1.5 * (1.0 - alpha) * beta.powf(1.5),
            max_relative = 1e-11
        );
        assert_relative_eq!(
            c.eigvals[5],
            1.5 * (1.0 + alpha) * beta.powf(1.5),
            max_relative = 1e-11
        );
        // construction constraints: unit E3, mass-orthogonal frame
        assert_relative_eq!(c.g3, 1.0, epsilon = 1e-13);
        let e5 = c.eigvec(4);
        let e6 = c.eigvec(5);
        assert!(mass_dot(&m.normalized_to_unit_total(), &e5, &e6).abs() < 1e-12);
    }

    #[test]
    fn lagrange_explicit_e5_direction() {
        // the printed closed form for E5, up to sign and normalization
        let m = msys(&[0.98, 0.01, 0.01]);
        let (m1, m2, m3) = (0.98, 0.01, 0.01);
        let c = solve_lagrange(&m).unwrap();
        let alpha = (1.0f64 - 3.0 * 0.0197).sqrt();
        let sq3 = 3.0f64.sqrt();
        let raw = DVector::from_vec(vec![
            m3 * (m1 - m3) / m1,
            m3 * (3.0 * m2 - 2.0 * alpha - 1.0) / (sq3 * m1),
            m3 * (m2 - alpha - m1) / m2,
            m3 * (alpha + 3.0 * m3 - 1.0) / (sq3 * m2),
            alpha - m2 + m3,
            (alpha + 3.0 * m1 - 1.0) / sq3,
        ]);
        let mn = mass_norm(&m.normalized_to_unit_total(), &raw);
        let e5 = c.eigvec(4);
        let d = (&e5 - &raw / mn).amax().min((&e5 + &raw / mn).amax());
        assert!(d < 1e-10, "explicit E5 deviates by {d}");
    }

    #[test]
    fn hessian_map_annihilates_rotation_directions() {
        let m = msys(&[0.5, 0.3, 0.2]);
        let c = solve_lagrange(&m).unwrap();
        let d = hessian_gradient_map(&m.normalized_to_unit_total(), &c).unwrap();
        let e3 = c.eigvec(2);
        let e4 = c.eigvec(3);
        assert!((&d * &e3).amax() < 1e-12);
        assert!((&d * &e4).amax() < 1e-12);
        let e1 = c.eigvec(0);
        let expect = c.inertia.sqrt() * c.lambda;
        assert!((&d * &e1 - expect * &e1).amax() < 1e-12);
    }

    #[test]
    fn euler_equal_masses_is_symmetric() {
        let m = msys(&[1.0, 1.0, 1.0]);
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let ConfigKind::Euler3 { sigma, kappa } = c.kind else {
            panic!("wrong kind")
        };
        assert!(sigma.abs() < 1e-12, "sigma = {sigma}");
        assert!(kappa > 2.0);
        assert!(euler3_admissible(sigma, kappa));
        assert_relative_eq!(c.inertia, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn euler_eigenvalue_identities() {
        let m = msys(&[0.5, 0.3, 0.2]);
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let ConfigKind::Euler3 { sigma, kappa } = c.kind else {
            panic!("wrong kind")
        };
        assert!(euler3_admissible(sigma, kappa));
        let l6 = euler3_lambda6(sigma, kappa);
        let l5 = 3.0 * c.lambda - 2.0 * l6;
        assert_relative_eq!(c.eigvals[4], l5, max_relative = 1e-10);
        assert_relative_eq!(c.eigvals[5], l6, max_relative = 1e-10);
        // pairing identity lambda5 + 2 lambda6 = 3 lambda at I = 1
        assert_relative_eq!(
            c.eigvals[4] + 2.0 * c.eigvals[5],
            3.0 * c.lambda,
            epsilon = 1e-12
        );
    }

    #[test]
    fn euler_explicit_e5() {
        let m = msys(&[0.5, 0.3, 0.2]);
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let ConfigKind::Euler3 { sigma, kappa } = c.kind else {
            panic!("wrong kind")
        };
        let mn = m.normalized_to_unit_total();
        let (m1, m2, m3) = (mn.mass(0), mn.mass(1), mn.mass(2));
        let raw = DVector::from_vec(vec![
            (m2 * m3 / m1).sqrt() * kappa * (0.5 - sigma),
            0.0,
            -(m1 * m3 / m2).sqrt() * kappa,
            0.0,
            (m1 * m2 / m3).sqrt() * kappa * (sigma + 0.5),
            0.0,
        ]);
        let nrm = mass_norm(&mn, &raw);
        let e5 = c.eigvec(4);
        let d = (&e5 - &raw / nrm).amax().min((&e5 + &raw / nrm).amax());
        assert!(d < 1e-9, "explicit E5 deviates by {d}");
    }

    #[test]
    fn scaling_is_consistent() {
        let m = msys(&[0.7, 0.2, 0.1]);
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let cs = c.scaled(ScaleTarget::UnitLambda);
        assert_relative_eq!(cs.lambda, 1.0, epsilon = 1e-12);
        assert!(cs.residual(&m.normalized_to_unit_total()).unwrap() < 1e-12);
        // scale-invariant ratios
        for k in 4..6 {
            assert_relative_eq!(
                c.eigvals[k] / (c.g3.sqrt() * c.lambda),
                cs.eigvals[k] / (cs.g3.sqrt() * cs.lambda),
                max_relative = 1e-12
            );
        }
        // idempotence of unit-norm scaling
        let u1 = c.scaled(ScaleTarget::UnitNorm);
        let u2 = u1.scaled(ScaleTarget::UnitNorm);
        assert_relative_eq!(u1.inertia, u2.inertia, epsilon = 1e-14);
    }
}
