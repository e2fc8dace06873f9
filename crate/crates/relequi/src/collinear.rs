//! Euler-Moulton collinear central configurations of N bodies: the Newton
//! solver on the line (with the D matrix as analytic Jacobian), the 1-D
//! spectrum (iota_k, e_k), the lift to planar eigendata, and the
//! perturbation-cascade asymptotics used as cross-check oracles.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::central::{fix_sign, CentralConfig, ConfigKind, SOLVER_TOL};
use crate::error::{Error, Result};
use crate::masses::MassSystem;
use crate::potential::perp;

/// Spectrum of the matrix D of the 1-D problem with respect to the mass
/// metric <u, v> = sum m_k u_k v_k.
#[derive(Debug, Clone, Serialize)]
pub struct CollinearSpectrum {
    /// Eigenvalues iota_1 <= ... <= iota_N (iota_1 = 1, iota_2 = 3).
    pub iotas: Vec<f64>,
    /// Mass-metric orthonormal eigenvectors, sign-fixed.
    pub evecs: Vec<Vec<f64>>,
    /// The N x N matrix D itself (row-major).
    pub matrix: Vec<Vec<f64>>,
}

/// The matrix D: Jacobian of the collinear central-configuration equations
/// at lambda = 1; also the linearization of the 1-D gradient map.
pub fn d_matrix(m: &MassSystem, xi: &DVector<f64>) -> DMatrix<f64> {
    let n = m.n();
    let mut d = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if j == k {
                continue;
            }
            let r3 = (xi[j] - xi[k]).abs().powi(3);
            d[(k, j)] = -2.0 * m.mass(j) / r3;
            diag += 2.0 * m.mass(j) / r3;
        }
        d[(k, k)] = diag;
    }
    d
}

fn residual(m: &MassSystem, xi: &DVector<f64>) -> DVector<f64> {
    let n = m.n();
    let mut f = DVector::zeros(n);
    for k in 0..n {
        let mut acc = xi[k];
        for j in 0..n {
            if j == k {
                continue;
            }
            let d = xi[j] - xi[k];
            acc += m.mass(j) * d / d.abs().powi(3);
        }
        f[k] = acc;
    }
    f
}

fn is_ordered(xi: &DVector<f64>) -> bool {
    xi.as_slice().windows(2).all(|w| w[0] < w[1])
}

/// Initial guess for the Newton solve. For a strongly decreasing mass
/// cascade the spacings follow the perturbation expansion
/// r_{k,k+1} ~ c_k m_k^{1/3}, c_k = 3^{-(k-1)/3}; otherwise bodies start
/// equally spaced.
fn initial_guess(m: &MassSystem) -> DVector<f64> {
    let n = m.n();
    let cascade = (1..n).all(|k| m.mass(k) <= 1e-2 * m.mass(k - 1));
    let mut xi = DVector::zeros(n);
    if cascade && n >= 2 {
        // r_{12} = (m1 + m2)^{1/3}; r_{k,k+1} = 3^{-(k-1)/3} m_k^{1/3}
        xi[1] = xi[0] + (m.mass(0) + m.mass(1)).powf(1.0 / 3.0);
        for k in 2..n {
            let c = 3f64.powf(-((k - 1) as f64) / 3.0);
            let gap = c * m.mass(k - 1).powf(1.0 / 3.0);
            xi[k] = xi[k - 1] + gap.max(1e-8);
        }
    } else {
        let spacing = m.total().powf(1.0 / 3.0);
        for k in 0..n {
            xi[k] = spacing * (k as f64 - 0.5 * (n as f64 - 1.0));
        }
    }
    // shift to the center of mass
    let com: f64 = (0..n).map(|k| m.mass(k) * xi[k]).sum::<f64>() / m.total();
    for k in 0..n {
        xi[k] -= com;
    }
    xi
}

/// Solve the ordered collinear configuration (xi_1 < ... < xi_N) with the
/// convention lambda = 1, by damped Newton with the analytic Jacobian D.
pub fn solve_collinear(m: &MassSystem) -> Result<(CentralConfig, CollinearSpectrum)> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Mass("need at least two bodies".into()));
    }
    let mut xi = initial_guess(m);
    let mut retries = 0usize;
    let mut f = residual(m, &xi);
    for _ in 0..200 {
        if f.amax() < 1e-14 {
            break;
        }
        let d = d_matrix(m, &xi);
        let step = d
            .lu()
            .solve(&f)
            .ok_or_else(|| Error::Convergence("singular D matrix in Newton step".into()))?;
        // line-search damping; reject steps that break the ordering
        let mut alpha = 1.0;
        let f0 = f.norm();
        loop {
            let cand = &xi + alpha * &step;
            if is_ordered(&cand) {
                let fc = residual(m, &cand);
                if fc.norm() < f0 || alpha < 1e-4 {
                    xi = cand;
                    f = fc;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                retries += 1;
                if retries > 3 {
                    return Err(Error::Order(
                        "Newton iteration kept violating the line ordering".into(),
                    ));
                }
                break;
            }
        }
    }
    if f.amax() > SOLVER_TOL {
        return Err(Error::Convergence(format!(
            "collinear residual {:e}",
            f.amax()
        )));
    }

    // 1-D spectrum of D in the mass metric
    let d = d_matrix(m, &xi);
    let mut s = d.clone();
    for i in 0..n {
        let mi = m.mass(i).sqrt();
        for j in 0..n {
            s[(i, j)] *= mi / m.mass(j).sqrt();
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut iotas = Vec::with_capacity(n);
    let mut evecs = Vec::with_capacity(n);
    for &k in &order {
        iotas.push(eig.eigenvalues[k]);
        let mut v = DVector::from_iterator(
            n,
            (0..n).map(|i| eig.eigenvectors[(i, k)] / m.mass(i).sqrt()),
        );
        let nrm = (0..n)
            .map(|i| m.mass(i) * v[i] * v[i])
            .sum::<f64>()
            .sqrt();
        v /= nrm;
        fix_sign(&mut v);
        evecs.push(v);
    }

    let spectrum = CollinearSpectrum {
        iotas: iotas.clone(),
        evecs: evecs.iter().map(|v| v.as_slice().to_vec()).collect(),
        matrix: (0..n)
            .map(|i| (0..n).map(|j| d[(i, j)]).collect())
            .collect(),
    };

    // lift to the plane: bodies on the x-axis
    let mut pts = DVector::zeros(2 * n);
    for k in 0..n {
        pts[2 * k] = xi[k];
    }
    let inertia: f64 = (0..n).map(|k| m.mass(k) * xi[k] * xi[k]).sum();
    let lambda = 1.0;
    let g3 = inertia;

    let mut e1 = DVector::zeros(2 * n);
    let mut e2 = DVector::zeros(2 * n);
    for k in 0..n {
        e1[2 * k] = 1.0;
        e2[2 * k + 1] = 1.0;
    }
    let e3 = pts.clone();
    let e4 = perp(&e3);

    let mut cfg = CentralConfig {
        points: pts.as_slice().to_vec(),
        lambda,
        inertia,
        g3,
        eigvals: vec![g3.sqrt() * lambda, g3.sqrt() * lambda, 0.0, 0.0],
        eigvecs: vec![
            e1.as_slice().to_vec(),
            e2.as_slice().to_vec(),
            e3.as_slice().to_vec(),
            e4.as_slice().to_vec(),
        ],
        gs: vec![m.total(), m.total(), inertia, inertia],
        kind: ConfigKind::Collinear,
    };

    // planar eigendata from the 1-D spectrum: for k = 3..N,
    // lambda_{2k-1} = sqrt(g3) iota_k, lambda_{2k} = (3 - iota_k)/2 sqrt(g3),
    // E_{2k-1} = interleaved e_k, E_{2k} = its perp.
    for k in 2..n {
        let iota = iotas[k];
        let mut v = DVector::zeros(2 * n);
        for i in 0..n {
            v[2 * i] = evecs[k][i];
        }
        let mut vp = perp(&v);
        fix_sign(&mut vp);
        cfg.eigvals.push(g3.sqrt() * iota * lambda);
        cfg.eigvals.push(0.5 * (3.0 - iota) * g3.sqrt() * lambda);
        cfg.eigvecs.push(v.as_slice().to_vec());
        cfg.eigvecs.push(vp.as_slice().to_vec());
        cfg.gs.push(1.0);
        cfg.gs.push(1.0);
    }

    let res = cfg.residual(m)?;
    if res > SOLVER_TOL {
        return Err(Error::Convergence(format!(
            "lifted configuration residual {res:e}"
        )));
    }
    Ok((cfg, spectrum))
}

/// Perturbation-cascade prediction for iota_n: exact 1 and 3 for n = 1, 2,
/// and 3^{n-1} (1 - (4/3) c2 eps1^{1/3}) + O(eps1^{2/3}) for n >= 3, with
/// c2 = 3^{-1/3} and eps1 the second mass. Cross-check oracle only.
pub fn asymptotic_iota(n: usize, eps: &[f64]) -> f64 {
    match n {
        0 => f64::NAN,
        1 => 1.0,
        2 => 3.0,
        _ => {
            let c2 = 3f64.powf(-1.0 / 3.0);
            let eps1 = eps.first().copied().unwrap_or(0.0);
            3f64.powi(n as i32 - 1) * (1.0 - 4.0 / 3.0 * c2 * eps1.powf(1.0 / 3.0))
        }
    }
}

/// c_{n+1} = 3^{-n/3}: the cascade spacing constants.
pub fn cascade_constant(n: usize) -> f64 {
    3f64.powf(-(n as f64) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_body_exact() {
        let m = MassSystem::new(vec![1.0, 1.0]).unwrap();
        let (cfg, spec) = solve_collinear(&m).unwrap();
        let r12 = cfg.points[2] - cfg.points[0];
        assert_relative_eq!(r12, 2f64.powf(1.0 / 3.0), epsilon = 1e-13);
        assert_relative_eq!(spec.iotas[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(spec.iotas[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn two_body_small_mass_expansion() {
        // r12 = (1 + eps)^{1/3} = 1 + eps/3 + O(eps^2)
        let eps = 1e-4;
        let m = MassSystem::new(vec![1.0, eps]).unwrap();
        let (cfg, _) = solve_collinear(&m).unwrap();
        let r12 = cfg.points[2] - cfg.points[0];
        assert!((r12 - (1.0 + eps / 3.0)).abs() < eps * eps);
    }

    #[test]
    fn restricted_three_body_iota3() {
        // m = (1, eps, 0): iota3 = 9 - 12 c2 eps^{1/3} + O(eps^{2/3})
        let eps = 1e-6;
        let m = MassSystem::new_restricted(vec![1.0, eps, 0.0]).unwrap();
        let (_, spec) = solve_collinear(&m).unwrap();
        let c2 = 3f64.powf(-1.0_f64 / 3.0);
        let predicted = 9.0 - 12.0 * c2 * eps.powf(1.0 / 3.0);
        let err = (spec.iotas[2] - predicted).abs();
        assert!(
            err < 30.0 * eps.powf(2.0 / 3.0),
            "iota3 = {}, predicted {predicted}, err {err}",
            spec.iotas[2]
        );
    }

    #[test]
    fn iotas_positive_and_increasing() {
        let m = MassSystem::new(vec![1.0, 0.8, 0.5, 0.2]).unwrap();
        let (_, spec) = solve_collinear(&m).unwrap();
        for w in spec.iotas.windows(2) {
            assert!(w[0] > 0.0 && w[0] < w[1]);
        }
    }

    #[test]
    fn pairing_identity() {
        // lambda_{2k-1} + 2 lambda_{2k} = 3 sqrt(g3) lambda for k >= 3
        let m = MassSystem::new(vec![1.0, 0.3, 0.7, 0.1]).unwrap();
        let (cfg, _) = solve_collinear(&m).unwrap();
        let bound = 3.0 * cfg.g3.sqrt() * cfg.lambda;
        for k in 2..m.n() {
            let l_odd = cfg.eigvals[2 * k];
            let l_even = cfg.eigvals[2 * k + 1];
            assert_relative_eq!(l_odd + 2.0 * l_even, bound, epsilon = 1e-12);
            assert!(l_odd > bound);
        }
    }

    #[test]
    fn d_eigendata_matches_planar_lift() {
        let m = MassSystem::new(vec![1.0, 0.5, 0.25]).unwrap();
        let (cfg, spec) = solve_collinear(&m).unwrap();
        let mn = &m;
        let d = crate::central::hessian_gradient_map(mn, &cfg).unwrap();
        for k in 2..3 {
            let v = cfg.eigvec(2 * k);
            let dv = &d * &v;
            assert!(
                (&dv - cfg.eigvals[2 * k] * &v).amax() < 1e-9,
                "lifted odd eigenvector fails: {:?}",
                (&dv - cfg.eigvals[2 * k] * &v).amax()
            );
            let vp = cfg.eigvec(2 * k + 1);
            let dvp = &d * &vp;
            assert!((&dvp - cfg.eigvals[2 * k + 1] * &vp).amax() < 1e-9);
        }
        assert_relative_eq!(spec.iotas[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equivariance_under_reversal() {
        // reversing the mass order mirrors the configuration
        let m = MassSystem::new(vec![0.2, 0.5, 1.0]).unwrap();
        let mr = MassSystem::new(vec![1.0, 0.5, 0.2]).unwrap();
        let (a, _) = solve_collinear(&m).unwrap();
        let (b, _) = solve_collinear(&mr).unwrap();
        for k in 0..3 {
            assert_relative_eq!(a.points[2 * k], -b.points[2 * (2 - k)], epsilon = 1e-11);
        }
    }

    #[test]
    fn cascade_guess_converges_deep() {
        let m = MassSystem::new(vec![1.0, 1e-6, 1e-12]).unwrap();
        let (cfg, spec) = solve_collinear(&m).unwrap();
        assert!(cfg.residual(&m).unwrap() < 1e-12);
        assert!((spec.iotas[2] - asymptotic_iota(3, &[1e-6])).abs() < 1e-3);

        let m4 = MassSystem::new(vec![1.0, 1e-6, 1e-12, 1e-18]).unwrap();
        let (cfg4, spec4) = solve_collinear(&m4).unwrap();
        assert!(cfg4.residual(&m4).unwrap() < 1e-12);
        // iota_4 ~ 3 iota_3 along the cascade
        assert!((spec4.iotas[3] / spec4.iotas[2] - 3.0).abs() < 0.01);
    }
}
