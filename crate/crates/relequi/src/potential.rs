//! The Newtonian force function U = sum_{i<j} m_i m_j / r_ij on planar
//! configurations, with exact directional derivatives up to fourth order.
//!
//! Configurations are flat vectors (xi_1, xi_2, ..., xi_{2N}) with body k at
//! (xi_{2k-1}, xi_{2k}); the mass scalar product is <u, v> = u^T M v with
//! M = diag(m_1, m_1, ..., m_N, m_N).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::masses::MassSystem;

/// Rotate every body by pi/2: (a, b) -> (-b, a).
pub fn perp(v: &DVector<f64>) -> DVector<f64> {
    let mut w = DVector::zeros(v.len());
    for k in 0..v.len() / 2 {
        w[2 * k] = -v[2 * k + 1];
        w[2 * k + 1] = v[2 * k];
    }
    w
}

/// Mass scalar product <u, v>.
pub fn mass_dot(m: &MassSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (0..m.n())
        .map(|k| m.mass(k) * (u[2 * k] * v[2 * k] + u[2 * k + 1] * v[2 * k + 1]))
        .sum()
}

pub fn mass_norm(m: &MassSystem, v: &DVector<f64>) -> f64 {
    mass_dot(m, v, v).sqrt()
}

fn body(r: &DVector<f64>, k: usize) -> [f64; 2] {
    [r[2 * k], r[2 * k + 1]]
}

fn sep(r: &DVector<f64>, i: usize, j: usize) -> ([f64; 2], f64) {
    let d = [r[2 * j] - r[2 * i], r[2 * j + 1] - r[2 * i + 1]];
    (d, (d[0] * d[0] + d[1] * d[1]).sqrt())
}

/// U(r); errors on collision.
pub fn value(m: &MassSystem, r: &DVector<f64>) -> Result<f64> {
    let n = m.n();
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (_, rij) = sep(r, i, j);
            if rij == 0.0 {
                return Err(Error::Singularity(format!("bodies {i} and {j} collide")));
            }
            u += m.mass(i) * m.mass(j) / rij;
        }
    }
    Ok(u)
}

/// Gradient of U with respect to the mass scalar product (so that the central
/// configuration equation reads grad U = -lambda r).
pub fn mass_gradient(m: &MassSystem, r: &DVector<f64>) -> Result<DVector<f64>> {
    let n = m.n();
    let mut g = DVector::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (d, rij) = sep(r, i, j);
            if rij == 0.0 {
                return Err(Error::Singularity(format!("bodies {i} and {j} collide")));
            }
            let c = m.mass(j) / (rij * rij * rij);
            g[2 * i] += c * d[0];
            g[2 * i + 1] += c * d[1];
        }
    }
    Ok(g)
}

/// Euclidean Hessian of U (the matrix B of 2x2 blocks).
pub fn hessian(m: &MassSystem, r: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = m.n();
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (d, rij) = sep(r, i, j);
            if rij == 0.0 {
                return Err(Error::Singularity(format!("bodies {i} and {j} collide")));
            }
            let c = m.mass(i) * m.mass(j) / (rij * rij * rij);
            let s = 3.0 / (rij * rij);
            for a in 0..2 {
                for bb in 0..2 {
                    let blk = c * (if a == bb { 1.0 } else { 0.0 } - s * d[a] * d[bb]);
                    b[(2 * i + a, 2 * j + bb)] += blk;
                    // diagonal block accumulates -sum of off-diagonal blocks
                    b[(2 * i + a, 2 * i + bb)] -= blk;
                }
            }
        }
    }
    Ok(b)
}

/// First directional derivative dU|_r(u).
pub fn d1(m: &MassSystem, r: &DVector<f64>, u: &DVector<f64>) -> f64 {
    let n = m.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (d, rij) = sep(r, i, j);
            let ud = [
                u[2 * j] - u[2 * i],
                u[2 * j + 1] - u[2 * i + 1],
            ];
            let du = d[0] * ud[0] + d[1] * ud[1];
            s += m.mass(i) * m.mass(j) * (-du) / rij.powi(3);
        }
    }
    s
}

/// Directional derivative tensors of U at `r`, contracted against the list of
/// directions `dirs`; `out_k[a][b]...` holds d^k U(dirs[a], dirs[b], ...).
pub struct DirDerivs {
    pub d1: Vec<f64>,
    pub d2: Vec<Vec<f64>>,
    pub d3: Vec<Vec<Vec<f64>>>,
    pub d4: Vec<Vec<Vec<Vec<f64>>>>,
}

pub fn directional_derivs(m: &MassSystem, r: &DVector<f64>, dirs: &[DVector<f64>]) -> DirDerivs {
    let n = m.n();
    let nv = dirs.len();
    let mut o1 = vec![0.0; nv];
    let mut o2 = vec![vec![0.0; nv]; nv];
    let mut o3 = vec![vec![vec![0.0; nv]; nv]; nv];
    let mut o4 = vec![vec![vec![vec![0.0; nv]; nv]; nv]; nv];
    for i in 0..n {
        for j in i + 1..n {
            let (d, rij) = sep(r, i, j);
            let n2 = rij * rij;
            let mm = m.mass(i) * m.mass(j);
            let i3 = mm / (n2 * rij);
            let i5 = i3 / n2;
            let i7 = i5 / n2;
            let i9 = i7 / n2;
            // relative direction of each contraction vector across the pair
            let rel: Vec<[f64; 2]> = dirs
                .iter()
                .map(|v| [v[2 * j] - v[2 * i], v[2 * j + 1] - v[2 * i + 1]])
                .collect();
            let du: Vec<f64> = rel.iter().map(|u| d[0] * u[0] + d[1] * u[1]).collect();
            let uu: Vec<Vec<f64>> = rel
                .iter()
                .map(|a| rel.iter().map(|b| a[0] * b[0] + a[1] * b[1]).collect())
                .collect();
            for a in 0..nv {
                o1[a] += -du[a] * i3;
                for b in 0..nv {
                    o2[a][b] += (3.0 * du[a] * du[b] - n2 * uu[a][b]) * i5;
                    for c in 0..nv {
                        o3[a][b][c] += (-15.0 * du[a] * du[b] * du[c]
                            + 3.0
                                * n2
                                * (uu[a][b] * du[c] + uu[a][c] * du[b] + uu[b][c] * du[a]))
                            * i7;
                        for e in 0..nv {
                            o4[a][b][c][e] += (105.0 * du[a] * du[b] * du[c] * du[e]
                                - 15.0
                                    * n2
                                    * (uu[a][b] * du[c] * du[e]
                                        + uu[a][c] * du[b] * du[e]
                                        + uu[a][e] * du[b] * du[c]
                                        + uu[b][c] * du[a] * du[e]
                                        + uu[b][e] * du[a] * du[c]
                                        + uu[c][e] * du[a] * du[b])
                                + 3.0
                                    * n2
                                    * n2
                                    * (uu[a][b] * uu[c][e]
                                        + uu[a][c] * uu[b][e]
                                        + uu[a][e] * uu[b][c]))
                                * i9;
                        }
                    }
                }
            }
        }
    }
    DirDerivs {
        d1: o1,
        d2: o2,
        d3: o3,
        d4: o4,
    }
}

/// Center of mass (2-vector) of a configuration.
pub fn center_of_mass(m: &MassSystem, r: &DVector<f64>) -> [f64; 2] {
    let t = m.total();
    let mut c = [0.0, 0.0];
    for k in 0..m.n() {
        let b = body(r, k);
        c[0] += m.mass(k) * b[0] / t;
        c[1] += m.mass(k) * b[1] / t;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_body() -> (MassSystem, DVector<f64>) {
        let m = MassSystem::new(vec![2.0, 1.0]).unwrap();
        let r = DVector::from_vec(vec![-1.0, 0.5, 2.0, -0.5]);
        (m, r)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (m, r) = two_body();
        let g = mass_gradient(&m, &r).unwrap();
        let h = 1e-6;
        for i in 0..4 {
            let mut rp = r.clone();
            rp[i] += h;
            let mut rm = r.clone();
            rm[i] -= h;
            let fd = (value(&m, &rp).unwrap() - value(&m, &rm).unwrap()) / (2.0 * h);
            // euclidean gradient = M * mass gradient
            let mk = m.mass(i / 2);
            assert_relative_eq!(mk * g[i], fd, epsilon = 1e-8, max_relative = 1e-6);
        }
    }

    #[test]
    fn directional_derivs_match_finite_differences() {
        let (m, r) = two_body();
        let u = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4]);
        let v = DVector::from_vec(vec![-0.1, 0.25, 0.0, -0.3]);
        let dd = directional_derivs(&m, &r, &[u.clone(), v.clone()]);
        let f = |t: f64, s: f64| value(&m, &(&r + &u * t + &v * s)).unwrap();
        let h = 1e-4;
        let fd1 = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        assert_relative_eq!(dd.d1[0], fd1, max_relative = 1e-7);
        let fd2 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        assert_relative_eq!(dd.d2[0][1], fd2, max_relative = 1e-6);
        // d3 along u three times: third derivative of t -> f(t,0)
        let fd3 = (f(2.0 * h, 0.0) - 2.0 * f(h, 0.0) + 2.0 * f(-h, 0.0) - f(-2.0 * h, 0.0))
            / (2.0 * h * h * h);
        assert_relative_eq!(dd.d3[0][0][0], fd3, max_relative = 1e-5);
        let fd4 = (f(2.0 * h, 0.0) - 4.0 * f(h, 0.0) + 6.0 * f(0.0, 0.0) - 4.0 * f(-h, 0.0)
            + f(-2.0 * h, 0.0))
            / (h * h * h * h);
        assert_relative_eq!(dd.d4[0][0][0][0], fd4, max_relative = 1e-4);
    }

    #[test]
    fn hessian_matches_d2() {
        let (m, r) = two_body();
        let u = DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4]);
        let b = hessian(&m, &r).unwrap();
        let dd = directional_derivs(&m, &r, &[u.clone()]);
        let quad = (u.transpose() * &b * &u)[(0, 0)];
        assert_relative_eq!(dd.d2[0][0], quad, max_relative = 1e-12);
    }

    #[test]
    fn collision_is_an_error() {
        let m = MassSystem::new(vec![1.0, 1.0]).unwrap();
        let r = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(value(&m, &r), Err(Error::Singularity(_))));
    }
}
