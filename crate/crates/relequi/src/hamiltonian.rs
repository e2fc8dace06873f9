//! The reduced moving-frame Hamiltonian near a relative equilibrium,
//! assembled as truncated polynomials in the canonical variables
//! (x0, x5..x_{2N}, y0, y5..y_{2N}). Grades H2, H3, H4 are produced by
//! series division of the closed-form Hamiltonian, so the displayed
//! expansions are reproduced rather than transcribed.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::central::{CentralConfig, ConfigKind};
use crate::error::{Error, Result};
use crate::masses::MassSystem;
use crate::poly::TruncPoly;
use crate::potential::{self, mass_dot, perp};

/// Expansion data of the force function at the configuration, in the unit
/// eigenframe: U(x) = lambda* + 1/2 sum lambda*_k x_k^2
/// + 1/6 sum a_ijk x_i x_j x_k + 3/4 (sum x^2) sum (lambda*_k - lambda*/2) x_k^2
/// + 1/24 sum a_hijk x_h x_i x_j x_k + ...
#[derive(Debug, Clone, Serialize)]
pub struct FrameCoefficients {
    /// lambda* = g3^{3/2} lambda, the value of U at the unit configuration.
    pub lambda_star: f64,
    /// lambda*_k for k = 5..2N (index 0 is k = 5).
    pub lambda_star_k: Vec<f64>,
    /// Third directional-derivative tensor a_ijk, fully symmetric; indices
    /// run over the shape directions 5..2N.
    pub a3: Vec<Vec<Vec<f64>>>,
    /// Fourth directional-derivative tensor a_hijk.
    pub a4: Vec<Vec<Vec<Vec<f64>>>>,
    /// The antisymmetric orthogonal coupling matrix q_jk = <Ehat_j, Ehat_k-perp>.
    pub q: Vec<Vec<f64>>,
}

impl FrameCoefficients {
    pub fn dim(&self) -> usize {
        self.lambda_star_k.len()
    }
}

/// How the collinear pair blocks line up in the shape variables, if they do.
/// Block k couples (x_{2k-1}, x_{2k}) only; `iota` drives its frequencies.
#[derive(Debug, Clone, Serialize)]
pub struct PairBlock {
    pub iota: f64,
    /// lambda*_{2k-1} (the elliptic-side eigenvalue).
    pub lambda_odd: f64,
    /// lambda*_{2k} (the hyperbolic-side eigenvalue).
    pub lambda_even: f64,
}

/// Graded pieces of the reduced Hamiltonian, plus the bookkeeping needed to
/// map results back to physical units.
#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianExpansion {
    /// omega = sqrt(lambda*).
    pub omega: f64,
    /// Constant term -omega^2/2 (dropped from the polynomial grades).
    pub constant: f64,
    /// Degrees of freedom: 2N - 3.
    pub dof: usize,
    pub h2: TruncPoly,
    pub h3: TruncPoly,
    pub h4: TruncPoly,
    /// Present when the shape variables split into collinear J-blocks, in
    /// which case the explicit symplectic chart applies.
    pub blocks: Option<Vec<PairBlock>>,
    /// Whether the (x0, y0) radial pair is part of the phase space (true
    /// for the N-body reductions, false for standalone block Hamiltonians).
    pub radial_pair: bool,
    /// g3 of the source configuration; the time rescale t -> t/sqrt(g3) and
    /// momentum rescale y -> y/g3^{1/4} have multipliers recorded here.
    pub g3: f64,
    pub time_multiplier: f64,
    pub momentum_multiplier: f64,
}

/// Compute lambda*, lambda*_k and the exact third/fourth directional
/// derivatives of U along the unit eigenframe (closed-form tensor
/// derivatives of 1/r, not finite differences).
pub fn potential_expansion(m: &MassSystem, c: &CentralConfig) -> Result<FrameCoefficients> {
    let n = m.n();
    let nx = 2 * n - 4;
    let e3h = c.eigvec_hat(2);
    let mut dirs = vec![e3h.clone()];
    for k in 0..nx {
        dirs.push(c.eigvec_hat(4 + k));
    }
    // scale-invariant eigendata at the unit configuration
    let lambda_star = potential::value(m, &e3h)?;
    let g3 = c.g3;
    let lambda_star_k: Vec<f64> = (0..nx).map(|k| c.eigvals[4 + k] * g3).collect();

    let dd = potential::directional_derivs(m, &e3h, &dirs);
    let mut a3 = vec![vec![vec![0.0; nx]; nx]; nx];
    let mut a4 = vec![vec![vec![vec![0.0; nx]; nx]; nx]; nx];
    for i in 0..nx {
        for j in 0..nx {
            for k in 0..nx {
                a3[i][j][k] = dd.d3[i + 1][j + 1][k + 1];
                for h in 0..nx {
                    a4[h][i][j][k] = dd.d4[h + 1][i + 1][j + 1][k + 1];
                }
            }
        }
    }
    let mut q = vec![vec![0.0; nx]; nx];
    for j in 0..nx {
        let pj = perp(&dirs[1 + j]);
        for k in 0..nx {
            // q_jk = <Ehat_j, Ehat_k perp> = -<Ehat_j perp, Ehat_k>
            q[k][j] = mass_dot(m, &dirs[1 + k], &pj);
        }
    }
    Ok(FrameCoefficients {
        lambda_star,
        lambda_star_k,
        a3,
        a4,
        q,
    })
}

/// Verify lambda*_k against the second directional derivatives,
/// d2U(Ehat_j, Ehat_k) = (lambda*_k - lambda*) delta_jk. Returns the largest
/// mismatch; useful as a consistency diagnostic.
pub fn frame_consistency(m: &MassSystem, c: &CentralConfig, f: &FrameCoefficients) -> f64 {
    let nx = f.dim();
    let e3h = c.eigvec_hat(2);
    let mut dirs = vec![e3h];
    for k in 0..nx {
        dirs.push(c.eigvec_hat(4 + k));
    }
    let dd = potential::directional_derivs(m, &dirs[0].clone(), &dirs);
    let mut worst: f64 = 0.0;
    for j in 0..nx {
        for k in 0..nx {
            let expect = if j == k {
                f.lambda_star_k[k] - f.lambda_star
            } else {
                0.0
            };
            worst = worst.max((dd.d2[j + 1][k + 1] - expect).abs());
        }
    }
    worst
}

fn var(vars: usize, i: usize) -> TruncPoly {
    TruncPoly::variable(vars, 4, i, 1.0)
}

/// Assemble H2 + H3 + H4 of the reduced Hamiltonian with the equilibrium at
/// the origin. Variables are ordered (x0, x5..x_{2N}, y0, y5..y_{2N}).
pub fn build_hamiltonian(c: &CentralConfig, f: &FrameCoefficients) -> Result<HamiltonianExpansion> {
    let nx = f.dim();
    let dof = nx + 1;
    let nv = 2 * dof;
    let omega = f.lambda_star.sqrt();
    let xs: Vec<TruncPoly> = (0..nx).map(|k| var(nv, 1 + k)).collect();
    let ys: Vec<TruncPoly> = (0..nx).map(|k| var(nv, dof + 1 + k)).collect();
    let x0 = var(nv, 0);
    let y0 = var(nv, dof);

    // U(x) truncated at degree 4
    let mut u = TruncPoly::constant(nv, 4, f.lambda_star);
    for k in 0..nx {
        u = u.add(&xs[k].mul(&xs[k])?.scale(0.5 * f.lambda_star_k[k]))?;
    }
    let mut cubic = TruncPoly::zero(nv, 4);
    for i in 0..nx {
        for j in 0..nx {
            let xij = xs[i].mul(&xs[j])?;
            for k in 0..nx {
                let a = f.a3[i][j][k];
                if a != 0.0 {
                    cubic = cubic.add(&xij.mul(&xs[k])?.scale(a / 6.0))?;
                }
            }
        }
    }
    u = u.add(&cubic)?;
    let mut sumsq = TruncPoly::zero(nv, 4);
    for k in 0..nx {
        sumsq = sumsq.add(&xs[k].mul(&xs[k])?)?;
    }
    let mut inner = TruncPoly::zero(nv, 4);
    for k in 0..nx {
        inner = inner.add(
            &xs[k]
                .mul(&xs[k])?
                .scale(f.lambda_star_k[k] - 0.5 * f.lambda_star),
        )?;
    }
    u = u.add(&sumsq.mul(&inner)?.scale(0.75))?;
    let mut quartic = TruncPoly::zero(nv, 4);
    for h in 0..nx {
        for i in 0..nx {
            let xhi = xs[h].mul(&xs[i])?;
            for j in 0..nx {
                let xhij = xhi.mul(&xs[j])?;
                for k in 0..nx {
                    let a = f.a4[h][i][j][k];
                    if a != 0.0 {
                        quartic = quartic.add(&xhij.mul(&xs[k])?.scale(a / 24.0))?;
                    }
                }
            }
        }
    }
    u = u.add(&quartic)?;

    // bracket: lambda* + sum_k (y_k - w sum_j q_kj x_j)^2
    //          + (sum_{jk} q_kj x_j y_k - w sum x^2)^2 - (sum x_k y_k)^2
    let mut bracket = TruncPoly::constant(nv, 4, f.lambda_star);
    for k in 0..nx {
        let mut t = ys[k].clone();
        for j in 0..nx {
            if f.q[k][j] != 0.0 {
                t = t.sub(&xs[j].scale(omega * f.q[k][j]))?;
            }
        }
        bracket = bracket.add(&t.mul(&t)?)?;
    }
    let mut t = TruncPoly::zero(nv, 4);
    for k in 0..nx {
        for j in 0..nx {
            if f.q[k][j] != 0.0 {
                t = t.add(&xs[j].mul(&ys[k])?.scale(f.q[k][j]))?;
            }
        }
    }
    t = t.sub(&sumsq.scale(omega))?;
    bracket = bracket.add(&t.mul(&t)?)?;
    let mut xy = TruncPoly::zero(nv, 4);
    for k in 0..nx {
        xy = xy.add(&xs[k].mul(&ys[k])?)?;
    }
    bracket = bracket.sub(&xy.mul(&xy)?)?;

    // geometric series for 1/(2(1+x0)^2) and 1/(1+x0), degree 4
    let mut inv_sq = TruncPoly::zero(nv, 4);
    for (d, coef) in [(0u32, 0.5), (1, -1.0), (2, 1.5), (3, -2.0), (4, 2.5)] {
        let mut term = TruncPoly::constant(nv, 4, coef);
        for _ in 0..d {
            term = term.mul(&x0)?;
        }
        inv_sq = inv_sq.add(&term)?;
    }
    let mut inv = TruncPoly::zero(nv, 4);
    for (d, coef) in [(0u32, 1.0), (1, -1.0), (2, 1.0), (3, -1.0), (4, 1.0)] {
        let mut term = TruncPoly::constant(nv, 4, coef);
        for _ in 0..d {
            term = term.mul(&x0)?;
        }
        inv = inv.add(&term)?;
    }

    let h = y0
        .mul(&y0)?
        .scale(0.5)
        .add(&inv_sq.mul(&bracket)?)?
        .sub(&u.mul(&inv)?)?;

    let constant = h.grade(0).coeff(&vec![0u8; nv]).re;
    if (constant + 0.5 * omega * omega).abs() > 1e-12 * omega * omega {
        return Err(Error::Classification(format!(
            "constant term {constant} does not match -omega^2/2"
        )));
    }
    if h.grade(1).norm() > 1e-12 * omega * omega {
        return Err(Error::Classification(
            "gradient at the origin is nonzero".into(),
        ));
    }

    let blocks = match c.kind {
        ConfigKind::Euler3 { .. } | ConfigKind::Collinear => {
            let mut bs = Vec::new();
            for k in 0..nx / 2 {
                let lo = f.lambda_star_k[2 * k];
                let le = f.lambda_star_k[2 * k + 1];
                bs.push(PairBlock {
                    iota: lo / f.lambda_star,
                    lambda_odd: lo,
                    lambda_even: le,
                });
            }
            Some(bs)
        }
        ConfigKind::Lagrange { .. } => None,
    };

    Ok(HamiltonianExpansion {
        omega,
        constant,
        dof,
        h2: h.grade(2),
        h3: h.grade(3),
        h4: h.grade(4),
        blocks,
        radial_pair: true,
        g3: c.g3,
        time_multiplier: c.g3.sqrt(),
        momentum_multiplier: c.g3.powf(0.25),
    })
}

impl HamiltonianExpansion {
    pub fn has_radial_pair(&self) -> bool {
        self.radial_pair
    }

    /// Hessian of H2 in the variable order (q, p).
    pub fn h2_hessian(&self) -> DMatrix<f64> {
        let nv = 2 * self.dof;
        let mut s = DMatrix::zeros(nv, nv);
        for (mono, c) in self.h2.terms() {
            let mut idx = Vec::with_capacity(2);
            for (i, &e) in mono.exps().iter().enumerate() {
                for _ in 0..e {
                    idx.push(i);
                }
            }
            let (a, b) = (idx[0], idx[1]);
            if a == b {
                s[(a, a)] += 2.0 * c.re;
            } else {
                s[(a, b)] += c.re;
                s[(b, a)] += c.re;
            }
        }
        s
    }

    /// Full degree-4 polynomial H2 + H3 + H4 (constant dropped).
    pub fn poly(&self) -> TruncPoly {
        self.h2
            .add(&self.h3)
            .and_then(|p| p.add(&self.h4))
            .expect("grades share one space")
    }
}

/// The two-degree-of-freedom block Hamiltonian driven by one collinear pair
/// with a small trailing mass: quadratic block with parameter iota, cubic
/// sigma1/sqrt(eps) (x1^3 - 3/2 x1 x2^2), quartic -sigma2/eps (x1^4 +
/// 3/8 x2^4 - 3 x1^2 x2^2). Variables (x1, x2, y1, y2).
pub fn build_block_hamiltonian(
    iota: f64,
    c_ring: f64,
    omega_ring: f64,
    sigma1: f64,
    eps: f64,
) -> Result<HamiltonianExpansion> {
    let nv = 4;
    let sigma2 = c_ring * sigma1 * sigma1 / (omega_ring * omega_ring);
    let w2 = omega_ring * omega_ring;
    let x1 = var(nv, 0);
    let x2 = var(nv, 1);
    let y1 = var(nv, 2);
    let y2 = var(nv, 3);
    let mut h2 = y1.mul(&y1)?.scale(0.5).add(&y2.mul(&y2)?.scale(0.5))?;
    h2 = h2.add(&x2.mul(&y1)?.scale(omega_ring))?;
    h2 = h2.sub(&x1.mul(&y2)?.scale(omega_ring))?;
    h2 = h2.add(&x1.mul(&x1)?.scale(0.5 * w2 * (1.0 - iota)))?;
    h2 = h2.add(&x2.mul(&x2)?.scale(0.25 * w2 * (iota - 1.0)))?;
    let se = sigma1 / eps.sqrt();
    let x1sq = x1.mul(&x1)?;
    let x2sq = x2.mul(&x2)?;
    let h3 = x1sq
        .mul(&x1)?
        .scale(se)
        .sub(&x1.mul(&x2sq)?.scale(1.5 * se))?;
    let qe = sigma2 / eps;
    let h4 = x1sq
        .mul(&x1sq)?
        .scale(-qe)
        .sub(&x2sq.mul(&x2sq)?.scale(0.375 * qe))?
        .add(&x1sq.mul(&x2sq)?.scale(3.0 * qe))?;
    Ok(HamiltonianExpansion {
        omega: omega_ring,
        constant: 0.0,
        dof: 2,
        h2,
        h3,
        h4,
        blocks: Some(vec![PairBlock {
            iota,
            lambda_odd: iota * w2,
            lambda_even: 0.5 * (3.0 - iota) * w2,
        }]),
        radial_pair: false,
        g3: 1.0,
        time_multiplier: 1.0,
        momentum_multiplier: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{solve_euler3, solve_lagrange, ConfigKind};
    use approx::assert_relative_eq;

    #[test]
    fn euler_tensor_identities() {
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        // the x6-odd cubic entries vanish for a collinear configuration
        assert!(f.a3[0][0][1].abs() < 1e-10);
        assert!(f.a3[1][1][1].abs() < 1e-10);
        // a30 = -(2/3) a12 in the monomial normalization
        let a30 = f.a3[0][0][0] / 6.0;
        let a12 = f.a3[0][1][1] / 2.0;
        assert_relative_eq!(a30, -2.0 / 3.0 * a12, max_relative = 1e-10);
        // a22 = 3/4 (-4 a4 + 2 lambda - lambda6)
        let a4 = f.a4[0][0][0][0] / 24.0;
        let lam = f.lambda_star;
        let lam6 = f.lambda_star_k[1];
        let a22 = 6.0 * f.a4[0][0][1][1] / 24.0 + 0.75 * (f.lambda_star_k[0] + lam6 - lam);
        assert_relative_eq!(
            a22,
            0.75 * (-4.0 * a4 + 2.0 * lam - lam6),
            max_relative = 1e-10
        );
        // Q is the 2x2 block J
        assert_relative_eq!(f.q[0][1], -1.0, epsilon = 1e-12);
        assert_relative_eq!(f.q[1][0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lagrange_tensors_match_finite_differences() {
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let mn = m.normalized_to_unit_total();
        let c = solve_lagrange(&m).unwrap();
        let f = potential_expansion(&mn, &c).unwrap();
        assert!(frame_consistency(&mn, &c, &f) < 1e-10);
        // finite-difference oracle for a_ijk through the unit-sphere chart
        let e3 = c.eigvec_hat(2);
        let e5 = c.eigvec_hat(4);
        let e6 = c.eigvec_hat(5);
        let u_of = |x5: f64, x6: f64| {
            let x3 = (1.0 - x5 * x5 - x6 * x6).sqrt();
            let pt = &e3 * x3 + &e5 * x5 + &e6 * x6;
            potential::value(&mn, &pt).unwrap()
        };
        let h = 1e-4;
        // the x5^3 coefficient of U(x) is a_555/6; FD third derivative
        let d3 = (u_of(2.0 * h, 0.0) - 2.0 * u_of(h, 0.0) + 2.0 * u_of(-h, 0.0)
            - u_of(-2.0 * h, 0.0))
            / (2.0 * h * h * h);
        assert_relative_eq!(d3, f.a3[0][0][0], epsilon = 1e-6, max_relative = 1e-5);
    }

    #[test]
    fn hamiltonian_displayed_coefficients() {
        let m = MassSystem::new(vec![0.98, 0.01, 0.01]).unwrap();
        let c = solve_lagrange(&m).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let w2 = h.omega * h.omega;
        assert_relative_eq!(h.constant, -0.5 * w2, epsilon = 1e-15);
        // x0^3 coefficient -omega^2; x0^4 coefficient 3 omega^2/2
        assert_relative_eq!(h.h3.coeff(&[3, 0, 0, 0, 0, 0]).re, -w2, max_relative = 1e-12);
        assert_relative_eq!(
            h.h4.coeff(&[4, 0, 0, 0, 0, 0]).re,
            1.5 * w2,
            max_relative = 1e-12
        );
        // x0 y5^2 coefficient -1
        assert_relative_eq!(
            h.h3.coeff(&[1, 0, 0, 0, 2, 0]).re,
            -1.0,
            max_relative = 1e-12
        );
        // H2 display: 1/2 [w^2 x0^2 + y^2 - 2w sum q_kj x_j y_k + (w^2 - l_k) x_k^2]
        assert_relative_eq!(h.h2.coeff(&[2, 0, 0, 0, 0, 0]).re, 0.5 * w2, max_relative = 1e-12);
        assert_relative_eq!(
            h.h2.coeff(&[0, 1, 0, 0, 0, 1]).re,
            -h.omega * f.q[1][0],
            max_relative = 1e-12
        );
        assert_relative_eq!(
            h.h2.coeff(&[0, 0, 2, 0, 0, 0]).re * 2.0,
            w2 - f.lambda_star_k[1],
            max_relative = 1e-11
        );
    }

    #[test]
    fn euler_h2_matches_block_display() {
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        assert!(matches!(c.kind, ConfigKind::Euler3 { .. }));
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let blocks = h.blocks.as_ref().unwrap();
        assert_eq!(blocks.len(), 1);
        let iota = blocks[0].iota;
        let w2 = h.omega * h.omega;
        // omega^2 (1 - iota) x5^2 / 2 and omega^2 (iota - 1)/2 x6^2 / 2
        assert_relative_eq!(
            h.h2.coeff(&[0, 2, 0, 0, 0, 0]).re,
            0.5 * w2 * (1.0 - iota),
            max_relative = 1e-11
        );
        assert_relative_eq!(
            h.h2.coeff(&[0, 0, 2, 0, 0, 0]).re,
            0.25 * w2 * (iota - 1.0),
            max_relative = 1e-11
        );
    }
}
