//! Degree-4 Birkhoff normalization by generating functions: the homological
//! equations for S3 and S4, extraction of the action-coefficient matrix
//! (omega_jk), restriction to the center manifold, degeneracy verdicts, and
//! the closed-form oracles the pipeline is checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianExpansion;
use crate::poly::TruncPoly;
use crate::spectrum::{PairKind, SymplecticChart};

/// Relative small-divisor tolerance (in units of the reference frequency).
pub const SMALL_DIVISOR_TOL: f64 = 1e-9;

/// Result of the degree-4 normalization.
#[derive(Debug, Clone, Serialize)]
pub struct NormalForm {
    /// Signed frequency vector: Krein-signed elliptic frequencies and
    /// positive hyperbolic rates, in pair order.
    pub freq: Vec<f64>,
    pub kinds: Vec<PairKind>,
    /// Symmetric matrix of action coefficients: the quartic part of the
    /// normal form is (1/2) sum omega_jk rho_j rho_k.
    pub omega_jk: Vec<Vec<f64>>,
    #[serde(skip)]
    pub s3: TruncPoly,
    #[serde(skip)]
    pub s4: TruncPoly,
    /// Relative norm of grade 3 after the S3 step (should be ~ machine eps).
    pub residual3: f64,
    /// Relative norm of the non-action grade-4 part after the S4 step.
    pub residual4: f64,
    /// Largest imaginary contamination seen while reading off omega_jk.
    pub imag_dust: f64,
    /// Set when a small divisor blocked a monomial.
    pub resonant: Option<ResonantInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonantInfo {
    pub kvec: Vec<i32>,
    pub divisor: f64,
}

/// Center-manifold restriction: the elliptic-action block of omega_jk.
#[derive(Debug, Clone, Serialize)]
pub struct CenterRestriction {
    /// Pair indices kept (elliptic pairs, radial included).
    pub indices: Vec<usize>,
    pub reduced_freq: Vec<f64>,
    pub reduced_matrix: Vec<Vec<f64>>,
}

/// Divisor sum_j Omega_j (b_j - a_j) for the monomial u^a eta^b.
fn divisor(omegas: &[Complex64], exps: &[u8], n: usize) -> Complex64 {
    let mut d = Complex64::ZERO;
    for j in 0..n {
        d += omegas[j] * (f64::from(exps[n + j]) - f64::from(exps[j]));
    }
    d
}

fn kvec_of(exps: &[u8], n: usize) -> Vec<i32> {
    (0..n)
        .map(|j| i32::from(exps[n + j]) - i32::from(exps[j]))
        .collect()
}

/// Solve the order-k homological equation L(S) + Hk = 0 term by term. A
/// divisor below `tol` on a non-resonant monomial is a genuine obstruction
/// and errors out; action monomials (a = b) are left for the normal form.
pub fn solve_generating(
    omegas: &[Complex64],
    hk: &TruncPoly,
    tol: f64,
) -> Result<TruncPoly> {
    let n = omegas.len();
    let mut s = TruncPoly::zero(hk.vars(), hk.max_degree());
    for (mono, &c) in hk.terms() {
        let exps = mono.exps();
        let is_action = (0..n).all(|j| exps[j] == exps[n + j]);
        if is_action {
            continue;
        }
        let d = divisor(omegas, exps, n);
        if d.norm() < tol {
            return Err(Error::SmallDivisor {
                kvec: kvec_of(exps, n),
                divisor: d.norm(),
            });
        }
        s.add_term(exps.to_vec(), -c / d);
    }
    Ok(s)
}

/// The operator L(S) = sum_j Omega_j (eta_j dS/deta_j - u_j dS/du_j).
fn homological_op(omegas: &[Complex64], s: &TruncPoly) -> Result<TruncPoly> {
    let n = omegas.len();
    let nv = s.vars();
    let mut r = TruncPoly::zero(nv, s.max_degree());
    for j in 0..n {
        let eta = TruncPoly::variable(nv, s.max_degree(), n + j, 1.0);
        let u = TruncPoly::variable(nv, s.max_degree(), j, 1.0);
        let t = eta
            .mul(&s.partial(n + j))?
            .sub(&u.mul(&s.partial(j))?)?
            .scale(omegas[j]);
        r = r.add(&t)?;
    }
    Ok(r)
}

/// The degree-4 Birkhoff normal form of a Hamiltonian expansion through the
/// given chart. Implements the generating-function scheme: solve S3 from
/// the cubic homological equation, push H3 forward, solve S4, and read the
/// surviving action coefficients off with the paper's sign and i placements.
pub fn normalize(h: &HamiltonianExpansion, chart: &SymplecticChart) -> Result<NormalForm> {
    let n = chart.dof;
    let nv = 2 * n;
    let omegas = chart.divisor_frequencies();
    let ref_freq = chart
        .pairs
        .iter()
        .map(|p| p.frequency().abs())
        .fold(0.0f64, f64::max);
    let tol = SMALL_DIVISOR_TOL * ref_freq;

    let hz = chart.to_complex_vars(&h.poly())?;
    let h3 = hz.grade(3);
    let h4 = hz.grade(4);

    // an order-3 small divisor is fatal: H_{3->4} needs the full S3
    let s3 = solve_generating(&omegas, &h3, tol)?;
    let residual3 = if h3.norm() > 0.0 {
        homological_op(&omegas, &s3)?.add(&h3)?.norm() / h3.norm()
    } else {
        0.0
    };

    // H_{3->4}: order-4 part of H3(u + dS3/deta, eta)
    let mut subst = Vec::with_capacity(nv);
    for j in 0..n {
        subst.push(TruncPoly::variable(nv, 4, j, 1.0).add(&s3.partial(n + j))?);
    }
    for j in 0..n {
        subst.push(TruncPoly::variable(nv, 4, n + j, 1.0));
    }
    let h34 = h3.compose(&subst)?.grade(4);
    let k4 = h34.add(&h4)?;

    // split k4 into action part (normal form) and the rest (absorbed by S4)
    let mut resonant = None;
    let s4 = match solve_generating(&omegas, &k4, tol) {
        Ok(s) => s,
        Err(Error::SmallDivisor { kvec, divisor }) => {
            resonant = Some(ResonantInfo { kvec, divisor });
            TruncPoly::zero(nv, 4)
        }
        Err(e) => return Err(e),
    };
    let residual4 = if resonant.is_none() && h4.norm() > 0.0 {
        // L(S4) + K4 should cancel everything except the action monomials
        let mut off = homological_op(&omegas, &s4)?.add(&k4)?;
        let mut action_part = TruncPoly::zero(nv, 4);
        for (mono, &c) in off.terms() {
            let e = mono.exps();
            if (0..n).all(|j| e[j] == e[n + j]) {
                action_part.add_term(e.to_vec(), c);
            }
        }
        off = off.sub(&action_part)?;
        off.norm() / h4.norm()
    } else {
        f64::NAN
    };

    // read off c_jk from the action monomials of k4
    let mut c_mat = vec![vec![Complex64::ZERO; n]; n];
    for (mono, &c) in k4.terms() {
        let e = mono.exps();
        if !(0..n).all(|j| e[j] == e[n + j]) {
            continue;
        }
        let mut idx = Vec::with_capacity(2);
        for j in 0..n {
            for _ in 0..e[j] {
                idx.push(j);
            }
        }
        if idx.len() == 2 {
            c_mat[idx[0]][idx[1]] += c;
        }
    }

    let mut omega_jk = vec![vec![0.0; n]; n];
    let mut imag_dust: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            let c = c_mat[j][k];
            let val = if j == k {
                match chart.pairs[j] {
                    PairKind::Elliptic { .. } => -2.0 * c,
                    PairKind::Hyperbolic { .. } => 2.0 * c,
                }
            } else {
                match (chart.pairs[j].is_elliptic(), chart.pairs[k].is_elliptic()) {
                    (true, true) => -c,
                    (false, false) => c,
                    _ => Complex64::new(0.0, -1.0) * c,
                }
            };
            imag_dust = imag_dust.max(val.im.abs());
            omega_jk[j][k] = val.re;
            omega_jk[k][j] = val.re;
        }
    }

    Ok(NormalForm {
        freq: chart.pairs.iter().map(|p| p.frequency()).collect(),
        kinds: chart.pairs.clone(),
        omega_jk,
        s3,
        s4,
        residual3,
        residual4,
        imag_dust,
        resonant,
    })
}

impl NormalForm {
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.freq.len();
        DMatrix::from_fn(n, n, |i, j| self.omega_jk[i][j])
    }
}

/// Drop hyperbolic actions: the principal submatrix over elliptic pairs,
/// which is the normal form of the reduced Hamiltonian on the center
/// manifold.
pub fn restrict_center(nf: &NormalForm) -> CenterRestriction {
    let indices: Vec<usize> = nf
        .kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| k.is_elliptic())
        .map(|(i, _)| i)
        .collect();
    let reduced_freq = indices.iter().map(|&i| nf.freq[i]).collect();
    let reduced_matrix = indices
        .iter()
        .map(|&i| indices.iter().map(|&j| nf.omega_jk[i][j]).collect())
        .collect();
    CenterRestriction {
        indices,
        reduced_freq,
        reduced_matrix,
    }
}

impl CenterRestriction {
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.indices.len();
        DMatrix::from_fn(d, d, |i, j| self.reduced_matrix[i][j])
    }
}

/// Default |det| threshold for the nondegeneracy flag, in normalized units.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Determinant of the center-restricted matrix and the nondegeneracy flag.
pub fn degeneracy_verdict(cr: &CenterRestriction, threshold: f64) -> (f64, bool) {
    let det = cr.matrix().determinant();
    (det, det.abs() > threshold)
}

// ---------------------------------------------------------------------------
// closed-form oracles
// ---------------------------------------------------------------------------

/// Excluded beta values of the pruned mass space Omega_ps.
pub const OMEGA_PS_EXCLUDED: [f64; 5] = [
    1.0 / 75.0,
    32.0 / 2187.0,
    16.0 / 675.0,
    1.0 / 36.0,
    64.0 / 1875.0,
];

/// Closed-form Lagrange normal-form data evaluated from the printed
/// formulas; a pure oracle with no series computation.
#[derive(Debug, Clone, Serialize)]
pub struct LagrangeOracle {
    pub omega: [f64; 3],
    pub w00: f64,
    pub w01: f64,
    pub w02: f64,
    pub w12: f64,
    pub w11: f64,
    pub w22: f64,
    pub f_deg: f64,
    pub det: f64,
}

impl LagrangeOracle {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            3,
            3,
            &[
                self.w00, self.w01, self.w02, self.w01, self.w11, self.w12, self.w02, self.w12,
                self.w22,
            ],
        )
    }
}

/// Evaluate the printed Lagrange coefficients at (beta, m1) in Omega_ps.
pub fn oracle_lagrange(beta: f64, m1: f64) -> Result<LagrangeOracle> {
    if !crate::resonance::omega_ps_membership(beta, m1) {
        return Err(Error::Domain(format!(
            "(beta, m1) = ({beta}, {m1}) outside Omega_ps"
        )));
    }
    let m = crate::masses::MassSystem::lagrange_from_beta_m1(beta, m1)?;
    let (m2, m3) = (m.mass(1), m.mass(2));
    let g = (1.0 - 27.0 * beta).sqrt();
    let w0 = beta.powf(0.75);
    let w1 = ((1.0 - g) / 2.0).sqrt() * w0;
    let w2 = ((1.0 + g) / 2.0).sqrt() * w0;
    let w01 = -((g + 1.0).sqrt() * (21.0 * g.powi(3) - 40.0 * g * g + 15.0 * g + 4.0))
        / (12.0 * 6.0f64.sqrt() * beta.sqrt() * g * (2.0 * g - 1.0));
    let w02 = -((g + 1.0).sqrt() * (21.0 * g * g + 19.0 * g - 4.0))
        / (4.0 * 2.0f64.sqrt() * g * (2.0 * g + 1.0));
    let w12 = (3.0 * beta).sqrt()
        / (4.0 * (18225.0 * beta * beta - 1107.0 * beta + 16.0) * m1 * m2 * m3)
        * ((360855.0 * beta * beta - 32265.0 * beta + 624.0) * m1.powi(3)
            + (-360855.0 * beta * beta + 32265.0 * beta - 624.0) * m1 * m1
            + 3.0 * beta * (120285.0 * beta * beta - 10755.0 * beta + 208.0) * m1
            - 4.0 * beta * beta * (432.0 * beta + 43.0));
    let w11 = (g - 1.0) * (1211.0 * g.powi(4) - 1336.0 * g.powi(3) + 279.0 * g * g + 158.0 * g
        - 76.0)
        / (72.0 * g * g * (10.0 * g * g - 11.0 * g + 3.0))
        - 3.0 * beta.powi(3) * (31.0 * g * g + 286.0 * g - 236.0)
            / (8.0 * (g - 1.0) * g * g * (5.0 * g - 3.0) * m1 * m2 * m3);
    let w22 = -(g + 1.0)
        * (1211.0 * g.powi(4) + 1336.0 * g.powi(3) + 279.0 * g * g - 158.0 * g - 76.0)
        / (72.0 * g * g * (10.0 * g * g + 11.0 * g + 3.0))
        - 3.0 * beta.powi(3) * (31.0 * g * g - 286.0 * g - 236.0)
            / (8.0 * g * g * (g + 1.0) * (5.0 * g + 3.0) * m1 * m2 * m3);
    let f_deg = lagrange_f_deg(beta, m1);
    let det = -27.0 * beta * f_deg
        / (128.0
            * (16.0 - 675.0 * beta).powi(2)
            * (1.0 - 36.0 * beta).powi(2)
            * g.powi(4)
            * (m1 * m2 * m3).powi(2));
    Ok(LagrangeOracle {
        omega: [w0, w1, w2],
        w00: -3.0,
        w01,
        w02,
        w12,
        w11,
        w22,
        f_deg,
        det,
    })
}

/// The degeneracy polynomial f_deg(beta, m1).
pub fn lagrange_f_deg(b: f64, m1: f64) -> f64 {
    let b2 = b * b;
    let b3 = b2 * b;
    let b4 = b2 * b2;
    let b5 = b4 * b;
    let b6 = b3 * b3;
    2.0 * (1.0 - 36.0 * b).powi(2) / 3.0
        * (52542675.0 * b3 + 178185258.0 * b2 - 9896841.0 * b - 47632.0)
        * b4
        - 11.0
            * (397050199920.0 * b5 - 40790893923.0 * b4 + 4055047758.0 * b3 - 243771759.0 * b2
                + 6417616.0 * b
                - 59392.0)
            * b3
            * m1
        + (5465578392450.0 * b6 + 19309935720393.0 * b5 - 3995019640449.0 * b4
            + 327340481715.0 * b3
            - 13039336341.0 * b2
            + 250520816.0 * b
            - 1857536.0)
            * b2
            * m1
            * m1
        + (2408448.0 - 15298708984020.0 * b6 - 29436067209393.0 * b5 + 7048034089254.0 * b4
            - 562788423405.0 * b3
            + 20645100208.0 * b2
            - 359200768.0 * b)
            * b
            * m1.powi(3)
        + 3.0
            * ((1821859464150.0 * b6 + 4980794507091.0 * b5 - 1182106602432.0 * b4
                + 94244985459.0 * b3
                - 3452615664.0 * b2
                + 59975680.0 * b
                - 401408.0)
                * m1.powi(4)
                * (2.0 * b + m1 * m1 - 2.0 * m1 + 1.0))
}

/// Euler three-body center-manifold coefficients in the tau form: tau is an
/// algebraic function of lambda6/lambda, and the printed w01, w11 need the
/// cubic coefficient a30 and the quartic a4 of the potential expansion.
#[derive(Debug, Clone, Serialize)]
pub struct EulerTauOracle {
    pub tau: f64,
    pub w00: f64,
    pub w01: f64,
    pub w11: f64,
    /// w00 w11 - w01^2 from the printed closed form.
    pub det2: f64,
}

pub fn oracle_euler_tau(lambda: f64, lambda6: f64, a30: f64, a4: f64) -> EulerTauOracle {
    let l = lambda;
    let q = lambda6 / l;
    let tau = 0.25 * (5.0 - 9.0 * q) + 0.75 * (9.0 * q * q - 10.0 * q + 1.0).sqrt();
    let t = tau;
    let w01 = -(2.0 * t - 1.0)
        * ((2.0 * t * t + 7.0 * t - 4.0) / t).sqrt()
        * (7.0 * t.powi(4) + 42.0 * t.powi(3) + 41.0 * t * t - 76.0 * t - 28.0)
        / ((t - 1.0) * (2.0 * t * t + 7.0 * t + 2.0) * (8.0 * t * t + 19.0 * t - 16.0));
    let w11 = (-16.0 * t.powi(8) - 125.0 * t.powi(7) + 58.0 * t.powi(6) + 1436.0 * t.powi(5)
        + 454.0 * t.powi(4)
        - 2739.0 * t.powi(3)
        + 2640.0 * t * t
        - 1140.0 * t
        + 128.0)
        / (2.0 * (t - 1.0).powi(2) * t * (t + 4.0) * (2.0 * t - 1.0)
            * (8.0 * t * t + 19.0 * t - 16.0))
        + 27.0
            * t
            * (9.0 * a30 * a30 * t
                * (28.0 * t.powi(6) + 131.0 * t.powi(5) + 434.0 * t.powi(4) + 544.0 * t.powi(3)
                    - 472.0 * t * t
                    + 140.0 * t
                    - 120.0)
                / ((4.0 * t + 1.0) * (4.0 * t * t + 7.0 * t - 6.0))
                - a4 * l
                    * (t + 4.0)
                    * (3.0 * t.powi(4) + 8.0 * t.powi(3) + 24.0 * t * t + 8.0))
            / (8.0 * l * l * (t + 4.0).powi(2) * (2.0 * t - 1.0) * (t * t - 1.0).powi(2));
    let det2 = -(t + 4.0) * (2.0 * t - 1.0).powi(3)
        * (7.0 * t.powi(4) + 42.0 * t.powi(3) + 41.0 * t * t - 76.0 * t - 28.0).powi(2)
        / ((t - 1.0).powi(2)
            * t
            * (2.0 * t * t + 7.0 * t + 2.0).powi(2)
            * (8.0 * t * t + 19.0 * t - 16.0).powi(2))
        + 3.0
            / (8.0
                * l
                * l
                * t
                * (t + 4.0).powi(2)
                * (2.0 * t - 1.0)
                * (4.0 * t + 1.0)
                * (t * t - 1.0).powi(2)
                * (4.0 * t * t + 7.0 * t - 6.0)
                * (8.0 * t * t + 19.0 * t - 16.0))
            * (-243.0
                * a30
                * a30
                * t.powi(3)
                * (224.0 * t.powi(8) + 1580.0 * t.powi(7) + 5513.0 * t.powi(6)
                    + 10502.0 * t.powi(5)
                    - 384.0 * t.powi(4)
                    - 16552.0 * t.powi(3)
                    + 9252.0 * t * t
                    - 4520.0 * t
                    + 1920.0)
                + 27.0
                    * a4
                    * l
                    * t
                    * t
                    * (384.0 * t.powi(10) + 4240.0 * t.powi(9) + 19016.0 * t.powi(8)
                        + 45319.0 * t.powi(7)
                        + 49694.0 * t.powi(6)
                        - 16688.0 * t.powi(5)
                        - 54352.0 * t.powi(4)
                        + 20392.0 * t.powi(3)
                        - 17776.0 * t * t
                        + 5824.0 * t
                        + 3072.0)
                + 4.0
                    * l
                    * l
                    * (t + 1.0).powi(2)
                    * (256.0 * t.powi(12) + 3536.0 * t.powi(11) + 12848.0 * t.powi(10)
                        - 15853.0 * t.powi(9)
                        - 161192.0 * t.powi(8)
                        - 157864.0 * t.powi(7)
                        + 277966.0 * t.powi(6)
                        + 136889.0 * t.powi(5)
                        - 377438.0 * t.powi(4)
                        + 243876.0 * t.powi(3)
                        - 35208.0 * t * t
                        - 17888.0 * t
                        + 3072.0));
    EulerTauOracle {
        tau,
        w00: -3.0,
        w01,
        w11,
        det2,
    }
}

/// Printed coefficients for the two-degree-of-freedom block Hamiltonian:
/// the elliptic action coefficient, the elliptic-hyperbolic coupling, and
/// the numerator polynomial f_num whose nonvanishing settles nondegeneracy.
#[derive(Debug, Clone, Serialize)]
pub struct EulerBlockOracle {
    pub w_ee: f64,
    pub w_eh: f64,
    pub f_num: f64,
    pub f_den: f64,
}

/// Evaluate the block formulas at (iota, c) with unit sigma1, omega, eps.
pub fn oracle_euler_block(iota: f64, c_ring: f64) -> Result<EulerBlockOracle> {
    let i = iota;
    let d2 = (i - 1.0) * (9.0 * i - 25.0);
    if d2 < 0.0 {
        return Err(Error::Domain(format!(
            "iota = {i} gives a complex discriminant"
        )));
    }
    if i <= 3.0 {
        return Err(Error::Domain(format!(
            "iota = {i} has no hyperbolic partner (needs iota > 3)"
        )));
    }
    let dl = d2.sqrt();
    let f_num = 3.0
        * c_ring
        * i
        * (9.0 * (9.0 * dl - 106.0) * i.powi(4) - (165.0 * dl + 1774.0) * i.powi(3)
            + (1177.0 * dl + 17576.0) * i * i
            - 5.0 * (827.0 * dl + 7161.0) * i
            + 4450.0 * (dl + 5.0)
            + 243.0 * i.powi(5))
        + (-81.0 * (7.0 * dl - 80.0) * i.powi(4) + 3.0 * (363.0 * dl + 4430.0) * i.powi(3)
            - (9097.0 * dl + 131244.0) * i * i
            + (30667.0 * dl + 276755.0) * i
            - 36300.0 * (dl + 5.0)
            - 1701.0 * i.powi(5));
    let f_den = (dl - i + 5.0).powi(2)
        * (dl + i - 5.0)
        * (5.0 * (dl + 3.0) - 3.0 * i)
        * ((3.0 * dl - 34.0) * i + 5.0 * (dl + 5.0) + 9.0 * i * i).powi(3)
        * ((3.0 * dl + 34.0) * i + 5.0 * (dl - 5.0) - 9.0 * i * i);
    let w_ee = -6144.0 * f_num * i * (9.0 * i.powi(3) - 61.0 * i * i + 127.0 * i - 75.0) / f_den;
    let w_eh = 9.0 * 2.0f64.sqrt()
        / (i * ((i - 3.0) * i).sqrt()
            * (9.0 * i * i - 34.0 * i + 25.0)
            * (27.0 * i * i - 95.0 * i + 50.0))
        * (162.0 * i.powi(4) - 1029.0 * i.powi(3) + 2457.0 * i * i - 2695.0 * i + 825.0
            - c_ring
                * i
                * (81.0 * i.powi(4) - 555.0 * i.powi(3) + 1397.0 * i * i - 1545.0 * i + 550.0));
    Ok(EulerBlockOracle {
        w_ee,
        w_eh,
        f_num,
        f_den,
    })
}

/// f_num at the cascade point iota = 3^{N-1}, c = 3^{-(N-2)}: collapses to
/// the limit polynomial 2 (iota - 3)[...].
pub fn f_num_limit_polynomial(iota: f64) -> f64 {
    let i = iota;
    let dl = (9.0 * i * i - 34.0 * i + 25.0).sqrt();
    2.0 * (i - 3.0)
        * (243.0 * i.powi(4) - 324.0 * i.powi(3) - 2310.0 * i * i + 6540.0 * i - 3125.0
            + dl * (81.0 * i.powi(3) + 45.0 * i * i + 883.0 * i - 625.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{solve_euler3, solve_lagrange};
    use crate::hamiltonian::{build_block_hamiltonian, build_hamiltonian, potential_expansion};
    use crate::masses::MassSystem;
    use crate::spectrum::diagonalize;
    use approx::assert_relative_eq;

    fn lagrange_nf(masses: &[f64]) -> NormalForm {
        let m = MassSystem::new(masses.to_vec()).unwrap();
        let c = solve_lagrange(&m).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let chart = diagonalize(&h).unwrap();
        normalize(&h, &chart).unwrap()
    }

    #[test]
    fn lagrange_pipeline_matches_printed_forms() {
        let nf = lagrange_nf(&[0.98, 0.01, 0.01]);
        assert!(nf.residual3 < 1e-11);
        assert!(nf.residual4 < 1e-11);
        assert!(nf.imag_dust < 1e-9);
        let oracle = oracle_lagrange(0.0197, 0.98).unwrap();
        let w = &nf.omega_jk;
        assert_relative_eq!(w[0][0], -3.0, epsilon = 1e-10);
        assert_relative_eq!(w[0][1], oracle.w01, max_relative = 1e-10);
        assert_relative_eq!(w[0][2], oracle.w02, max_relative = 1e-10);
        assert_relative_eq!(w[1][2], oracle.w12, max_relative = 1e-10);
        assert_relative_eq!(w[1][1], oracle.w11, max_relative = 1e-9);
        assert_relative_eq!(w[2][2], oracle.w22, max_relative = 1e-8);
        let cr = restrict_center(&nf);
        assert_eq!(cr.indices.len(), 3);
        let (det, flag) = degeneracy_verdict(&cr, DEGENERACY_TOL);
        assert!(flag);
        assert_relative_eq!(det, oracle.det, max_relative = 1e-6);
    }

    #[test]
    fn euler_pipeline_matches_tau_oracle() {
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let chart = diagonalize(&h).unwrap();
        let nf = normalize(&h, &chart).unwrap();
        let a30 = f.a3[0][0][0] / 6.0;
        let a4 = f.a4[0][0][0][0] / 24.0;
        let oracle = oracle_euler_tau(f.lambda_star, f.lambda_star_k[1], a30, a4);
        let cr = restrict_center(&nf);
        let w = cr.matrix();
        assert_relative_eq!(w[(0, 0)], -3.0, epsilon = 1e-10);
        assert_relative_eq!(w[(0, 1)], oracle.w01, max_relative = 1e-9);
        assert_relative_eq!(w[(1, 1)], oracle.w11, max_relative = 1e-9);
        let det2 = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(0, 1)];
        assert_relative_eq!(det2, oracle.det2, max_relative = 1e-9);
        assert!(det2.abs() > 1e-8);
    }

    #[test]
    fn block_pipeline_matches_printed_block_forms() {
        for (iota, c_ring) in [(9.0, 1.0 / 3.0), (5.8, 0.2), (4.0, 0.5)] {
            let h = build_block_hamiltonian(iota, c_ring, 1.0, 1.0, 1.0).unwrap();
            let chart = diagonalize(&h).unwrap();
            let nf = normalize(&h, &chart).unwrap();
            let oracle = oracle_euler_block(iota, c_ring).unwrap();
            assert_relative_eq!(nf.omega_jk[0][0], oracle.w_ee, max_relative = 1e-9);
            assert_relative_eq!(nf.omega_jk[0][1], oracle.w_eh, max_relative = 1e-9);
        }
    }

    #[test]
    fn f_num_cascade_identity() {
        for n in 3..=12 {
            let iota = 3f64.powi(n - 1);
            let c_ring = 3f64.powi(-(n - 2));
            let o = oracle_euler_block(iota, c_ring).unwrap();
            let lim = f_num_limit_polynomial(iota);
            assert_relative_eq!(o.f_num, lim, max_relative = 1e-12);
            assert!(o.f_num.abs() > 0.0);
        }
    }

    #[test]
    fn omega_jk_invariant_under_eigenvector_sign_flip() {
        // flipping the sign of E5 upstream must leave omega_jk unchanged
        let m = MassSystem::new(vec![0.9, 0.06, 0.04]).unwrap();
        let c = solve_lagrange(&m).unwrap();
        let mn = m.normalized_to_unit_total();
        let f = potential_expansion(&mn, &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let chart = diagonalize(&h).unwrap();
        let nf = normalize(&h, &chart).unwrap();

        let mut c2 = c.clone();
        for v in &mut c2.eigvecs[4] {
            *v = -*v;
        }
        // keep E6 = perp(E5) pairing
        for v in &mut c2.eigvecs[5] {
            *v = -*v;
        }
        let f2 = potential_expansion(&mn, &c2).unwrap();
        let h2 = build_hamiltonian(&c2, &f2).unwrap();
        let chart2 = diagonalize(&h2).unwrap();
        let nf2 = normalize(&h2, &chart2).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_relative_eq!(
                    nf.omega_jk[j][k],
                    nf2.omega_jk[j][k],
                    max_relative = 1e-10,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn degenerate_matrix_flagged() {
        let cr = CenterRestriction {
            indices: vec![0, 1],
            reduced_freq: vec![1.0, 2.0],
            reduced_matrix: vec![vec![1.0, 2.0], vec![2.0, 4.0]],
        };
        let (det, flag) = degeneracy_verdict(&cr, DEGENERACY_TOL);
        assert!(det.abs() < 1e-12);
        assert!(!flag);
    }

    #[test]
    fn oracle_domain_exclusions() {
        assert!(matches!(
            oracle_lagrange(1.0 / 36.0, 0.98),
            Err(Error::Domain(_))
        ));
        assert!(oracle_lagrange(0.0197, 0.98).is_ok());
        assert!(matches!(
            oracle_euler_block(2.0, 0.3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn single_oscillator_s3() {
        // h = i w zeta eta, H3 = zeta^3: S3 = -zeta^3 / (-3 i w) = zeta^3/(3 i w)
        let omegas = [Complex64::new(0.0, 2.0)];
        let mut h3 = TruncPoly::zero(2, 4);
        h3.add_term(vec![3, 0], Complex64::ONE);
        let s3 = solve_generating(&omegas, &h3, 1e-12).unwrap();
        let got = s3.coeff(&[3, 0]);
        // divisor for zeta^3: (b - a) . Omega = -3 i w ; s = -c/div = 1/(3 i w)
        let expect = Complex64::ONE / Complex64::new(0.0, 3.0 * 2.0);
        assert_relative_eq!(got.re, expect.re, epsilon = 1e-14);
        assert_relative_eq!(got.im, expect.im, epsilon = 1e-14);
        // substituting back kills the cubic
        let l = homological_op(&omegas, &s3).unwrap();
        assert!(l.add(&h3).unwrap().norm() < 1e-14);
    }

    #[test]
    fn h3_zero_gives_s3_zero() {
        let omegas = [Complex64::new(0.0, 1.0)];
        let h3 = TruncPoly::zero(2, 4);
        let s3 = solve_generating(&omegas, &h3, 1e-12).unwrap();
        assert!(s3.is_zero());
    }
}
