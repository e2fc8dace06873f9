//! Linear analysis of H2: characteristic frequencies, the real symplectic
//! transformation bringing H2 to w0 (p0^2+q0^2)/2 + sum [w (p^2+q^2)/2 + w pq],
//! and its complexification. Collinear pair blocks use the explicit chart
//! with the paper's normalization factors r_{2k-1}, r_{2k}; anything else
//! goes through eigenplane construction.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianExpansion;
use crate::poly::TruncPoly;

/// Near-resonant linear spectra below this relative gap are rejected.
pub const LINEAR_GAP_TOL: f64 = 1e-10;

/// Classified spectrum of the linearized system.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyData {
    /// Frequency of the radial (x0) pair, when the Hamiltonian has one.
    pub omega0: Option<f64>,
    /// Elliptic frequencies (positive, ascending), excluding omega0.
    pub elliptic: Vec<f64>,
    /// Hyperbolic rates (positive, ascending).
    pub hyperbolic: Vec<f64>,
    /// gamma = sqrt(1 - 27 beta), filled for Lagrange runs.
    pub gamma: Option<f64>,
}

impl FrequencyData {
    /// All frequencies as one list: omega0 first, then elliptic, then
    /// hyperbolic rates.
    pub fn all(&self) -> Vec<f64> {
        let mut v = Vec::new();
        if let Some(w0) = self.omega0 {
            v.push(w0);
        }
        v.extend(&self.elliptic);
        v.extend(&self.hyperbolic);
        v
    }
}

/// One canonical pair of the diagonalized quadratic form. For elliptic
/// pairs `omega` is signed: H2 = omega (p^2 + q^2)/2 with the sign fixed by
/// the Krein signature. Hyperbolic pairs carry H2 = omega p q, omega > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PairKind {
    Elliptic { omega: f64 },
    Hyperbolic { omega: f64 },
}

impl PairKind {
    pub fn frequency(&self) -> f64 {
        match self {
            PairKind::Elliptic { omega } => *omega,
            PairKind::Hyperbolic { omega } => *omega,
        }
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self, PairKind::Elliptic { .. })
    }
}

/// Real linear symplectic chart z = T w with w = (q_0..q_{n-1}, p_0..p_{n-1}),
/// bringing H2 to the diagonal pair form recorded in `pairs`.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticChart {
    pub dof: usize,
    pub pairs: Vec<PairKind>,
    /// Column-major 2n x 2n matrix.
    pub t: Vec<f64>,
}

impl SymplecticChart {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(2 * self.dof, 2 * self.dof, &self.t)
    }

    /// Max-norm residual of T^T Sigma T - Sigma.
    pub fn symplectic_residual(&self) -> f64 {
        let t = self.matrix();
        let s = sigma(self.dof);
        (t.transpose() * &s * &t - &s).amax()
    }

    /// Inverse chart, via T^{-1} = Sigma^T T^T Sigma.
    pub fn inverse(&self) -> DMatrix<f64> {
        let t = self.matrix();
        let s = sigma(self.dof);
        s.transpose() * t.transpose() * s
    }

    /// Complex chart: z = (T C)(zeta, eta) where C complexifies elliptic
    /// pairs (p = (zeta + i eta)/sqrt2, q = (eta + i zeta)/sqrt2) and leaves
    /// hyperbolic pairs real (p = zeta, q = eta).
    pub fn complex_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dof;
        let mut c = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        let isq = 1.0 / 2.0f64.sqrt();
        for (j, pk) in self.pairs.iter().enumerate() {
            match pk {
                PairKind::Elliptic { .. } => {
                    // q_j = (eta_j + i zeta_j)/sqrt2 ; p_j = (zeta_j + i eta_j)/sqrt2
                    c[(j, n + j)] = Complex64::new(isq, 0.0);
                    c[(j, j)] = Complex64::new(0.0, isq);
                    c[(n + j, j)] = Complex64::new(isq, 0.0);
                    c[(n + j, n + j)] = Complex64::new(0.0, isq);
                }
                PairKind::Hyperbolic { .. } => {
                    c[(j, n + j)] = Complex64::ONE;
                    c[(n + j, j)] = Complex64::ONE;
                }
            }
        }
        let t = self.matrix().map(|x| Complex64::new(x, 0.0));
        t * c
    }

    /// Apply the full complex chart to a polynomial in (q, p), producing one
    /// in (zeta, eta).
    pub fn to_complex_vars(&self, poly: &TruncPoly) -> Result<TruncPoly> {
        let tc = self.complex_matrix();
        let nv = 2 * self.dof;
        let mut subst = Vec::with_capacity(nv);
        for row in 0..nv {
            let mut p = TruncPoly::zero(nv, poly.max_degree());
            for col in 0..nv {
                let c = tc[(row, col)];
                if c.norm() > 0.0 {
                    p = p.add(&TruncPoly::variable(nv, poly.max_degree(), col, c))?;
                }
            }
            subst.push(p);
        }
        poly.compose(&subst)
    }

    /// Signed frequency of each pair as used by the homological divisors:
    /// i * omega for elliptic, omega for hyperbolic.
    pub fn divisor_frequencies(&self) -> Vec<Complex64> {
        self.pairs
            .iter()
            .map(|p| match p {
                PairKind::Elliptic { omega } => Complex64::new(0.0, *omega),
                PairKind::Hyperbolic { omega } => Complex64::new(*omega, 0.0),
            })
            .collect()
    }
}

pub fn sigma(n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        s[(i, n + i)] = 1.0;
        s[(n + i, i)] = -1.0;
    }
    s
}

/// Classify the spectrum of the linear field Sigma * Hess(H2). Every
/// eigenvalue must sit on the real or imaginary axis within 1e-10 relative.
pub fn frequencies(h: &HamiltonianExpansion) -> Result<FrequencyData> {
    let s = h.h2_hessian();
    let a = sigma(h.dof) * s;
    let scale = a.amax();
    let eig = a.map(|x| Complex::new(x, 0.0)).eigenvalues().ok_or_else(|| {
        Error::Classification("eigenvalue iteration failed on the linear field".into())
    })?;
    let mut elliptic = Vec::new();
    let mut hyperbolic = Vec::new();
    for ev in eig.iter() {
        if ev.im > scale * 1e-8 && ev.re.abs() <= LINEAR_GAP_TOL * scale.max(1.0) {
            elliptic.push(ev.im);
        } else if ev.re > scale * 1e-8 && ev.im.abs() <= LINEAR_GAP_TOL * scale.max(1.0) {
            hyperbolic.push(ev.re);
        } else if ev.norm() > scale * 1e-8
            && ev.re.abs() > LINEAR_GAP_TOL * scale.max(1.0)
            && ev.im.abs() > LINEAR_GAP_TOL * scale.max(1.0)
        {
            return Err(Error::Classification(format!(
                "eigenvalue {ev} sits off both axes"
            )));
        }
    }
    elliptic.sort_by(f64::total_cmp);
    hyperbolic.sort_by(f64::total_cmp);
    let omega0 = if h.has_radial_pair() {
        // the radial pair is decoupled with frequency omega = sqrt(lambda*)
        let pos = elliptic
            .iter()
            .position(|&w| (w - h.omega).abs() < 1e-6 * h.omega)
            .ok_or_else(|| {
                Error::Classification("radial frequency missing from the spectrum".into())
            })?;
        Some(elliptic.remove(pos))
    } else {
        None
    };
    Ok(FrequencyData {
        omega0,
        elliptic,
        hyperbolic,
        gamma: None,
    })
}

/// Elliptic eigenplane of A for eigenvalue i w: returns the symplectically
/// normalized basis (e, f) and the signed frequency.
fn elliptic_plane(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    w: f64,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    let n2 = a.nrows();
    let ac = a.map(|x| Complex64::new(x, 0.0));
    // inverse iteration with a slightly detuned shift
    let shift = Complex64::new(0.0, w * (1.0 + 1e-9) + 1e-300);
    let mut m = ac.clone();
    for i in 0..n2 {
        m[(i, i)] -= shift;
    }
    let lu = m.lu();
    let mut v = DVector::from_element(n2, Complex64::new(1.0, 0.3));
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Classification("inverse iteration hit a singular shift".into()))?;
        let nrm = v.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Classification("inverse iteration diverged".into()));
        }
        v /= Complex64::new(nrm, 0.0);
    }
    let res = (&ac * &v - v.map(|x| x * shift)).norm();
    if res > 1e-6 * a.amax() {
        return Err(Error::Classification(format!(
            "eigenvector residual {res:e} for frequency {w}"
        )));
    }
    let aa: DVector<f64> = v.map(|x| x.re);
    let bb: DVector<f64> = v.map(|x| x.im);
    let c = (aa.transpose() * s * &bb)[(0, 0)];
    if c.abs() < 1e-12 {
        return Err(Error::Classification(
            "degenerate symplectic area on eigenplane".into(),
        ));
    }
    if c > 0.0 {
        let sc = c.sqrt();
        Ok((aa / sc, bb / sc, w))
    } else {
        let sc = (-c).sqrt();
        Ok((bb / sc, aa / sc, -w))
    }
}

/// Hyperbolic plane for eigenvalues +-w: (e, f) with H2 = w p q.
fn hyperbolic_plane(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    w: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n2 = a.nrows();
    let real_vec = |shift: f64| -> Result<DVector<f64>> {
        let mut m = a.clone();
        for i in 0..n2 {
            m[(i, i)] -= shift;
        }
        let lu = m.lu();
        let mut v = DVector::from_element(n2, 1.0);
        for _ in 0..4 {
            v = lu.solve(&v).ok_or_else(|| {
                Error::Classification("inverse iteration hit a singular shift".into())
            })?;
            let nrm = v.norm();
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::Classification("inverse iteration diverged".into()));
            }
            v /= nrm;
        }
        Ok(v)
    };
    let wp = real_vec(w * (1.0 + 1e-9))?;
    let wm = real_vec(-w * (1.0 + 1e-9))?;
    let c = (wp.transpose() * s * &wm)[(0, 0)];
    if c.abs() < 1e-12 {
        return Err(Error::Classification(
            "degenerate symplectic pairing on hyperbolic plane".into(),
        ));
    }
    if c > 0.0 {
        let sc = c.sqrt();
        Ok((wp / sc, wm / sc))
    } else {
        let sc = (-c).sqrt();
        Ok((wp / sc, -wm / sc))
    }
}

/// Build the symplectic chart diagonalizing H2. Collinear block structure,
/// when recorded on the expansion, selects the explicit chart; otherwise the
/// eigenplanes are constructed numerically.
pub fn diagonalize(h: &HamiltonianExpansion) -> Result<SymplecticChart> {
    let n = h.dof;
    let freq = frequencies(h)?;
    // reject near-resonant linear spectra (repeated frequencies)
    let mut all = freq.all();
    all.sort_by(f64::total_cmp);
    for pair in all.windows(2) {
        if (pair[1] - pair[0]).abs() < LINEAR_GAP_TOL * all[all.len() - 1] {
            return Err(Error::ResonantLinear(pair[0], pair[1]));
        }
    }

    let mut t = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut pairs = Vec::with_capacity(n);
    let mut slot = 0usize;

    if h.has_radial_pair() {
        let w0 = freq.omega0.expect("radial pair classified");
        // p0 = sqrt(w0) P, q0 = Q / sqrt(w0)
        t[(0, 0)] = 1.0 / w0.sqrt();
        t[(n, n)] = w0.sqrt();
        pairs.push(PairKind::Elliptic { omega: w0 });
        slot = 1;
    }

    if let Some(blocks) = &h.blocks {
        // explicit chart per collinear block, matching the printed
        // normalization factors
        let lam_star = h.omega * h.omega;
        let base = if h.has_radial_pair() { 1 } else { 0 };
        for (bi, blk) in blocks.iter().enumerate() {
            let iota = blk.iota;
            let disc = (9.0 * iota * iota - 34.0 * iota + 25.0).sqrt();
            let w_ell = 0.5 * h.omega * (disc - iota + 5.0).sqrt();
            let w_hyp = 0.5 * h.omega * (disc + iota - 5.0).sqrt();
            let delta = blk.lambda_even;
            let den_e = -2.0 * delta + w_ell * w_ell + 3.0 * lam_star;
            let den_h = 2.0 * delta + w_hyp * w_hyp - 3.0 * lam_star;
            let r_e = w_ell * (-delta + 2.0 * w_ell * w_ell - lam_star) / den_e;
            let r_h = -2.0 * w_hyp * (delta + 2.0 * w_hyp * w_hyp + lam_star) / den_h;
            if r_e <= 0.0 || r_h <= 0.0 {
                return Err(Error::Classification(format!(
                    "block normalization factors not positive: {r_e}, {r_h}"
                )));
            }
            let (sr_e, sr_h) = (r_e.sqrt(), r_h.sqrt());
            let c1 = h.omega * (2.0 * delta + w_ell * w_ell - 3.0 * lam_star) / (sr_e * den_e);
            let c2 = h.omega * (-2.0 * delta + w_hyp * w_hyp + 3.0 * lam_star) / (sr_h * den_h);
            let d1 = w_ell * (-2.0 * delta + w_ell * w_ell + lam_star) / (sr_e * den_e);
            let d2 = (2.0 * w_hyp * lam_star / den_h + w_hyp) / sr_h;
            let e1 = 2.0 * w_ell * h.omega / (sr_e * den_e);
            let e2 = 2.0 * w_hyp * h.omega / (sr_h * den_h);
            // z rows for this block: q_odd, q_even, p_odd, p_even
            let (qo, qe) = (base + 2 * bi, base + 2 * bi + 1);
            let (po, pe) = (n + qo, n + qe);
            // chart columns: elliptic pair at slot, hyperbolic pair at slot+1
            let (fq_e, fp_e) = (slot, n + slot);
            let (fq_h, fp_h) = (slot + 1, n + slot + 1);
            // p_odd  = c1 fq_e + c2 (fp_h + fq_h)
            t[(po, fq_e)] = c1;
            t[(po, fp_h)] = c2;
            t[(po, fq_h)] = c2;
            // p_even = d1 fp_e + d2 (-fp_h + fq_h)
            t[(pe, fp_e)] = d1;
            t[(pe, fp_h)] = -d2;
            t[(pe, fq_h)] = d2;
            // q_odd  = -e1 fp_e + e2 (-fp_h + fq_h)
            t[(qo, fp_e)] = -e1;
            t[(qo, fp_h)] = -e2;
            t[(qo, fq_h)] = e2;
            // q_even = fq_e / sr_e + (fp_h + fq_h)/sr_h
            t[(qe, fq_e)] = 1.0 / sr_e;
            t[(qe, fp_h)] = 1.0 / sr_h;
            t[(qe, fq_h)] = 1.0 / sr_h;
            pairs.push(PairKind::Elliptic { omega: w_ell });
            pairs.push(PairKind::Hyperbolic { omega: w_hyp });
            slot += 2;
        }
    } else {
        // generic eigenplane construction on the shape subblock
        let s_full = h.h2_hessian();
        let base = if h.has_radial_pair() { 1 } else { 0 };
        let sub: Vec<usize> = (base..n).chain(n + base..2 * n).collect();
        let m = sub.len();
        let mut s_sub = DMatrix::zeros(m, m);
        for (i, &zi) in sub.iter().enumerate() {
            for (j, &zj) in sub.iter().enumerate() {
                s_sub[(i, j)] = s_full[(zi, zj)];
            }
        }
        let sig_sub = sigma(m / 2);
        let a_sub = &sig_sub * &s_sub;
        for &w in &freq.elliptic {
            let (e, f, sw) = elliptic_plane(&a_sub, &sig_sub, w)?;
            for (i, &zi) in sub.iter().enumerate() {
                t[(zi, slot)] = e[i];
                t[(zi, n + slot)] = f[i];
            }
            pairs.push(PairKind::Elliptic { omega: sw });
            slot += 1;
        }
        for &w in &freq.hyperbolic {
            let (e, f) = hyperbolic_plane(&a_sub, &sig_sub, w)?;
            for (i, &zi) in sub.iter().enumerate() {
                t[(zi, slot)] = e[i];
                t[(zi, n + slot)] = f[i];
            }
            pairs.push(PairKind::Hyperbolic { omega: w });
            slot += 1;
        }
    }

    if slot != n {
        return Err(Error::Classification(format!(
            "chart built {slot} pairs for {n} degrees of freedom"
        )));
    }
    let chart = SymplecticChart {
        dof: n,
        pairs,
        t: t.as_slice().to_vec(),
    };
    let resid = chart.symplectic_residual();
    if resid > 1e-10 {
        return Err(Error::Classification(format!(
            "chart symplecticity residual {resid:e}"
        )));
    }
    // verify the quadratic form actually lands on the target
    let diag = apply_real_chart(h, &chart)?;
    let target = chart_target_h2(&chart)?;
    let err = diag.grade(2).sub(&target)?.norm();
    if err > 1e-9 * h.h2.norm().max(1.0) {
        return Err(Error::Classification(format!(
            "chart missed the diagonal quadratic form by {err:e}"
        )));
    }
    Ok(chart)
}

/// H composed with the real chart (still real variables).
pub fn apply_real_chart(h: &HamiltonianExpansion, chart: &SymplecticChart) -> Result<TruncPoly> {
    let nv = 2 * h.dof;
    let t = chart.matrix();
    let mut subst = Vec::with_capacity(nv);
    for row in 0..nv {
        let mut p = TruncPoly::zero(nv, 4);
        for col in 0..nv {
            if t[(row, col)] != 0.0 {
                p = p.add(&TruncPoly::variable(nv, 4, col, t[(row, col)]))?;
            }
        }
        subst.push(p);
    }
    h.poly().compose(&subst)
}

/// The diagonal quadratic form the chart is required to reach.
pub fn chart_target_h2(chart: &SymplecticChart) -> Result<TruncPoly> {
    let n = chart.dof;
    let nv = 2 * n;
    let mut tgt = TruncPoly::zero(nv, 4);
    for (j, pk) in chart.pairs.iter().enumerate() {
        let q = TruncPoly::variable(nv, 4, j, 1.0);
        let p = TruncPoly::variable(nv, 4, n + j, 1.0);
        match pk {
            PairKind::Elliptic { omega } => {
                tgt = tgt.add(&q.mul(&q)?.scale(0.5 * omega))?;
                tgt = tgt.add(&p.mul(&p)?.scale(0.5 * omega))?;
            }
            PairKind::Hyperbolic { omega } => {
                tgt = tgt.add(&p.mul(&q)?.scale(*omega))?;
            }
        }
    }
    Ok(tgt)
}

/// H in complexified variables (zeta, eta): H2 = sum_j Omega_j zeta_j eta_j
/// with Omega = i w (elliptic) or w (hyperbolic).
pub fn complexified(h: &HamiltonianExpansion, chart: &SymplecticChart) -> Result<TruncPoly> {
    chart.to_complex_vars(&h.poly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{solve_euler3, solve_lagrange};
    use crate::hamiltonian::{build_hamiltonian, potential_expansion};
    use crate::masses::MassSystem;
    use approx::assert_relative_eq;

    fn lagrange_h(masses: &[f64]) -> HamiltonianExpansion {
        let m = MassSystem::new(masses.to_vec()).unwrap();
        let c = solve_lagrange(&m).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        build_hamiltonian(&c, &f).unwrap()
    }

    #[test]
    fn lagrange_frequencies_match_closed_forms() {
        let h = lagrange_h(&[0.98, 0.01, 0.01]);
        let fr = frequencies(&h).unwrap();
        let beta = 0.0197f64;
        let gamma = (1.0 - 27.0 * beta).sqrt();
        let w0 = beta.powf(0.75);
        assert_relative_eq!(fr.omega0.unwrap(), w0, max_relative = 1e-12);
        assert_relative_eq!(
            fr.elliptic[0],
            ((1.0 - gamma) / 2.0).sqrt() * w0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            fr.elliptic[1],
            ((1.0 + gamma) / 2.0).sqrt() * w0,
            max_relative = 1e-10
        );
        assert!(fr.hyperbolic.is_empty());
    }

    #[test]
    fn lagrange_chart_is_symplectic_with_krein_signs() {
        let h = lagrange_h(&[0.98, 0.01, 0.01]);
        let chart = diagonalize(&h).unwrap();
        assert!(chart.symplectic_residual() < 1e-12);
        // signed frequencies (+w0, -w1, +w2)
        let signs: Vec<f64> = chart.pairs.iter().map(|p| p.frequency().signum()).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn euler_chart_matches_printed_block_form() {
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let chart = diagonalize(&h).unwrap();
        assert!(chart.symplectic_residual() < 1e-12);
        assert!(chart.pairs[1].is_elliptic());
        assert!(!chart.pairs[2].is_elliptic());
        // omega1 > omega0 for the Euler case
        assert!(chart.pairs[1].frequency() > chart.pairs[0].frequency());
        // complexified H2 = i w0 z0 e0 + i w1 z1 e1 + w2 z2 e2
        let hz = complexified(&h, &chart).unwrap();
        let h2z = hz.grade(2);
        let divs = chart.divisor_frequencies();
        for (j, d) in divs.iter().enumerate() {
            let mut exps = vec![0u8; 6];
            exps[j] = 1;
            exps[3 + j] = 1;
            let got = h2z.coeff(&exps);
            assert_relative_eq!(got.re, d.re, epsilon = 1e-10);
            assert_relative_eq!(got.im, d.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn complex_chart_round_trip() {
        let h = lagrange_h(&[0.9, 0.06, 0.04]);
        let chart = diagonalize(&h).unwrap();
        let tc = chart.complex_matrix();
        // real point -> complex coordinates -> back
        let z = DVector::from_vec(vec![0.01, -0.02, 0.03, 0.005, -0.01, 0.02]);
        let zc = z.map(|x| Complex64::new(x, 0.0));
        let w = tc.clone().lu().solve(&zc).unwrap();
        let back = &tc * &w;
        for i in 0..6 {
            assert_relative_eq!(back[i].re, z[i], epsilon = 1e-12);
            assert!(back[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn generic_path_agrees_with_explicit_blocks() {
        // same Hamiltonian, block chart vs eigenplane chart: frequencies and
        // Krein signs must agree (charts differ by a symplectic gauge)
        let m = MassSystem::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = solve_euler3(&m, [0, 1, 2]).unwrap();
        let f = potential_expansion(&m.normalized_to_unit_total(), &c).unwrap();
        let h = build_hamiltonian(&c, &f).unwrap();
        let explicit = diagonalize(&h).unwrap();
        let mut generic_h = h.clone();
        generic_h.blocks = None;
        let generic = diagonalize(&generic_h).unwrap();
        assert!(generic.symplectic_residual() < 1e-10);
        let we: Vec<f64> = explicit.pairs.iter().map(|p| p.frequency()).collect();
        let mut wg: Vec<f64> = generic.pairs.iter().map(|p| p.frequency()).collect();
        // generic path lists elliptic pairs first
        let reordered = vec![wg[0], wg[1], wg.pop().unwrap()];
        for (a, b) in we.iter().zip(&reordered) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }
}
