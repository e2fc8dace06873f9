//! Integer-relation scanning of frequency vectors, membership tests for the
//! pruned Lagrange mass space, and the combinatorial nonresonance check for
//! the collinear frequency-ratio sequence a_k.

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of an exhaustive lattice scan.
#[derive(Debug, Clone, Serialize)]
pub struct ResonanceReport {
    pub order_checked: u32,
    /// Offending vectors with |k . w| below tolerance, sorted by |k . w|
    /// then lexicographically. Only canonical representatives are listed
    /// (first nonzero entry positive).
    pub offending: Vec<(Vec<i32>, f64)>,
    /// Minimum |k . w| over the whole scanned lattice.
    pub min_divisor: f64,
    pub tol: f64,
    /// Informational (c, upsilon) Diophantine estimate, when requested.
    pub diophantine_fit: Option<(f64, f64)>,
}

fn enumerate_lattice(n: usize, order: u32, mut visit: impl FnMut(&[i32])) {
    // canonical half-lattice: first nonzero entry positive
    let mut k = vec![0i32; n];
    fn rec(
        k: &mut Vec<i32>,
        idx: usize,
        budget: i32,
        started: bool,
        visit: &mut impl FnMut(&[i32]),
    ) {
        if idx == k.len() {
            if started {
                visit(k);
            }
            return;
        }
        for v in -budget..=budget {
            if !started && v < 0 {
                continue;
            }
            k[idx] = v;
            rec(k, idx + 1, budget - v.abs(), started || v != 0, visit);
        }
        k[idx] = 0;
    }
    rec(&mut k, 0, order as i32, false, &mut visit);
}

/// Exhaustively scan 1 <= |k_1| + ... + |k_n| <= order for integer relations
/// among the frequencies. `n <= 12` guards the lattice size.
pub fn scan(freqs: &[f64], order: u32, tol: f64) -> Result<ResonanceReport> {
    let n = freqs.len();
    if n == 0 || freqs.iter().any(|w| *w == 0.0 || !w.is_finite()) {
        return Err(Error::Domain("frequencies must be nonzero".into()));
    }
    if n > 12 {
        return Err(Error::Budget(format!(
            "lattice scan limited to 12 frequencies, got {n}"
        )));
    }
    let mut offending = Vec::new();
    let mut min_divisor = f64::INFINITY;
    enumerate_lattice(n, order, |k| {
        let dot: f64 = k.iter().zip(freqs).map(|(&ki, &w)| ki as f64 * w).sum();
        let a = dot.abs();
        if a < min_divisor {
            min_divisor = a;
        }
        if a < tol {
            offending.push((k.to_vec(), a));
        }
    });
    offending.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ResonanceReport {
        order_checked: order,
        offending,
        min_divisor,
        tol,
        diophantine_fit: None,
    })
}

/// Informational Diophantine fit: regress log(min divisor at L1 norm K)
/// against log K for K up to `kmax`, giving |k.w| ~ c / |k|^upsilon.
pub fn diophantine_fit(freqs: &[f64], kmax: u32) -> Result<(f64, f64)> {
    let n = freqs.len();
    if n > 12 {
        return Err(Error::Budget("too many frequencies".into()));
    }
    let mut mins = vec![f64::INFINITY; kmax as usize + 1];
    enumerate_lattice(n, kmax, |k| {
        let l1: i32 = k.iter().map(|x| x.abs()).sum();
        let dot: f64 = k.iter().zip(freqs).map(|(&ki, &w)| ki as f64 * w).sum();
        let a = dot.abs();
        if a < mins[l1 as usize] {
            mins[l1 as usize] = a;
        }
    });
    let pts: Vec<(f64, f64)> = (1..=kmax as usize)
        .filter(|&k| mins[k].is_finite() && mins[k] > 0.0)
        .map(|k| ((k as f64).ln(), mins[k].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain("not enough points for a fit".into()));
    }
    let npts = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    let intercept = (sy - slope * sx) / npts;
    Ok((intercept.exp(), -slope))
}

/// The sequence a_1 = 1, a_k = (1/2) sqrt(sqrt(3^{2k+2} - 34 3^k + 25)
/// - 3^k + 5) for k >= 2: limiting frequency ratios of the collinear chain.
pub fn ak_sequence(n_max: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(n_max);
    if n_max >= 1 {
        a.push(1.0);
    }
    for k in 2..=n_max {
        let p = 3f64.powi(k as i32);
        let disc = (9.0 * p * p - 34.0 * p + 25.0).sqrt();
        a.push(0.5 * (disc - p + 5.0).sqrt());
    }
    a
}

/// Brute-force verification that a_1..a_{N-1} admit none of the five
/// integer relations of order <= 4; reports the smallest margin per case.
#[derive(Debug, Clone, Serialize)]
pub struct AkReport {
    pub n_max: usize,
    /// min |a_{k2} - 2 a_{k1}|
    pub margin_case1: f64,
    /// min |a_{k3} - a_{k2} - a_{k1}|
    pub margin_case2: f64,
    /// min |a_{k2} - 3 a_{k1}|
    pub margin_case3: f64,
    /// min over the three order-4 triple relations
    pub margin_case4: f64,
    /// min |a_{k4} - a_{k3} - a_{k2} - a_{k1}|
    pub margin_case5: f64,
    pub offenders: usize,
}

pub fn verify_ak_nonresonant(n_max: usize) -> Result<AkReport> {
    if n_max > 40 {
        return Err(Error::Budget("a_k enumeration limited to N <= 40".into()));
    }
    if n_max < 2 {
        return Err(Error::Domain("need at least two frequencies".into()));
    }
    let a = ak_sequence(n_max - 1);
    let n = a.len();
    let mut m1 = f64::INFINITY;
    let mut m2 = f64::INFINITY;
    let mut m3 = f64::INFINITY;
    let mut m4 = f64::INFINITY;
    let mut m5 = f64::INFINITY;
    for k1 in 0..n {
        for k2 in k1 + 1..n {
            m1 = m1.min((a[k2] - 2.0 * a[k1]).abs());
            m3 = m3.min((a[k2] - 3.0 * a[k1]).abs());
            for k3 in k2 + 1..n {
                m2 = m2.min((a[k3] - a[k2] - a[k1]).abs());
                m4 = m4
                    .min((a[k3] - a[k2] - 2.0 * a[k1]).abs())
                    .min((a[k3] - 2.0 * a[k2] - a[k1]).abs())
                    .min((a[k3] - 2.0 * a[k2] + a[k1]).abs());
                for k4 in k3 + 1..n {
                    m5 = m5.min((a[k4] - a[k3] - a[k2] - a[k1]).abs());
                }
            }
        }
    }
    let offenders = [m1, m2, m3, m4, m5]
        .iter()
        .filter(|m| m.is_finite() && **m == 0.0)
        .count();
    Ok(AkReport {
        n_max,
        margin_case1: m1,
        margin_case2: m2,
        margin_case3: m3,
        margin_case4: m4,
        margin_case5: m5,
        offenders,
    })
}

/// Membership in the pruned Lagrange mass space: beta in (0, 1/27) away
/// from the five resonant values, m1 in ((sqrt 69 + 9)/18, 1), and the
/// (beta, m1) pair parameterizing a genuine mass triple.
pub fn omega_ps_membership(beta: f64, m1: f64) -> bool {
    use crate::normal_form::OMEGA_PS_EXCLUDED;
    if !(0.0 < beta && beta < 1.0 / 27.0) {
        return false;
    }
    if OMEGA_PS_EXCLUDED
        .iter()
        .any(|&b| (beta - b).abs() <= 1e-12 * b)
    {
        return false;
    }
    let m1_lo = (69f64.sqrt() + 9.0) / 18.0;
    if !(m1 > m1_lo && m1 < 1.0) {
        return false;
    }
    // Omega constraints: real positive m2, m3
    if beta - m1 * (1.0 - m1) <= 0.0 {
        return false;
    }
    4.0 * beta <= 1.0 + 2.0 * m1 - 3.0 * m1 * m1
}

/// The beta values excluded from the Lyapunov family of the omega_1
/// direction: beta = (1 - (1 - 2/n^2)^2)/27 makes omega_0 = n omega_1, and
/// beta = (1 - (1 - 2/(n^2+1))^2)/27 makes omega_2 = n omega_1.
pub fn lyapunov_excluded_betas(n_max: u32) -> Vec<(u32, f64, f64)> {
    (2..=n_max)
        .map(|n| {
            let nn = (n * n) as f64;
            let b1 = (1.0 - (1.0 - 2.0 / nn).powi(2)) / 27.0;
            let b2 = (1.0 - (1.0 - 2.0 / (nn + 1.0)).powi(2)) / 27.0;
            (n, b1, b2)
        })
        .collect()
}
