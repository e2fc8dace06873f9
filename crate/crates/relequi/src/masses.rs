//! Mass systems and the normalization conventions used by the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point masses of the planar N-body problem. The sole physical input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassSystem {
    masses: Vec<f64>,
    /// Permit exactly one zero mass (restricted problems).
    #[serde(default)]
    allow_zero: bool,
}

impl MassSystem {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        Self::build(masses, false)
    }

    /// Admits a single zero mass for the restricted variants.
    pub fn new_restricted(masses: Vec<f64>) -> Result<Self> {
        Self::build(masses, true)
    }

    fn build(masses: Vec<f64>, allow_zero: bool) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::Mass("need at least two bodies".into()));
        }
        let zeros = masses.iter().filter(|&&m| m == 0.0).count();
        for &m in &masses {
            if !m.is_finite() || m < 0.0 || (m == 0.0 && !allow_zero) {
                return Err(Error::Mass(format!("non-positive mass {m}")));
            }
        }
        if zeros > 1 {
            return Err(Error::Mass("at most one zero mass is admitted".into()));
        }
        Ok(MassSystem { masses, allow_zero })
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.masses[k]
    }

    /// Total mass.
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Rescale so the total mass is 1 (the three-body convention).
    pub fn normalized_to_unit_total(&self) -> Self {
        let t = self.total();
        MassSystem {
            masses: self.masses.iter().map(|m| m / t).collect(),
            allow_zero: self.allow_zero,
        }
    }

    /// Three-body masses from the (beta, m1) parameterization of the mass
    /// space: beta = m1 m2 + m2 m3 + m1 m3 with m1 + m2 + m3 = 1 and
    /// m1 >= m2 >= m3.
    pub fn lagrange_from_beta_m1(beta: f64, m1: f64) -> Result<Self> {
        if !(0.0 < beta && beta <= 1.0 / 3.0) || !(0.0 < m1 && m1 < 1.0) {
            return Err(Error::Domain(format!("(beta, m1) = ({beta}, {m1})")));
        }
        // m2 m3 = beta - m1 (1 - m1), m2 + m3 = 1 - m1
        let s = 1.0 - m1;
        let p = beta - m1 * s;
        if p <= 0.0 {
            return Err(Error::Domain(format!(
                "beta - m1 (1 - m1) = {p} must be positive"
            )));
        }
        let disc = s * s - 4.0 * p;
        if disc < 0.0 {
            return Err(Error::Domain(format!(
                "4 beta <= 1 + 2 m1 - 3 m1^2 violated (disc = {disc})"
            )));
        }
        let m2 = 0.5 * (s + disc.sqrt());
        let m3 = 0.5 * (s - disc.sqrt());
        MassSystem::new(vec![m1, m2, m3])
    }

    /// Apply a permutation: resulting masses are `masses[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::Order("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.n()];
        for &p in perm {
            if p >= self.n() || seen[p] {
                return Err(Error::Order(format!("invalid permutation {perm:?}")));
            }
            seen[p] = true;
        }
        Ok(MassSystem {
            masses: perm.iter().map(|&p| self.masses[p]).collect(),
            allow_zero: self.allow_zero,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_masses() {
        assert!(MassSystem::new(vec![1.0, -0.5]).is_err());
        assert!(MassSystem::new(vec![1.0, 0.0]).is_err());
        assert!(MassSystem::new_restricted(vec![1.0, 0.0]).is_ok());
        assert!(MassSystem::new_restricted(vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn beta_m1_roundtrip() {
        let m = MassSystem::lagrange_from_beta_m1(0.0197, 0.98).unwrap();
        let ms = m.masses();
        assert_relative_eq!(ms[0] + ms[1] + ms[2], 1.0, epsilon = 1e-14);
        let beta = ms[0] * ms[1] + ms[1] * ms[2] + ms[0] * ms[2];
        assert_relative_eq!(beta, 0.0197, epsilon = 1e-14);
    }

    #[test]
    fn beta_m1_rejects_complex_masses() {
        assert!(MassSystem::lagrange_from_beta_m1(0.3, 0.5).is_err());
    }
}
