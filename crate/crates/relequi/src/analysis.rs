//! End-to-end pipelines: solve a configuration, expand the Hamiltonian,
//! normalize, scan for resonances and issue the nondegeneracy verdict.
//! This is the layer the CLI and the C API drive.

use serde::Serialize;

use crate::central::{self, CentralConfig, ScaleTarget};
use crate::collinear;
use crate::error::{Error, Result};
use crate::hamiltonian::{self, HamiltonianExpansion};
use crate::masses::MassSystem;
use crate::normal_form::{self, CenterRestriction, NormalForm};
use crate::resonance::{self, ResonanceReport};
use crate::spectrum::{self, FrequencyData, SymplecticChart};

/// Which relative equilibrium to analyze.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum ConfigRequest {
    Lagrange { beta: f64, m1: f64 },
    LagrangeMasses { masses: Vec<f64> },
    Euler3 { masses: Vec<f64>, ordering: [usize; 3] },
    Collinear { masses: Vec<f64> },
}

/// Everything the analyze command reports.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub request: ConfigRequest,
    pub masses: Vec<f64>,
    pub config: CentralConfig,
    pub frequencies: FrequencyData,
    /// Signed frequency vector in pair order (Krein signs on elliptic pairs).
    pub signed_freq: Vec<f64>,
    pub omega_jk: Vec<Vec<f64>>,
    pub center_indices: Vec<usize>,
    pub center_matrix: Vec<Vec<f64>>,
    pub det_center: f64,
    pub nondegenerate: bool,
    pub residual3: f64,
    pub residual4: f64,
    pub resonance: ResonanceReport,
    /// Collinear runs carry the 1-D spectrum for the induction cross-check.
    pub iotas: Option<Vec<f64>>,
    pub omega: f64,
    pub lambda_star: f64,
}

pub struct Pipeline {
    pub masses: MassSystem,
    pub config: CentralConfig,
    pub expansion: HamiltonianExpansion,
    pub chart: SymplecticChart,
    pub normal_form: NormalForm,
    pub center: CenterRestriction,
    pub iotas: Option<Vec<f64>>,
}

/// Degeneracy threshold used by the verdicts; callers can re-judge from the
/// reported determinant.
pub const DET_THRESHOLD: f64 = normal_form::DEGENERACY_TOL;

/// Scan order used for the hypothesis checks.
pub const SCAN_ORDER: u32 = 4;

pub fn solve_request(req: &ConfigRequest) -> Result<(MassSystem, CentralConfig, Option<Vec<f64>>)> {
    match req {
        ConfigRequest::Lagrange { beta, m1 } => {
            if !resonance::omega_ps_membership(*beta, *m1) {
                return Err(Error::Domain(format!(
                    "(beta, m1) = ({beta}, {m1}) outside the pruned mass space Omega_ps"
                )));
            }
            let m = MassSystem::lagrange_from_beta_m1(*beta, *m1)?;
            let c = central::solve_lagrange(&m)?;
            Ok((m.normalized_to_unit_total(), c, None))
        }
        ConfigRequest::LagrangeMasses { masses } => {
            let m = MassSystem::new(masses.clone())?.normalized_to_unit_total();
            let beta = m.mass(0) * m.mass(1) + m.mass(1) * m.mass(2) + m.mass(0) * m.mass(2);
            let m1 = m.mass(0);
            if !resonance::omega_ps_membership(beta, m1) {
                return Err(Error::Domain(format!(
                    "(beta, m1) = ({beta}, {m1}) outside the pruned mass space Omega_ps"
                )));
            }
            let c = central::solve_lagrange(&m)?;
            Ok((m, c, None))
        }
        ConfigRequest::Euler3 { masses, ordering } => {
            let m = MassSystem::new(masses.clone())?;
            let c = central::solve_euler3(&m, *ordering)?;
            Ok((m.normalized_to_unit_total(), c, None))
        }
        ConfigRequest::Collinear { masses } => {
            let m = MassSystem::new_restricted(masses.clone())?;
            let (c, spec) = collinear::solve_collinear(&m)?;
            // the pipeline runs at the unit-norm scale
            Ok((m, c.scaled(ScaleTarget::UnitNorm), Some(spec.iotas)))
        }
    }
}

/// Run the full normalization pipeline on a solved configuration.
pub fn run_pipeline(req: &ConfigRequest) -> Result<Pipeline> {
    let (m, config, iotas) = solve_request(req)?;
    let expansion = hamiltonian::build_hamiltonian(
        &config,
        &hamiltonian::potential_expansion(&m, &config)?,
    )?;
    let chart = spectrum::diagonalize(&expansion)?;
    let nf = normal_form::normalize(&expansion, &chart)?;
    let center = normal_form::restrict_center(&nf);
    Ok(Pipeline {
        masses: m,
        config,
        expansion,
        chart,
        normal_form: nf,
        center,
        iotas,
    })
}

/// Full analysis: pipeline + resonance scan + verdict.
pub fn analyze(req: &ConfigRequest) -> Result<AnalysisReport> {
    let p = run_pipeline(req)?;
    let mut freq = spectrum::frequencies(&p.expansion)?;
    if let ConfigRequest::Lagrange { beta, .. } = req {
        freq.gamma = Some((1.0 - 27.0 * beta).max(0.0).sqrt());
    }
    if let ConfigRequest::LagrangeMasses { .. } = req {
        let m = &p.masses;
        let beta = m.mass(0) * m.mass(1) + m.mass(1) * m.mass(2) + m.mass(0) * m.mass(2);
        freq.gamma = Some((1.0 - 27.0 * beta).max(0.0).sqrt());
    }
    // scan the signed center-manifold frequencies up to order 4
    let signed: Vec<f64> = p.center.reduced_freq.clone();
    let wmax = signed.iter().map(|w| w.abs()).fold(0.0f64, f64::max);
    let resonance = resonance::scan(&signed, SCAN_ORDER, 1e-9 * wmax)?;
    let (det, nondeg) = normal_form::degeneracy_verdict(&p.center, DET_THRESHOLD);
    Ok(AnalysisReport {
        request: req.clone(),
        masses: p.masses.masses().to_vec(),
        frequencies: freq,
        signed_freq: p.normal_form.freq.clone(),
        omega_jk: p.normal_form.omega_jk.clone(),
        center_indices: p.center.indices.clone(),
        center_matrix: p.center.reduced_matrix.clone(),
        det_center: det,
        nondegenerate: nondeg,
        residual3: p.normal_form.residual3,
        residual4: p.normal_form.residual4,
        resonance,
        iotas: p.iotas,
        omega: p.expansion.omega,
        lambda_star: p.expansion.omega * p.expansion.omega,
        config: p.config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lagrange_analysis_end_to_end() {
        let rep = analyze(&ConfigRequest::Lagrange {
            beta: 0.0197,
            m1: 0.98,
        })
        .unwrap();
        assert!(rep.nondegenerate);
        assert!(rep.resonance.offending.is_empty());
        assert_relative_eq!(rep.omega_jk[0][0], -3.0, epsilon = 1e-9);
        assert_eq!(rep.center_indices.len(), 3);
    }

    #[test]
    fn excluded_beta_is_a_domain_error() {
        let err = analyze(&ConfigRequest::Lagrange {
            beta: 1.0 / 36.0,
            m1: 0.98,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn euler_analysis_end_to_end() {
        let rep = analyze(&ConfigRequest::Euler3 {
            masses: vec![1.0, 1.0, 1.0],
            ordering: [0, 1, 2],
        })
        .unwrap();
        assert!(rep.nondegenerate);
        assert_eq!(rep.center_indices.len(), 2);
        assert_relative_eq!(rep.omega_jk[0][0], -3.0, epsilon = 1e-9);
    }

    #[test]
    fn collinear_analysis_with_iotas() {
        let rep = analyze(&ConfigRequest::Collinear {
            masses: vec![1.0, 0.5, 0.25],
        })
        .unwrap();
        let iotas = rep.iotas.unwrap();
        assert_relative_eq!(iotas[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(iotas[1], 3.0, epsilon = 1e-10);
        assert_eq!(rep.center_indices.len(), 2);
    }
}
