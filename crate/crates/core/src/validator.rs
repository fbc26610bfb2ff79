//! Defect norms for every constraint the split construction relies on.
//!
//! Time derivatives are centered differences between neighbouring snapshots,
//! so the residuals carry an `O(Δt²)` term from the snapshot spacing. All
//! thresholds applied to these norms bind on the max norm.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fieldcalc::{
    advect, cross, cross_dealiased, curl, divergence, laplacian, Norms, VectorField,
};
use crate::pipeline::SolutionBundle;
use crate::pressure::BodyForce;
use crate::{Error, Result};

pub const DIV_U: &str = "div_u";
pub const DIV_UP: &str = "div_up";
pub const CURL_UP: &str = "curl_up";
pub const HARMONICITY: &str = "harmonicity";
pub const SPHERE_DRIFT: &str = "sphere_drift";
pub const MOMENTUM_RESIDUAL: &str = "momentum_residual";
pub const SPLIT_RESIDUAL: &str = "split_residual";
pub const CURL_CONSISTENCY: &str = "curl_consistency";
pub const BELTRAMI_DEFECT: &str = "beltrami_defect";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotReport {
    pub step: usize,
    pub t: f64,
    pub defects: BTreeMap<String, Norms>,
}

impl SnapshotReport {
    pub fn get(&self, name: &str) -> Option<Norms> {
        self.defects.get(name).copied()
    }
}

/// One entry per snapshot, serialized as a JSON array with sorted keys.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub snapshots: Vec<SnapshotReport>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    /// Largest max-norm of a defect over all snapshots.
    pub fn worst(&self, name: &str) -> Option<f64> {
        self.snapshots
            .iter()
            .filter_map(|s| s.get(name))
            .map(|n| n.max)
            .reduce(f64::max)
    }

    /// Defect names present anywhere in the report, sorted.
    pub fn defect_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .snapshots
            .iter()
            .flat_map(|s| s.defects.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}

fn centered_span(bundle: &SolutionBundle, k: usize) -> Result<f64> {
    if k == 0 || k + 1 >= bundle.snapshots.len() {
        return Err(Error::BoundarySnapshot(k));
    }
    Ok(bundle.snapshots[k + 1].t - bundle.snapshots[k - 1].t)
}

fn centered_difference(
    bundle: &SolutionBundle,
    k: usize,
    pick: impl Fn(usize) -> VectorField,
) -> Result<VectorField> {
    let span = centered_span(bundle, k)?;
    Ok(pick(k + 1).sub(&pick(k - 1)).scale(1.0 / span))
}

/// `∂u/∂t + (u·∇)u + ∇p/ρ − ν∇²u + ∇φ_body` at interior snapshot `k`.
pub fn momentum_residual(
    bundle: &SolutionBundle,
    k: usize,
    bf: &BodyForce,
    nu: f64,
) -> Result<VectorField> {
    let dudt = centered_difference(bundle, k, |i| bundle.snapshots[i].u.clone())?;
    let s = &bundle.snapshots[k];
    Ok(dudt
        .add(&advect(&s.u, &s.u))
        .add(&s.grad_p.scale(1.0 / bf.rho()))
        .sub(&laplacian(&s.u).scale(nu))
        .add(bf.grad_phi_body()))
}

/// `∂(u_p + u_w)/∂t − (u_p + u_w) × w − ν∇²u_w` at interior snapshot `k`.
///
/// The product is pointwise, matching the pointwise system the pipeline
/// integrates, so this isolates the time-difference error.
pub fn split_residual(bundle: &SolutionBundle, k: usize, nu: f64) -> Result<VectorField> {
    let dudt = centered_difference(bundle, k, |i| bundle.snapshots[i].u.clone())?;
    let s = &bundle.snapshots[k];
    Ok(dudt
        .sub(&cross(&s.u, &s.w))
        .sub(&laplacian(&s.u_w).scale(nu)))
}

/// Every defect at every snapshot; the centered residuals only at interior
/// ones, harmonicity only when the velocity potential is known.
pub fn constraint_report(
    bundle: &SolutionBundle,
    bf: &BodyForce,
    nu: f64,
) -> Result<ValidationReport> {
    let snapshots = (0..bundle.snapshots.len())
        .into_par_iter()
        .map(|k| snapshot_report(bundle, k, bf, nu))
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport { snapshots })
}

fn snapshot_report(
    bundle: &SolutionBundle,
    k: usize,
    bf: &BodyForce,
    nu: f64,
) -> Result<SnapshotReport> {
    let s = &bundle.snapshots[k];
    let mut defects = BTreeMap::new();
    defects.insert(DIV_U.to_string(), divergence(&s.u).norms());
    defects.insert(DIV_UP.to_string(), divergence(&s.u_p).norms());
    defects.insert(CURL_UP.to_string(), curl(&s.u_p).norms());
    defects.insert(
        SPHERE_DRIFT.to_string(),
        s.u_p.magnitude().sub(&bundle.gamma).norms(),
    );
    let f = cross(&s.u_w, &s.w);
    defects.insert(BELTRAMI_DEFECT.to_string(), f.norms());
    let rhs = cross_dealiased(&s.u_p, &s.w).add(&cross_dealiased(&s.u_w, &s.w));
    defects.insert(CURL_CONSISTENCY.to_string(), curl(&rhs).norms());
    if let Some(lap) = &bundle.phi_vel_laplacian {
        defects.insert(HARMONICITY.to_string(), lap.norms());
    }
    if k > 0 && k + 1 < bundle.snapshots.len() {
        defects.insert(
            MOMENTUM_RESIDUAL.to_string(),
            momentum_residual(bundle, k, bf, nu)?.norms(),
        );
        defects.insert(
            SPLIT_RESIDUAL.to_string(),
            split_residual(bundle, k, nu)?.norms(),
        );
    }
    Ok(SnapshotReport {
        step: s.step,
        t: s.t,
        defects,
    })
}

pub const TABLE_HEADER: &str = "t\tdefect\tl2\tmax";

/// Tab-separated `t, defect, l2, max` rows, one per reported defect.
pub fn emit_defect_table(report: &ValidationReport) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for s in &report.snapshots {
        for (name, n) in &s.defects {
            out.push_str(&format!("{:?}\t{name}\t{:e}\t{:e}\n", s.t, n.l2, n.max));
        }
    }
    out
}
