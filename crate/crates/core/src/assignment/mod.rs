//! The distributed scheme: controller-AP selection, pilot assignment and
//! AP-UE clustering.

mod cluster;
mod controller;
mod pilots;
mod trace;

pub use cluster::{check_validity, form_clusters, ServiceCluster};
pub use controller::{
    build_candidate_sets, compute_gamma_threshold, select_controllers, ControllerAssignment,
    GammaThreshold,
};
pub use pilots::{
    assign_pilots, build_topue_neighbors_contamination, ContaminationMatrix, PilotAssignment,
    TopUeStructure,
};
pub use trace::{MessageTrace, TraceEvent};

pub(crate) use controller::argmax;

use rand::Rng;

use crate::config::GapScale;
use crate::error::Result;
use crate::tensor::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct ProposedOutcome {
    pub controllers: ControllerAssignment,
    pub pilots: PilotAssignment,
    pub cluster: ServiceCluster,
    pub trace: MessageTrace,
}

/// Runs the three stages of the distributed scheme in order. `gap_scale`
/// only affects controller selection; later stages always use linear LSFCs.
pub fn run_proposed<R: Rng + ?Sized>(
    lsfc: &Grid<f64>,
    n_pilots: usize,
    max_iter: usize,
    gap_scale: GapScale,
    rng: &mut R,
) -> Result<ProposedOutcome> {
    let mut trace = MessageTrace::new();
    let controllers = match gap_scale {
        GapScale::Linear => select_controllers(lsfc, n_pilots, rng, &mut trace)?,
        GapScale::Db => {
            let db = lsfc.map(|b| 10.0 * b.log10());
            select_controllers(&db, n_pilots, rng, &mut trace)?
        }
    };
    let structure = build_topue_neighbors_contamination(lsfc, n_pilots, &controllers.controller_of);
    let pilots = assign_pilots(
        &controllers,
        &structure,
        lsfc,
        n_pilots,
        max_iter,
        &mut trace,
    )?;
    let cluster = form_clusters(&pilots.pilot_of, &controllers.controller_of, lsfc, n_pilots);
    Ok(ProposedOutcome {
        controllers,
        pilots,
        cluster,
        trace,
    })
}
