//! Reference schemes: random pilots and the centralized scalable scheme in
//! which every UE appoints a master AP that picks its least-contaminated pilot.
//! Both are evaluated under the same one-UE-per-pilot-per-AP service rule as
//! the distributed scheme.

use std::collections::BTreeSet;

use rand::Rng;

use crate::assignment::{argmax, form_clusters, PilotAssignment, ServiceCluster};
use crate::error::{Error, Result};
use crate::tensor::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    /// Controller (random) or master (scalable) AP of each UE.
    pub controller_of: Vec<usize>,
    pub pilots: PilotAssignment,
    pub cluster: ServiceCluster,
}

pub fn random_pilot_assignment<R: Rng + ?Sized>(
    n_ues: usize,
    n_pilots: usize,
    rng: &mut R,
) -> PilotAssignment {
    assert!(n_pilots >= 1);
    PilotAssignment::plain((0..n_ues).map(|_| rng.random_range(0..n_pilots)).collect())
}

/// Controllers for a pilot draw. UEs go strongest first; each takes its best
/// AP that has room and holds no UE on the same pilot. A UE for which no such
/// AP exists redraws its pilot uniformly among pilots that still have one,
/// which always succeeds while `T <= M * L_p`.
pub fn capped_controllers<R: Rng + ?Sized>(
    lsfc: &Grid<f64>,
    pilot_of: &mut [usize],
    n_pilots: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let (n_ues, n_aps) = (lsfc.rows(), lsfc.cols());
    let best: Vec<f64> = (0..n_ues)
        .map(|t| lsfc.row(t)[argmax(lsfc.row(t))])
        .collect();
    let mut order: Vec<usize> = (0..n_ues).collect();
    order.sort_by(|&a, &b| best[b].total_cmp(&best[a]).then(a.cmp(&b)));

    let mut pilots_held: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_aps];
    let mut controller_of = vec![usize::MAX; n_ues];
    let best_free = |held: &[BTreeSet<usize>], t: usize, p: usize| {
        (0..n_aps)
            .filter(|&m| held[m].len() < n_pilots && !held[m].contains(&p))
            .max_by(|&a, &b| lsfc[(t, a)].total_cmp(&lsfc[(t, b)]).then(b.cmp(&a)))
    };
    for t in order {
        let m = match best_free(&pilots_held, t, pilot_of[t]) {
            Some(m) => m,
            None => {
                let open: Vec<usize> = (0..n_pilots)
                    .filter(|&p| best_free(&pilots_held, t, p).is_some())
                    .collect();
                if open.is_empty() {
                    return Err(Error::Capacity(format!("no AP can control UE {t}")));
                }
                pilot_of[t] = open[rng.random_range(0..open.len())];
                best_free(&pilots_held, t, pilot_of[t]).expect("pilot has a free AP")
            }
        };
        pilots_held[m].insert(pilot_of[t]);
        controller_of[t] = m;
    }
    Ok(controller_of)
}

pub fn run_random<R: Rng + ?Sized>(
    lsfc: &Grid<f64>,
    n_pilots: usize,
    rng: &mut R,
) -> Result<BaselineOutcome> {
    let mut pilots = random_pilot_assignment(lsfc.rows(), n_pilots, rng);
    let controller_of = capped_controllers(lsfc, &mut pilots.pilot_of, n_pilots, rng)?;
    let cluster = form_clusters(&pilots.pilot_of, &controller_of, lsfc, n_pilots);
    Ok(BaselineOutcome {
        controller_of,
        pilots,
        cluster,
    })
}

/// UEs in index order appoint the strongest AP still mastering fewer than
/// `L_p` UEs; the master gives the pilot with the least summed LSFC of its
/// current users, among pilots none of its own UEs hold.
pub fn scalable_pilot_assignment(lsfc: &Grid<f64>, n_pilots: usize) -> Result<BaselineOutcome> {
    let (n_ues, n_aps) = (lsfc.rows(), lsfc.cols());
    let mut mastered: Vec<Vec<usize>> = vec![Vec::new(); n_aps];
    let mut pilot_of = vec![usize::MAX; n_ues];
    let mut master_of = vec![usize::MAX; n_ues];
    for t in 0..n_ues {
        let master = (0..n_aps)
            .filter(|&m| mastered[m].len() < n_pilots)
            .max_by(|&a, &b| lsfc[(t, a)].total_cmp(&lsfc[(t, b)]).then(b.cmp(&a)))
            .ok_or_else(|| {
                Error::Capacity(format!("every AP masters {n_pilots} UEs; UE {t} left over"))
            })?;
        let own: BTreeSet<usize> = mastered[master].iter().map(|&u| pilot_of[u]).collect();
        let interference = |p: usize| -> f64 {
            (0..t)
                .filter(|&u| pilot_of[u] == p)
                .map(|u| lsfc[(u, master)])
                .sum()
        };
        let p = (0..n_pilots)
            .filter(|p| !own.contains(p))
            .min_by(|&a, &b| interference(a).total_cmp(&interference(b)).then(a.cmp(&b)))
            .expect("master has a free pilot");
        pilot_of[t] = p;
        master_of[t] = master;
        mastered[master].push(t);
    }
    let cluster = form_clusters(&pilot_of, &master_of, lsfc, n_pilots);
    Ok(BaselineOutcome {
        controller_of: master_of,
        pilots: PilotAssignment::plain(pilot_of),
        cluster,
    })
}
