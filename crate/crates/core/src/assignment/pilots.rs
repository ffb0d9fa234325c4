//! Distributed pilot assignment.
//!
//! Each AP's top-`L_p` UEs (by LSFC) must end up on distinct pilots. Those
//! pairs form the contamination matrix `Ad`. Controllers hand pilots to their
//! UEs, APs compare the pilots of their top UEs and revoke duplicates, and
//! every UE then drops the pilots held by its `Ad` neighbours from its
//! available set. Repeats until nothing more can be assigned.

use std::collections::{BTreeMap, BTreeSet};

use super::controller::ControllerAssignment;
use super::trace::{MessageTrace, TraceEvent};
use crate::error::{Error, Result};
use crate::tensor::Grid;

/// Symmetric binary matrix over UEs; `true` forbids sharing a pilot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContaminationMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl ContaminationMatrix {
    pub fn new(n: usize) -> Self {
        ContaminationMatrix {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn mark_pair(&mut self, a: usize, b: usize) {
        if a != b {
            self.bits[a * self.n + b] = true;
            self.bits[b * self.n + a] = true;
        }
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&b| self.get(a, b))
    }

    pub fn is_symmetric_hollow(&self) -> bool {
        (0..self.n)
            .all(|a| !self.get(a, a) && (0..self.n).all(|b| self.get(a, b) == self.get(b, a)))
    }
}

/// `U_m`, `M_m^nb` and `Ad`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopUeStructure {
    /// Per AP, up to `L_p` UEs in decreasing LSFC order.
    pub top_ues: Vec<Vec<usize>>,
    pub neighbor_sets: Vec<BTreeSet<usize>>,
    pub contamination: ContaminationMatrix,
}

pub fn build_topue_neighbors_contamination(
    lsfc: &Grid<f64>,
    n_pilots: usize,
    controller_of: &[usize],
) -> TopUeStructure {
    let (n_ues, n_aps) = (lsfc.rows(), lsfc.cols());
    let mut top_ues = Vec::with_capacity(n_aps);
    let mut neighbor_sets = vec![BTreeSet::new(); n_aps];
    let mut contamination = ContaminationMatrix::new(n_ues);
    for m in 0..n_aps {
        let mut order: Vec<usize> = (0..n_ues).collect();
        order.sort_by(|&a, &b| lsfc[(b, m)].total_cmp(&lsfc[(a, m)]).then(a.cmp(&b)));
        order.truncate(n_pilots.min(n_ues));
        for &t in &order {
            let c = controller_of[t];
            if c != m {
                neighbor_sets[m].insert(c);
                neighbor_sets[c].insert(m);
            }
        }
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                contamination.mark_pair(a, b);
            }
        }
        top_ues.push(order);
    }
    TopUeStructure {
        top_ues,
        neighbor_sets,
        contamination,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotAssignment {
    /// Pilot index in `[0, L_p)` per UE.
    pub pilot_of: Vec<usize>,
    /// `L_t^p` when the loop stopped. Empty for schemes that do not track it.
    pub available: Vec<BTreeSet<usize>>,
    /// Empty for schemes that do not build it.
    pub contamination: ContaminationMatrix,
    pub neighbor_sets: Vec<BTreeSet<usize>>,
    pub top_ues: Vec<Vec<usize>>,
    /// UEs that received their pilot after the loop.
    pub fallback_ues: Vec<usize>,
    /// Loop iterations `I`.
    pub while_iterations: usize,
}

impl PilotAssignment {
    /// Assignment without any of the distributed bookkeeping.
    pub fn plain(pilot_of: Vec<usize>) -> Self {
        PilotAssignment {
            pilot_of,
            available: Vec::new(),
            contamination: ContaminationMatrix::new(0),
            neighbor_sets: Vec::new(),
            top_ues: Vec::new(),
            fallback_ues: Vec::new(),
            while_iterations: 0,
        }
    }
}

pub fn assign_pilots(
    controllers: &ControllerAssignment,
    structure: &TopUeStructure,
    lsfc: &Grid<f64>,
    n_pilots: usize,
    max_iter: usize,
    trace: &mut MessageTrace,
) -> Result<PilotAssignment> {
    let available = vec![(0..n_pilots).collect(); lsfc.rows()];
    assign_pilots_from(
        controllers,
        structure,
        lsfc,
        n_pilots,
        max_iter,
        available,
        trace,
    )
}

/// [`assign_pilots`] starting from given `L_t^p` sets.
pub(crate) fn assign_pilots_from(
    controllers: &ControllerAssignment,
    structure: &TopUeStructure,
    lsfc: &Grid<f64>,
    n_pilots: usize,
    max_iter: usize,
    mut available: Vec<BTreeSet<usize>>,
    trace: &mut MessageTrace,
) -> Result<PilotAssignment> {
    let n_ues = lsfc.rows();
    let controlled = &controllers.controlled;
    let controller_of = &controllers.controller_of;
    let ad = &structure.contamination;
    let mut pilot: Vec<Option<usize>> = vec![None; n_ues];

    let sibling_pilots = |pilot: &[Option<usize>], t: usize| -> BTreeSet<usize> {
        controlled[controller_of[t]]
            .iter()
            .filter(|&&s| s != t)
            .filter_map(|&s| pilot[s])
            .collect()
    };
    // An unassigned UE whose controller could still give it a pilot this round.
    let assignable = |pilot: &[Option<usize>], available: &[BTreeSet<usize>], t: usize| {
        pilot[t].is_none() && {
            let used = sibling_pilots(pilot, t);
            available[t].iter().any(|p| !used.contains(p))
        }
    };

    let mut iteration = 0;
    while (0..n_ues).any(|t| assignable(&pilot, &available, t)) {
        iteration += 1;
        if iteration > max_iter {
            let pending: Vec<usize> = (0..n_ues).filter(|&t| pilot[t].is_none()).collect();
            return Err(Error::IterationLimit {
                algorithm: "distributed pilot assignment",
                limit: max_iter,
                trace: format!(
                    "unassigned UEs {pending:?}, available sets {:?}",
                    pending.iter().map(|&t| &available[t]).collect::<Vec<_>>()
                ),
            });
        }
        trace.push(TraceEvent::PilotIteration { iteration });

        // Controllers give distinct, locally unused pilots, strongest UE first,
        // each taking the lowest-index pilot still in its set.
        for (m, ues) in controlled.iter().enumerate() {
            let mut used: BTreeSet<usize> = ues.iter().filter_map(|&t| pilot[t]).collect();
            let mut waiting: Vec<usize> = ues
                .iter()
                .copied()
                .filter(|&t| pilot[t].is_none())
                .collect();
            waiting.sort_by(|&a, &b| lsfc[(b, m)].total_cmp(&lsfc[(a, m)]).then(a.cmp(&b)));
            for t in waiting {
                if let Some(p) = available[t].iter().copied().find(|p| !used.contains(p)) {
                    pilot[t] = Some(p);
                    used.insert(p);
                }
            }
        }
        notify_neighbors(structure, iteration, 1, trace);

        // Every AP checks its top UEs against the same snapshot; a UE that
        // loses anywhere gives its pilot up.
        let mut losers = BTreeSet::new();
        for top in &structure.top_ues {
            let mut by_pilot: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &t in top {
                if let Some(p) = pilot[t] {
                    by_pilot.entry(p).or_default().push(t);
                }
            }
            for group in by_pilot.values().filter(|g| g.len() > 1) {
                let keeper = *group
                    .iter()
                    .min_by_key(|&&t| (available[t].len(), t))
                    .expect("non-empty group");
                losers.extend(group.iter().copied().filter(|&t| t != keeper));
            }
        }
        for &t in &losers {
            pilot[t] = None;
        }
        notify_neighbors(structure, iteration, 2, trace);

        for t in 0..n_ues {
            for other in ad.neighbors(t) {
                if let Some(p) = pilot[other] {
                    available[t].remove(&p);
                }
            }
        }
    }

    let mut fallback_ues = Vec::new();
    for t in 0..n_ues {
        if pilot[t].is_some() {
            continue;
        }
        let m = controller_of[t];
        let used = sibling_pilots(&pilot, t);
        let load = |p: usize| -> f64 {
            (0..n_ues)
                .filter(|&o| o != t && pilot[o] == Some(p))
                .map(|o| lsfc[(o, m)])
                .sum()
        };
        let p = (0..n_pilots)
            .filter(|p| !used.contains(p))
            .min_by(|&a, &b| load(a).total_cmp(&load(b)).then(a.cmp(&b)))
            .ok_or_else(|| {
                Error::Capacity(format!("controller {m} has no unused pilot for UE {t}"))
            })?;
        pilot[t] = Some(p);
        fallback_ues.push(t);
        trace.push(TraceEvent::PilotFallback { ue: t, pilot: p });
    }

    Ok(PilotAssignment {
        pilot_of: pilot
            .into_iter()
            .map(|p| p.expect("all assigned"))
            .collect(),
        available,
        contamination: ad.clone(),
        neighbor_sets: structure.neighbor_sets.clone(),
        top_ues: structure.top_ues.clone(),
        fallback_ues,
        while_iterations: iteration,
    })
}

fn notify_neighbors(
    structure: &TopUeStructure,
    iteration: usize,
    phase: u8,
    trace: &mut MessageTrace,
) {
    for (m, nbs) in structure.neighbor_sets.iter().enumerate() {
        for &to in nbs {
            trace.push(TraceEvent::PilotInfo {
                iteration,
                phase,
                from_ap: m,
                to_ap: to,
            });
        }
    }
}
