//! Controller-AP selection.
//!
//! Every UE picks a controller at random among the APs whose LSFC is within a
//! network-wide threshold of its best AP. APs controlling more than `L_p` UEs
//! keep the `L_p` UEs with the fewest alternatives and release the rest, which
//! then pick again among their remaining candidates. Rounds repeat until no AP
//! is oversaturated.

use std::collections::BTreeSet;

use rand::Rng;

use super::trace::{MessageTrace, TraceEvent};
use crate::error::{Error, Result};
use crate::tensor::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaThreshold {
    pub gamma: f64,
    /// Per UE: largest minus second-largest LSFC.
    pub beta_gap: Vec<f64>,
    /// Set when there is a single AP and no gap exists.
    pub degenerate: bool,
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn compute_gamma_threshold(lsfc: &Grid<f64>) -> GammaThreshold {
    let n_ues = lsfc.rows();
    if lsfc.cols() < 2 {
        return GammaThreshold {
            gamma: 0.0,
            beta_gap: vec![0.0; n_ues],
            degenerate: true,
        };
    }
    let beta_gap: Vec<f64> = (0..n_ues)
        .map(|t| {
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &b in lsfc.row(t) {
                if b > first {
                    second = first;
                    first = b;
                } else if b > second {
                    second = b;
                }
            }
            first - second
        })
        .collect();
    let max = beta_gap.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = beta_gap.iter().copied().fold(f64::INFINITY, f64::min);
    GammaThreshold {
        gamma: (max + min) / 2.0,
        beta_gap,
        degenerate: false,
    }
}

/// `M_t^c`: the strongest AP plus every AP within `gamma` of it.
pub fn build_candidate_sets(lsfc: &Grid<f64>, gamma: f64) -> Vec<BTreeSet<usize>> {
    (0..lsfc.rows())
        .map(|t| {
            let row = lsfc.row(t);
            let best = argmax(row);
            let mut set = BTreeSet::from([best]);
            set.extend((0..row.len()).filter(|&m| row[best] - row[m] <= gamma));
            set
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerAssignment {
    /// `m_t^c`.
    pub controller_of: Vec<usize>,
    /// `T_m^c`.
    pub controlled: Vec<BTreeSet<usize>>,
    /// Candidate sets as they stand when the algorithm stops.
    pub candidates: Vec<BTreeSet<usize>>,
    /// Every AP that was ever a candidate of each UE.
    pub candidate_history: Vec<BTreeSet<usize>>,
    /// Threshold and per-UE gaps, on the scale of the input matrix.
    pub gamma_th: f64,
    pub beta_gap: Vec<f64>,
    /// `M_D` at termination, always empty on success.
    pub oversaturated: BTreeSet<usize>,
    /// `M_I` at termination.
    pub inert: BTreeSet<usize>,
    pub outer_iterations: usize,
    /// UEs that used the empty-candidate fallback at least once.
    pub candidate_fallbacks: Vec<usize>,
}

fn pick<R: Rng + ?Sized>(set: &BTreeSet<usize>, rng: &mut R) -> usize {
    let k = rng.random_range(0..set.len());
    *set.iter().nth(k).expect("non-empty candidate set")
}

fn controlled_sets(controller_of: &[usize], n_aps: usize) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); n_aps];
    for (t, &m) in controller_of.iter().enumerate() {
        sets[m].insert(t);
    }
    sets
}

pub fn select_controllers<R: Rng + ?Sized>(
    lsfc: &Grid<f64>,
    n_pilots: usize,
    rng: &mut R,
    trace: &mut MessageTrace,
) -> Result<ControllerAssignment> {
    let (n_ues, n_aps) = (lsfc.rows(), lsfc.cols());
    if n_ues > n_aps * n_pilots {
        return Err(Error::Capacity(format!(
            "{n_ues} UEs exceed {n_aps} APs x {n_pilots} pilots"
        )));
    }
    let threshold = compute_gamma_threshold(lsfc);
    let mut candidates = build_candidate_sets(lsfc, threshold.gamma);
    let mut history = candidates.clone();
    let mut controller_of: Vec<usize> = candidates.iter().map(|c| pick(c, rng)).collect();
    let mut fallbacks = BTreeSet::new();

    // UEs whose latest request is still unanswered.
    let mut pending: Vec<usize> = (0..n_ues).collect();
    let mut round = 0;
    let mut outer_iterations = 0;
    loop {
        for &t in &pending {
            trace.push(TraceEvent::ControllerRequest {
                round,
                ue: t,
                ap: controller_of[t],
            });
        }
        let controlled = controlled_sets(&controller_of, n_aps);
        let oversaturated: BTreeSet<usize> = (0..n_aps)
            .filter(|&m| controlled[m].len() > n_pilots)
            .collect();
        let inert: BTreeSet<usize> = (0..n_aps)
            .filter(|&m| controlled[m].len() == n_pilots)
            .collect();

        if oversaturated.is_empty() {
            for &t in &pending {
                trace.push(TraceEvent::ControllerResponse {
                    round,
                    ap: controller_of[t],
                    ue: t,
                    accepted: true,
                });
            }
            return Ok(ControllerAssignment {
                controller_of,
                controlled,
                candidates,
                candidate_history: history,
                gamma_th: threshold.gamma,
                beta_gap: threshold.beta_gap,
                oversaturated,
                inert,
                outer_iterations,
                candidate_fallbacks: fallbacks.into_iter().collect(),
            });
        }

        outer_iterations += 1;
        if outer_iterations > n_aps {
            return Err(Error::IterationLimit {
                algorithm: "controller selection",
                limit: n_aps,
                trace: format!("still oversaturated: {oversaturated:?}"),
            });
        }
        trace.push(TraceEvent::ControllerRound { round });

        // Decisions use the sets as they stood at the start of the round.
        let mut released = BTreeSet::new();
        let mut next_pending = Vec::new();
        for &m in &oversaturated {
            let mut order: Vec<usize> = controlled[m].iter().copied().collect();
            order.sort_by(|&a, &b| {
                candidates[a]
                    .len()
                    .cmp(&candidates[b].len())
                    .then(lsfc[(b, m)].total_cmp(&lsfc[(a, m)]))
                    .then(a.cmp(&b))
            });
            for &t in &order[n_pilots..] {
                trace.push(TraceEvent::ControllerResponse {
                    round,
                    ap: m,
                    ue: t,
                    accepted: false,
                });
                released.insert(t);
                let set = &mut candidates[t];
                set.retain(|c| !inert.contains(c) && *c != m);
                if set.is_empty() {
                    let fallback = (0..n_aps)
                        .filter(|&c| !inert.contains(&c) && c != m)
                        .max_by(|&a, &b| lsfc[(t, a)].total_cmp(&lsfc[(t, b)]).then(b.cmp(&a)))
                        .ok_or_else(|| {
                            Error::Capacity(format!("UE {t} has no non-inert AP left"))
                        })?;
                    set.insert(fallback);
                    history[t].insert(fallback);
                    fallbacks.insert(t);
                    trace.push(TraceEvent::CandidateFallback {
                        ue: t,
                        ap: fallback,
                    });
                }
                controller_of[t] = pick(&candidates[t], rng);
                next_pending.push(t);
            }
        }
        for &t in &pending {
            if !released.contains(&t) {
                trace.push(TraceEvent::ControllerResponse {
                    round,
                    ap: controller_of[t],
                    ue: t,
                    accepted: true,
                });
            }
        }
        next_pending.sort_unstable();
        pending = next_pending;
        round += 1;
    }
}
