use std::collections::BTreeSet;

use crate::tensor::Grid;

/// AP-UE service association.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceCluster {
    /// `d[(t, m)]`.
    pub d: Grid<bool>,
    /// `D_t`, ascending AP indices.
    pub serving_aps: Vec<Vec<usize>>,
    /// UEs served by each AP, ascending.
    pub served_ues: Vec<Vec<usize>>,
}

impl ServiceCluster {
    pub fn from_matrix(d: Grid<bool>) -> Self {
        let serving_aps = (0..d.rows())
            .map(|t| (0..d.cols()).filter(|&m| d[(t, m)]).collect())
            .collect();
        let served_ues = (0..d.cols())
            .map(|m| (0..d.rows()).filter(|&t| d[(t, m)]).collect())
            .collect();
        ServiceCluster {
            d,
            serving_aps,
            served_ues,
        }
    }

    pub fn n_ues(&self) -> usize {
        self.d.rows()
    }

    pub fn n_aps(&self) -> usize {
        self.d.cols()
    }
}

/// Each AP serves the UEs it controls and, on every other pilot, the UE with
/// the largest LSFC towards it.
pub fn form_clusters(
    pilot_of: &[usize],
    controller_of: &[usize],
    lsfc: &Grid<f64>,
    n_pilots: usize,
) -> ServiceCluster {
    let (n_ues, n_aps) = (lsfc.rows(), lsfc.cols());
    let mut d = Grid::from_fn(n_ues, n_aps, |_, _| false);
    for m in 0..n_aps {
        let own: BTreeSet<usize> = (0..n_ues)
            .filter(|&t| controller_of[t] == m)
            .map(|t| pilot_of[t])
            .collect();
        for (t, &c) in controller_of.iter().enumerate() {
            if c == m {
                d[(t, m)] = true;
            }
        }
        for p in (0..n_pilots).filter(|p| !own.contains(p)) {
            let best = (0..n_ues)
                .filter(|&t| pilot_of[t] == p)
                .max_by(|&a, &b| lsfc[(a, m)].total_cmp(&lsfc[(b, m)]).then(b.cmp(&a)));
            if let Some(t) = best {
                d[(t, m)] = true;
            }
        }
    }
    ServiceCluster::from_matrix(d)
}

/// Checks every structural requirement on a finished assignment, returning
/// the first violation found.
pub fn check_validity(
    controller_of: &[usize],
    pilot_of: &[usize],
    cluster: &ServiceCluster,
    n_pilots: usize,
) -> Result<(), String> {
    let (n_ues, n_aps) = (cluster.n_ues(), cluster.n_aps());
    if controller_of.len() != n_ues || pilot_of.len() != n_ues {
        return Err("length mismatch".into());
    }
    for t in 0..n_ues {
        if pilot_of[t] >= n_pilots {
            return Err(format!("UE {t} pilot {} out of range", pilot_of[t]));
        }
        if controller_of[t] >= n_aps {
            return Err(format!(
                "UE {t} controller {} out of range",
                controller_of[t]
            ));
        }
        if !cluster.d[(t, controller_of[t])] {
            return Err(format!("UE {t} not served by its controller"));
        }
        if cluster.serving_aps[t].is_empty() {
            return Err(format!("UE {t} unserved"));
        }
    }
    for m in 0..n_aps {
        let controlled: Vec<usize> = (0..n_ues).filter(|&t| controller_of[t] == m).collect();
        if controlled.len() > n_pilots {
            return Err(format!("AP {m} controls {} UEs", controlled.len()));
        }
        let mut seen = BTreeSet::new();
        for &t in &controlled {
            if !seen.insert(pilot_of[t]) {
                return Err(format!("AP {m} controls two UEs on pilot {}", pilot_of[t]));
            }
        }
        let mut served = BTreeSet::new();
        for &t in &cluster.served_ues[m] {
            if !served.insert(pilot_of[t]) {
                return Err(format!("AP {m} serves two UEs on pilot {}", pilot_of[t]));
            }
        }
    }
    Ok(())
}
