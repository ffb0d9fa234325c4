//! Uplink SINR per realization and its ergodic SE.

use crate::assignment::ServiceCluster;
use crate::linalg::quad_form;
use crate::phy::combining::Combining;
use crate::phy::estimation::ChannelEstimates;
use crate::tensor::{dotc, norm_sqr, C64};

/// Instantaneous SINR of every UE given its combining vector.
///
/// Interference covers all UEs; the estimation-error term uses the
/// per-AP sum of `tau_j C_{j,m}`.
pub fn uplink_sinr(
    est: &ChannelEstimates,
    combining: &Combining,
    cluster: &ServiceCluster,
) -> Vec<f64> {
    let stats = &est.stats;
    let n_ues = cluster.n_ues();
    let mut out = Vec::with_capacity(n_ues);
    for t in 0..n_ues {
        let aps = &cluster.serving_aps[t];
        if aps.is_empty() {
            out.push(0.0);
            continue;
        }
        let v = &combining.vectors[t];
        let project = |j: usize| -> C64 {
            aps.iter()
                .enumerate()
                .map(|(k, &m)| dotc(combining.block(t, k), est.h_hat.get(j, m)))
                .sum()
        };
        let signal = stats.ul_power[t] * project(t).norm_sqr();
        let mut interference: f64 = (0..n_ues)
            .filter(|&j| j != t)
            .map(|j| stats.ul_power[j] * project(j).norm_sqr())
            .sum();
        for (k, &m) in aps.iter().enumerate() {
            let b = combining.block(t, k);
            interference += quad_form(b, &stats.weighted_err_cov[m], b).re;
        }
        interference += stats.noise_power * norm_sqr(v);
        let sinr = signal / interference;
        out.push(if sinr.is_finite() && sinr > 0.0 {
            sinr
        } else {
            0.0
        });
    }
    out
}

/// Running mean of `log2(1 + SINR)` per UE.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkAccumulator {
    sum: Vec<f64>,
    count: usize,
}

impl UplinkAccumulator {
    pub fn new(n_ues: usize) -> Self {
        UplinkAccumulator {
            sum: vec![0.0; n_ues],
            count: 0,
        }
    }

    pub fn push(&mut self, sinr: &[f64]) {
        for (s, &x) in self.sum.iter_mut().zip(sinr) {
            *s += (1.0 + x).log2();
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(&self, prelog: f64) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.sum.iter().map(|s| prelog * s / n).collect()
    }
}

/// Ergodic SE from a sequence of per-realization SINR vectors.
pub fn uplink_se<I: IntoIterator<Item = Vec<f64>>>(n_ues: usize, sinr: I, prelog: f64) -> Vec<f64> {
    let mut acc = UplinkAccumulator::new(n_ues);
    for s in sinr {
        acc.push(&s);
    }
    acc.finish(prelog)
}
