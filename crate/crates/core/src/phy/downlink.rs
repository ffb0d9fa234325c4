//! Downlink SE with precoders taken from the uplink combiners.
//!
//! AP `m` transmits `s_{t,m} = sqrt(rho_{t,m}) v_{t,m} / sqrt(E ||v_t||^2)` to
//! every served UE. The SINR uses the hardening bound
//! `|E b_tt|^2 / (sum_j E |b_tj|^2 - |E b_tt|^2 + sigma^2)` with
//! `b_tj = sum_{m in D_j} h_{t,m}^H s_{j,m}`. The normalization is a common
//! factor per `j`, so unnormalized sums are accumulated and scaled at the end.

use crate::assignment::ServiceCluster;
use crate::error::{Error, Result};
use crate::phy::combining::Combining;
use crate::tensor::{dotc, norm_sqr, Grid, LinkTensor, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkAccumulator {
    signal: Vec<C64>,
    cross: Grid<f64>,
    vnorm: Vec<f64>,
    count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkResult {
    pub se: Vec<f64>,
    pub sinr: Vec<f64>,
    /// UEs whose interference-plus-noise term fell below `sigma^2` and was
    /// clamped there.
    pub clamped: usize,
}

impl DownlinkAccumulator {
    pub fn new(n_ues: usize) -> Self {
        DownlinkAccumulator {
            signal: vec![C64::new(0.0, 0.0); n_ues],
            cross: Grid::from_fn(n_ues, n_ues, |_, _| 0.0),
            vnorm: vec![0.0; n_ues],
            count: 0,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds one realization with true channels `h` and combiners `v`.
    pub fn push(
        &mut self,
        h: &LinkTensor,
        combining: &Combining,
        cluster: &ServiceCluster,
        rho: &Grid<f64>,
    ) {
        let n_ues = cluster.n_ues();
        for j in 0..n_ues {
            let aps = &cluster.serving_aps[j];
            if aps.is_empty() {
                continue;
            }
            self.vnorm[j] += norm_sqr(&combining.vectors[j]);
            let amps: Vec<f64> = aps.iter().map(|&m| rho[(j, m)].sqrt()).collect();
            for t in 0..n_ues {
                let b: C64 = aps
                    .iter()
                    .enumerate()
                    .map(|(k, &m)| dotc(h.get(t, m), combining.block(j, k)) * amps[k])
                    .sum();
                if t == j {
                    self.signal[t] += b;
                }
                self.cross[(t, j)] += b.norm_sqr();
            }
        }
        self.count += 1;
    }

    pub fn finish(&self, noise_power: f64, prelog: f64) -> Result<DownlinkResult> {
        if self.count < 2 {
            return Err(Error::Precondition(format!(
                "downlink SE needs at least 2 realizations, got {}",
                self.count
            )));
        }
        let n = self.count as f64;
        let n_ues = self.signal.len();
        let inv_norm: Vec<f64> = self
            .vnorm
            .iter()
            .map(|&s| if s > 0.0 { n / s } else { 0.0 })
            .collect();
        let mut clamped = 0;
        let mut sinr = Vec::with_capacity(n_ues);
        for t in 0..n_ues {
            let desired = (self.signal[t] / n).norm_sqr() * inv_norm[t];
            let total: f64 = (0..n_ues)
                .map(|j| self.cross[(t, j)] / n * inv_norm[j])
                .sum();
            let mut denom = total - desired + noise_power;
            if denom < noise_power {
                denom = noise_power;
                clamped += 1;
            }
            sinr.push(desired / denom);
        }
        let se = sinr.iter().map(|s| prelog * (1.0 + s).log2()).collect();
        Ok(DownlinkResult { se, sinr, clamped })
    }
}
