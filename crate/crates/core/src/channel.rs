//! Correlated Rayleigh fading realizations, `h = R^{1/2} w`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_factor, CMatrix};
use crate::rng::{rng_for, stream};
use crate::tensor::{Grid, LinkTensor, C64};
use crate::topology::NetworkInstance;

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: LinkTensor,
    pub realization_index: usize,
}

/// Draws a standard circularly-symmetric complex Gaussian scaled to variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Cached square-root factors of every `R_{t,m}`.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    factors: Grid<CMatrix>,
    n_antennas: usize,
}

impl ChannelSampler {
    pub fn new(instance: &NetworkInstance) -> Result<Self> {
        Self::from_correlations(&instance.corr)
    }

    pub fn from_correlations(corr: &Grid<CMatrix>) -> Result<Self> {
        let n_antennas = corr.iter().next().map_or(0, |r| r.nrows());
        let mut rows = Vec::with_capacity(corr.rows());
        for t in 0..corr.rows() {
            let mut row = Vec::with_capacity(corr.cols());
            for m in 0..corr.cols() {
                let l = cholesky_factor(&corr[(t, m)]).map_err(|e| {
                    Error::Numerical(format!("correlation of link ({t}, {m}): {e}"))
                })?;
                row.push(l);
            }
            rows.push(row);
        }
        Ok(ChannelSampler {
            factors: Grid::from_rows(rows),
            n_antennas,
        })
    }

    /// Realization `index` of the stream rooted at `seed`.
    pub fn realization(&self, seed: u64, index: usize) -> ChannelRealization {
        let mut rng = rng_for(seed, &[stream::CHANNEL, index as u64]);
        let (n_ues, n_aps, a) = (self.factors.rows(), self.factors.cols(), self.n_antennas);
        let mut h = LinkTensor::zeros(n_ues, n_aps, a);
        let mut w = vec![C64::new(0.0, 0.0); a];
        for t in 0..n_ues {
            for m in 0..n_aps {
                for wi in w.iter_mut() {
                    *wi = complex_gaussian(&mut rng, 1.0);
                }
                let l = &self.factors[(t, m)];
                let out = h.get_mut(t, m);
                for i in 0..a {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, wj) in w.iter().enumerate().take(i + 1) {
                        acc += l[(i, j)] * wj;
                    }
                    out[i] = acc;
                }
            }
        }
        ChannelRealization {
            h,
            realization_index: index,
        }
    }
}

pub fn sample_channels(
    instance: &NetworkInstance,
    n: usize,
    seed: u64,
) -> Result<Vec<ChannelRealization>> {
    let sampler = ChannelSampler::new(instance)?;
    Ok((0..n).map(|i| sampler.realization(seed, i)).collect())
}
