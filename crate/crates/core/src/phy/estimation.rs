//! MMSE channel estimation from shared uplink pilots.
//!
//! UEs on pilot `p` add up at AP `m` as
//! `y_{p,m} = sum_t sqrt(L_p tau_t) h_{t,m} + n_m`, with
//! `Psi_{p,m} = sum_t L_p tau_t R_{t,m} + sigma^2 I`. The estimate is
//! `h_hat = sqrt(L_p tau_t) R Psi^{-1} y` with error correlation
//! `C = R - L_p tau_t R Psi^{-1} R`.

use std::sync::Arc;

use rand::Rng;

use crate::channel::complex_gaussian;
use crate::error::{Error, Result};
use crate::linalg::{hpd_factor, mat_vec, CMatrix};
use crate::rng::{rng_for, stream};
use crate::tensor::{Grid, LinkTensor};
use crate::topology::NetworkInstance;

/// Realization-independent part of the estimator for one pilot assignment.
#[derive(Debug, Clone)]
pub struct EstimationStatistics {
    /// `Psi[(p, m)]`.
    pub psi: Grid<CMatrix>,
    /// `C[(t, m)]`.
    pub err_cov: Grid<CMatrix>,
    /// `sum_t tau_t C[(t, m)]` per AP.
    pub weighted_err_cov: Vec<CMatrix>,
    /// `sqrt(L_p tau_t) R Psi^{-1}` per link.
    gain: Grid<CMatrix>,
    pub pilot_of: Vec<usize>,
    pub ul_power: Vec<f64>,
    pub noise_power: f64,
    pub n_pilots: usize,
}

impl EstimationStatistics {
    pub fn new(
        instance: &NetworkInstance,
        pilot_of: &[usize],
        n_pilots: usize,
        ul_power: &[f64],
    ) -> Result<Self> {
        Self::from_correlations(
            &instance.corr,
            pilot_of,
            n_pilots,
            ul_power,
            instance.noise_power,
        )
    }

    pub fn from_correlations(
        corr: &Grid<CMatrix>,
        pilot_of: &[usize],
        n_pilots: usize,
        ul_power: &[f64],
        noise_power: f64,
    ) -> Result<Self> {
        let (n_ues, n_aps) = (corr.rows(), corr.cols());
        if pilot_of.len() != n_ues || ul_power.len() != n_ues {
            return Err(Error::Precondition(
                "pilot or power vector length mismatch".into(),
            ));
        }
        if let Some(t) = (0..n_ues).find(|&t| pilot_of[t] >= n_pilots) {
            return Err(Error::Precondition(format!("UE {t} has no valid pilot")));
        }
        let a = corr.iter().next().map_or(0, |r| r.nrows());
        let scale = |t: usize| n_pilots as f64 * ul_power[t];

        let psi = Grid::from_fn(n_pilots, n_aps, |p, m| {
            let mut s = CMatrix::identity(a, a).scale(noise_power);
            for t in (0..n_ues).filter(|&t| pilot_of[t] == p) {
                s += corr[(t, m)].scale(scale(t));
            }
            s
        });
        let factors = psi
            .iter()
            .map(|s| hpd_factor(s.clone()))
            .collect::<Result<Vec<_>>>()?;

        let mut gain = Vec::with_capacity(n_ues);
        let mut err_cov = Vec::with_capacity(n_ues);
        for t in 0..n_ues {
            let (mut grow, mut crow) = (Vec::with_capacity(n_aps), Vec::with_capacity(n_aps));
            for m in 0..n_aps {
                let r = &corr[(t, m)];
                // Psi^{-1} R; its adjoint is R Psi^{-1}.
                let x = factors[pilot_of[t] * n_aps + m].solve(r);
                grow.push(x.adjoint().scale(scale(t).sqrt()));
                let c = r - (r * &x).scale(scale(t));
                crow.push((&c + c.adjoint()).scale(0.5));
            }
            gain.push(grow);
            err_cov.push(crow);
        }
        let err_cov = Grid::from_rows(err_cov);
        let weighted_err_cov = (0..n_aps)
            .map(|m| {
                (0..n_ues).fold(CMatrix::zeros(a, a), |acc, t| {
                    acc + err_cov[(t, m)].scale(ul_power[t])
                })
            })
            .collect();
        Ok(EstimationStatistics {
            psi,
            err_cov,
            weighted_err_cov,
            gain: Grid::from_rows(gain),
            pilot_of: pilot_of.to_vec(),
            ul_power: ul_power.to_vec(),
            noise_power,
            n_pilots,
        })
    }

    pub fn n_ues(&self) -> usize {
        self.gain.rows()
    }

    pub fn n_aps(&self) -> usize {
        self.gain.cols()
    }

    /// `y_{p,m}` for every pilot and AP; `noise` is indexed `(pilot, ap)`.
    pub fn received_pilots(&self, h: &LinkTensor, noise: &LinkTensor) -> LinkTensor {
        let mut y = noise.clone();
        for t in 0..self.n_ues() {
            let amp = (self.n_pilots as f64 * self.ul_power[t]).sqrt();
            let p = self.pilot_of[t];
            for m in 0..self.n_aps() {
                for (yi, hi) in y.get_mut(p, m).iter_mut().zip(h.get(t, m)) {
                    *yi += hi * amp;
                }
            }
        }
        y
    }

    pub fn estimate(self: &Arc<Self>, h: &LinkTensor, noise: &LinkTensor) -> ChannelEstimates {
        let y = self.received_pilots(h, noise);
        let (n_ues, n_aps) = (self.n_ues(), self.n_aps());
        let mut h_hat = LinkTensor::zeros(n_ues, n_aps, h.n_antennas());
        for t in 0..n_ues {
            let p = self.pilot_of[t];
            for m in 0..n_aps {
                mat_vec(&self.gain[(t, m)], y.get(p, m), h_hat.get_mut(t, m));
            }
        }
        ChannelEstimates {
            h_hat,
            stats: Arc::clone(self),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChannelEstimates {
    pub h_hat: LinkTensor,
    pub stats: Arc<EstimationStatistics>,
}

impl ChannelEstimates {
    pub fn err_cov(&self, ue: usize, ap: usize) -> &CMatrix {
        &self.stats.err_cov[(ue, ap)]
    }

    pub fn psi(&self, pilot: usize, ap: usize) -> &CMatrix {
        &self.stats.psi[(pilot, ap)]
    }
}

pub fn sample_noise<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    n_aps: usize,
    n_antennas: usize,
    var: f64,
) -> LinkTensor {
    let mut n = LinkTensor::zeros(rows, n_aps, n_antennas);
    for r in 0..rows {
        for m in 0..n_aps {
            for z in n.get_mut(r, m) {
                *z = complex_gaussian(rng, var);
            }
        }
    }
    n
}

/// Pilot-phase noise of realization `index`, shape `(pilot, ap)`.
pub fn pilot_noise(
    seed: u64,
    index: usize,
    n_pilots: usize,
    n_aps: usize,
    n_antennas: usize,
    var: f64,
) -> LinkTensor {
    let mut rng = rng_for(seed, &[stream::NOISE, index as u64]);
    sample_noise(&mut rng, n_pilots, n_aps, n_antennas, var)
}

/// One-shot estimate for a single realization with fresh noise from `noise_seed`.
pub fn mmse_estimate(
    h: &LinkTensor,
    instance: &NetworkInstance,
    pilot_of: &[usize],
    n_pilots: usize,
    ul_power: &[f64],
    noise_seed: u64,
) -> Result<ChannelEstimates> {
    let stats = Arc::new(EstimationStatistics::new(
        instance, pilot_of, n_pilots, ul_power,
    )?);
    let noise = pilot_noise(
        noise_seed,
        0,
        n_pilots,
        instance.n_aps(),
        instance.n_antennas,
        instance.noise_power,
    );
    Ok(stats.estimate(h, &noise))
}
