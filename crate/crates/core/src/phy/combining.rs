//! Receive combining restricted to each UE's serving APs.

use nalgebra::DMatrix;

use crate::assignment::ServiceCluster;
use crate::error::Result;
use crate::linalg::{solve_hpd, CVector};
use crate::phy::estimation::ChannelEstimates;
use crate::tensor::C64;

/// Per-UE combining vectors stacked over `D_t` in ascending AP order.
#[derive(Debug, Clone, PartialEq)]
pub struct Combining {
    pub vectors: Vec<Vec<C64>>,
    pub serving_aps: Vec<Vec<usize>>,
    n_antennas: usize,
}

impl Combining {
    pub fn from_parts(
        vectors: Vec<Vec<C64>>,
        serving_aps: Vec<Vec<usize>>,
        n_antennas: usize,
    ) -> Self {
        Combining {
            vectors,
            serving_aps,
            n_antennas,
        }
    }

    /// Block of `v_t` belonging to the `k`-th serving AP.
    pub fn block(&self, ue: usize, k: usize) -> &[C64] {
        &self.vectors[ue][k * self.n_antennas..(k + 1) * self.n_antennas]
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }
}

fn stacked(est: &ChannelEstimates, ue: usize, aps: &[usize]) -> Vec<C64> {
    aps.iter()
        .flat_map(|&m| est.h_hat.get(ue, m).iter().copied())
        .collect()
}

/// UEs sharing at least one serving AP with each UE, ascending.
pub fn partially_overlapping(cluster: &ServiceCluster) -> Vec<Vec<usize>> {
    (0..cluster.n_ues())
        .map(|t| {
            let mut s = vec![false; cluster.n_ues()];
            for &m in &cluster.serving_aps[t] {
                for &j in &cluster.served_ues[m] {
                    s[j] = true;
                }
            }
            (0..s.len()).filter(|&j| s[j]).collect()
        })
        .collect()
}

/// Partial MMSE: `v_t = tau_t (sum_{j in S_t} tau_j (h_hat_j h_hat_j^H + C_j) + sigma^2 I)^{-1} h_hat_t`
/// over the antennas of `D_t`.
pub fn pmmse_combining(est: &ChannelEstimates, cluster: &ServiceCluster) -> Result<Combining> {
    let overlap = partially_overlapping(cluster);
    pmmse_with_overlap(est, cluster, &overlap)
}

pub fn pmmse_with_overlap(
    est: &ChannelEstimates,
    cluster: &ServiceCluster,
    overlap: &[Vec<usize>],
) -> Result<Combining> {
    let a = est.h_hat.n_antennas();
    let stats = &est.stats;
    let mut vectors = Vec::with_capacity(cluster.n_ues());
    for t in 0..cluster.n_ues() {
        let aps = &cluster.serving_aps[t];
        let n = aps.len() * a;
        if n == 0 {
            vectors.push(Vec::new());
            continue;
        }
        let mut k = DMatrix::<C64>::zeros(n, n);
        {
            let ks = k.as_mut_slice();
            for &j in &overlap[t] {
                let tau = stats.ul_power[j];
                let g = stacked(est, j, aps);
                for c in 0..n {
                    let gc = g[c].conj() * tau;
                    let col = &mut ks[c * n..(c + 1) * n];
                    for (kr, gr) in col.iter_mut().zip(&g) {
                        *kr += gr * gc;
                    }
                }
                for (b, &m) in aps.iter().enumerate() {
                    let cj = est.err_cov(j, m);
                    for c in 0..a {
                        for r in 0..a {
                            ks[(b * a + c) * n + b * a + r] += cj[(r, c)] * tau;
                        }
                    }
                }
            }
            for i in 0..n {
                ks[i * n + i] += stats.noise_power;
            }
        }
        let rhs = CVector::from_vec(
            stacked(est, t, aps)
                .into_iter()
                .map(|x| x * stats.ul_power[t])
                .collect(),
        );
        let v = solve_hpd(&k, &rhs)?;
        vectors.push(v.iter().copied().collect());
    }
    Ok(Combining::from_parts(
        vectors,
        cluster.serving_aps.clone(),
        a,
    ))
}

/// Maximum-ratio combining `v_t = h_hat_t` over `D_t`.
pub fn mr_combining(est: &ChannelEstimates, cluster: &ServiceCluster) -> Combining {
    let vectors = (0..cluster.n_ues())
        .map(|t| stacked(est, t, &cluster.serving_aps[t]))
        .collect();
    Combining::from_parts(vectors, cluster.serving_aps.clone(), est.h_hat.n_antennas())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::channel::ChannelSampler;
    use crate::config::SimConfig;
    use crate::linalg::CMatrix;
    use crate::phy::estimation::{pilot_noise, EstimationStatistics};
    use crate::tensor::{dotc, Grid};
    use crate::topology::NetworkInstance;

    fn full_cluster(t: usize, m: usize) -> ServiceCluster {
        ServiceCluster::from_matrix(Grid::from_fn(t, m, |_, _| true))
    }

    #[test]
    fn pmmse_solves_normal_equations() {
        let cfg = SimConfig {
            n_aps: 3,
            n_ues: 4,
            n_pilots: 2,
            ..Default::default()
        };
        let inst = NetworkInstance::generate(&cfg, 9).unwrap();
        let power = vec![cfg.ul_power_mw; 4];
        let stats = Arc::new(EstimationStatistics::new(&inst, &[0, 1, 0, 1], 2, &power).unwrap());
        let h = ChannelSampler::new(&inst).unwrap().realization(9, 0).h;
        let est = stats.estimate(&h, &pilot_noise(9, 0, 2, 3, 4, inst.noise_power));
        let cluster = full_cluster(4, 3);
        let v = pmmse_combining(&est, &cluster).unwrap();

        let n = 12;
        let mut k = CMatrix::identity(n, n).scale(inst.noise_power);
        for j in 0..4 {
            let g = CVector::from_vec(stacked(&est, j, &[0, 1, 2]));
            k += (&g * g.adjoint()).scale(power[j]);
            for m in 0..3 {
                let mut view = k.view_mut((m * 4, m * 4), (4, 4));
                view += est.err_cov(j, m).scale(power[j]);
            }
        }
        for t in 0..4 {
            let vt = CVector::from_vec(v.vectors[t].clone());
            let g = CVector::from_vec(stacked(&est, t, &[0, 1, 2])).scale(power[t]);
            let resid = (&k * vt - &g).norm();
            assert!(resid <= 1e-9 * g.norm(), "{resid}");
        }
    }

    #[test]
    fn single_ue_pmmse_is_scaled_mr_direction() {
        // One UE, no estimation error in the limit of zero noise on the pilot:
        // P-MMSE is collinear with the estimate.
        let cfg = SimConfig {
            n_aps: 2,
            n_ues: 1,
            n_pilots: 1,
            ..Default::default()
        };
        let inst = NetworkInstance::generate(&cfg, 2).unwrap();
        let stats =
            Arc::new(EstimationStatistics::new(&inst, &[0], 1, &[cfg.ul_power_mw]).unwrap());
        let h = ChannelSampler::new(&inst).unwrap().realization(2, 0).h;
        let est = stats.estimate(&h, &pilot_noise(2, 0, 1, 2, 4, inst.noise_power));
        let cluster = full_cluster(1, 2);
        let v = pmmse_combining(&est, &cluster).unwrap();
        let mr = mr_combining(&est, &cluster);
        let inner = dotc(&mr.vectors[0], &v.vectors[0]).norm();
        let cos = inner
            / (crate::tensor::norm_sqr(&mr.vectors[0]) * crate::tensor::norm_sqr(&v.vectors[0]))
                .sqrt();
        // Error covariance bends the direction slightly but it stays close.
        assert!(cos > 0.9, "{cos}");
    }

    #[test]
    fn blocks_follow_serving_order() {
        let v = Combining::from_parts(
            vec![(0..6).map(|i| C64::new(i as f64, 0.0)).collect()],
            vec![vec![1, 4, 7]],
            2,
        );
        assert_eq!(v.block(0, 1), &[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
    }
}
