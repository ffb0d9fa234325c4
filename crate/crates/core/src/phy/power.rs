use crate::assignment::ServiceCluster;
use crate::tensor::Grid;

/// Fractional downlink power: AP `m` splits `rho_max` over the UEs it serves
/// in proportion to `sqrt(beta_{t,m})`. Links outside the cluster get zero.
pub fn fractional_power_allocation(
    cluster: &ServiceCluster,
    lsfc: &Grid<f64>,
    rho_max: f64,
) -> Grid<f64> {
    let mut rho = Grid::from_fn(cluster.n_ues(), cluster.n_aps(), |_, _| 0.0);
    for (m, served) in cluster.served_ues.iter().enumerate() {
        let total: f64 = served.iter().map(|&t| lsfc[(t, m)].sqrt()).sum();
        if total > 0.0 {
            for &t in served {
                rho[(t, m)] = rho_max * lsfc[(t, m)].sqrt() / total;
            }
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_exhausted_in_sqrt_proportion() {
        let b = Grid::from_rows(vec![vec![0.04, 1.0], vec![0.16, 0.0], vec![0.36, 0.25]]);
        let d = Grid::from_rows(vec![vec![true, true], vec![true, false], vec![true, true]]);
        let rho = fractional_power_allocation(&ServiceCluster::from_matrix(d), &b, 1000.0);
        assert!((rho[(0, 0)] - 1000.0 * 0.2 / 1.2).abs() < 1e-9);
        assert!((rho[(2, 0)] - 500.0).abs() < 1e-9);
        assert!((rho[(0, 1)] - 1000.0 / 1.5).abs() < 1e-9);
        assert_eq!(rho[(1, 1)], 0.0);
        for m in 0..2 {
            let s: f64 = (0..3).map(|t| rho[(t, m)]).sum();
            assert!((s - 1000.0).abs() < 1e-9);
        }
    }
}
