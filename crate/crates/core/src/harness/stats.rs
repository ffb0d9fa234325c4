use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    /// Nearest-rank 10th percentile, the "90%-likely" value.
    pub p10: f64,
    /// Sorted copy of the samples.
    pub cdf_points: Vec<f64>,
}

/// Nearest-rank percentile of already sorted samples, `q` in `(0, 1]`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn aggregate_stats(samples: &[f64]) -> Result<Aggregate> {
    if samples.is_empty() {
        return Err(Error::Precondition("no samples to aggregate".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Aggregate {
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
        p10: nearest_rank(&sorted, 0.10),
        cdf_points: sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_to_ten() {
        let s: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        let a = aggregate_stats(&s).unwrap();
        assert_eq!(a.mean, 5.5);
        assert_eq!(a.p10, 1.0);
        assert_eq!(a.cdf_points[9], 10.0);
    }

    #[test]
    fn degenerate_inputs() {
        let a = aggregate_stats(&[2.5; 7]).unwrap();
        assert_eq!((a.mean, a.p10), (2.5, 2.5));
        assert_eq!(aggregate_stats(&[4.0]).unwrap().p10, 4.0);
        assert!(aggregate_stats(&[]).is_err());
    }

    #[test]
    fn rank_rounds_up() {
        let s: Vec<f64> = (1..=11).map(f64::from).collect();
        assert_eq!(nearest_rank(&s, 0.1), 2.0);
    }
}
