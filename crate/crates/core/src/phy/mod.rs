//! Physical-layer evaluation: MMSE estimation, P-MMSE combining and the
//! uplink/downlink ergodic SE.

mod combining;
mod downlink;
mod estimation;
mod power;
mod uplink;

pub use combining::{
    mr_combining, partially_overlapping, pmmse_combining, pmmse_with_overlap, Combining,
};
pub use downlink::{DownlinkAccumulator, DownlinkResult};
pub use estimation::{
    mmse_estimate, pilot_noise, sample_noise, ChannelEstimates, EstimationStatistics,
};
pub use power::fractional_power_allocation;
pub use uplink::{uplink_se, uplink_sinr, UplinkAccumulator};
