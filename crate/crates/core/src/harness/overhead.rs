use crate::assignment::{MessageTrace, TraceEvent};

/// Signaling and convergence counts for one assignment run (or a sum of runs).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OverheadCounters {
    pub ue_to_ap_requests: usize,
    pub ap_to_ue_responses: usize,
    /// AP-to-AP pilot information relayed through the CPU.
    pub ap_cpu_pilot_messages: usize,
    pub alg1_outer_iterations: usize,
    pub alg2_iterations: usize,
    /// UEs that got their pilot after the distributed loop.
    pub fallback_count: usize,
    /// UEs whose controller candidate set ran empty.
    pub candidate_fallbacks: usize,
}

impl OverheadCounters {
    pub fn messages_total(&self) -> usize {
        self.ue_to_ap_requests + self.ap_to_ue_responses + self.ap_cpu_pilot_messages
    }

    pub fn add(&mut self, other: &OverheadCounters) {
        self.ue_to_ap_requests += other.ue_to_ap_requests;
        self.ap_to_ue_responses += other.ap_to_ue_responses;
        self.ap_cpu_pilot_messages += other.ap_cpu_pilot_messages;
        self.alg1_outer_iterations += other.alg1_outer_iterations;
        self.alg2_iterations += other.alg2_iterations;
        self.fallback_count += other.fallback_count;
        self.candidate_fallbacks += other.candidate_fallbacks;
    }
}

pub fn count_overhead(trace: &MessageTrace) -> OverheadCounters {
    let mut c = OverheadCounters::default();
    for e in &trace.events {
        match e {
            TraceEvent::ControllerRound { .. } => c.alg1_outer_iterations += 1,
            TraceEvent::ControllerRequest { .. } => c.ue_to_ap_requests += 1,
            TraceEvent::ControllerResponse { .. } => c.ap_to_ue_responses += 1,
            TraceEvent::CandidateFallback { .. } => c.candidate_fallbacks += 1,
            TraceEvent::PilotIteration { .. } => c.alg2_iterations += 1,
            TraceEvent::PilotInfo { .. } => c.ap_cpu_pilot_messages += 1,
            TraceEvent::PilotFallback { .. } => c.fallback_count += 1,
        }
    }
    c
}
