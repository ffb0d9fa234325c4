/// One logical message or loop boundary of the distributed algorithms.
///
/// Messages relayed through the CPU are recorded here instead of being sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    /// Start of an oversaturation-resolution round of controller selection.
    ControllerRound {
        round: usize,
    },
    /// UE asks an AP to be its controller.
    ControllerRequest {
        round: usize,
        ue: usize,
        ap: usize,
    },
    /// AP answers a request, or releases a UE it had accepted earlier.
    ControllerResponse {
        round: usize,
        ap: usize,
        ue: usize,
        accepted: bool,
    },
    /// Candidate set ran empty; UE fell back to the strongest non-inert AP.
    CandidateFallback {
        ue: usize,
        ap: usize,
    },
    PilotIteration {
        iteration: usize,
    },
    /// Pilot information from one AP to a neighbour. `phase` is 1 after the
    /// assignment step and 2 after conflict resolution.
    PilotInfo {
        iteration: usize,
        phase: u8,
        from_ap: usize,
        to_ap: usize,
    },
    /// Post-loop pilot given by the controller to a still-unassigned UE.
    PilotFallback {
        ue: usize,
        pilot: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageTrace {
    pub events: Vec<TraceEvent>,
}

impl MessageTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }
}
