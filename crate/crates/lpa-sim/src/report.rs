/// Per-tile accounting from one GEMM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileStats {
    pub k0: usize,
    pub k_len: usize,
    pub n0: usize,
    /// Logical columns in this tile.
    pub n_len: usize,
    pub phys_cols: usize,
    /// Preload cycles not hidden by the previous tile's streaming.
    pub preload_visible: u64,
    pub stream_cycles: u64,
    pub macs: u64,
}

/// Cycle and work accounting for one simulated GEMM (or one model layer).
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub label: String,
    pub mode: String,
    pub rows: usize,
    pub cols: usize,
    pub weights_per_pe: usize,
    pub cycles: u64,
    pub macs: u64,
    /// Activation-streaming cycles (M wavefronts per tile), excluding
    /// skew fill/drain and preload.
    pub active_cycles: u64,
    /// Fraction of PE MAC capacity used: macs / (PEs * w * cycles).
    pub utilization: f64,
    /// Logical columns the array covers per tile: cols * weights-per-PE.
    pub effective_cols: usize,
    pub tiles: Vec<TileStats>,
    /// Alignment absorptions summed over all output partial sums.
    pub sticky_losses: u64,
    /// Operand/product declared-width check failures (reported, never
    /// silently clamped).
    pub width_violations: u64,
}

impl SimReport {
    /// Per-PE throughput over total cycles.
    pub fn macs_per_pe_cycle(&self) -> f64 {
        self.macs as f64 / (self.rows * self.cols) as f64 / self.cycles as f64
    }

    /// Per-PE throughput over streaming cycles only; on weight-bound,
    /// fully packed workloads this is exactly 4:2:1 across MODE-A/B/C.
    pub fn macs_per_pe_active_cycle(&self) -> f64 {
        self.macs as f64 / (self.rows * self.cols) as f64 / self.active_cycles as f64
    }

    pub(crate) fn finish(&mut self) {
        let capacity = (self.rows * self.cols * self.weights_per_pe) as u64;
        self.utilization = if self.cycles == 0 {
            0.0
        } else {
            self.macs as f64 / (capacity * self.cycles) as f64
        };
    }
}
