/// Array geometry and on-chip buffer budget. The default splits a 512 KiB
/// budget as 128K weights / 128K inputs / 256K outputs.
#[derive(Debug, Clone)]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    pub weight_buffer: usize,
    pub input_buffer: usize,
    pub output_buffer: usize,
    /// Accumulator fraction width W_acc.
    pub acc_frac_bits: u32,
    /// Fixed boundary decoder + encoder latency added once per GEMM
    /// (they pipeline with streaming, so the default is 0).
    pub boundary_latency: u64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 8,
            weight_buffer: 128 * 1024,
            input_buffer: 128 * 1024,
            output_buffer: 256 * 1024,
            acc_frac_bits: lp_arith::DEFAULT_ACC_FRAC_BITS,
            boundary_latency: 0,
        }
    }
}

impl ArrayConfig {
    pub fn with_dims(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            ..Self::default()
        }
    }

    /// Splits a total buffer budget 25/25/50 across weight/input/output.
    pub fn with_total_buffer(mut self, total: usize) -> Self {
        self.weight_buffer = total / 4;
        self.input_buffer = total / 4;
        self.output_buffer = total - self.weight_buffer - self.input_buffer;
        self
    }
}
