use lp_infer::TapPoint;

/// Which divergence term drives the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitnessKind {
    /// Global-local contrastive over pooled intermediate representations.
    Lpq,
    /// Mean squared error between final outputs.
    Mse,
    /// KL divergence between final output distributions.
    Kl,
    /// Contrastive over final outputs only (no intermediate pooling).
    GlobalContrastive,
}

/// How the per-layer sf sampling center is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfCenterMode {
    /// Arithmetic mean of the layer's weights.
    WeightMean,
    /// Scale-domain variant: -mean(log2 |w|) over nonzero weights, i.e.
    /// the bias that parks peak accuracy at the mean weight magnitude.
    NegMeanLog2,
}

/// What the compression term counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressionCount {
    /// Per-sample intermediate-representation elements (literal reading).
    Activations,
    /// Weight elements.
    Weights,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Population size K.
    pub population: usize,
    /// Passes P over all blocks.
    pub passes: usize,
    /// Cycles C per block per pass.
    pub cycles: usize,
    /// Block size B (capped at the layer count).
    pub block: usize,
    /// Random parents bred against the step-2 child.
    pub diversity_parents: usize,
    /// Compression exponent lambda.
    pub lambda: f64,
    /// Contrastive concentration tau.
    pub tau: f64,
    /// Radius of the uniform sf sampling ball.
    pub sf_radius: f64,
    /// Restrict n to the packable set {4, 8}.
    pub hardware_mode: bool,
    pub seed: u64,
    pub fitness: FitnessKind,
    pub sf_center: SfCenterMode,
    pub compression: CompressionCount,
    /// Literal "P x C total updates" reading instead of per-block cycles.
    pub literal_pc_updates: bool,
    /// Evaluate candidate batches on the rayon pool. Results are
    /// bit-identical to serial evaluation; sampling stays serialized.
    pub parallel: bool,
    pub tap_point: TapPoint,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            population: 20,
            passes: 10,
            cycles: 4,
            block: 4,
            diversity_parents: 5,
            lambda: 0.4,
            tau: 1.0,
            sf_radius: 1e-3,
            hardware_mode: false,
            seed: 0,
            fitness: FitnessKind::Lpq,
            sf_center: SfCenterMode::WeightMean,
            compression: CompressionCount::Activations,
            literal_pc_updates: false,
            parallel: true,
            tap_point: TapPoint::PostActivation,
        }
    }
}

impl SearchConfig {
    /// Weight widths candidates may take.
    pub fn allowed_n(&self) -> &'static [u8] {
        if self.hardware_mode {
            &[4, 8]
        } else {
            &[3, 4, 5, 6, 7, 8]
        }
    }

    /// Clamp (or snap, in hardware mode) a sampled width into the legal set.
    pub fn clamp_n(&self, n: i32) -> u8 {
        if self.hardware_mode {
            if n <= 5 {
                4
            } else {
                8
            }
        } else {
            n.clamp(3, 8) as u8
        }
    }
}
