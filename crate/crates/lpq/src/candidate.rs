use lp_core::LPParams;
use rand_chacha::ChaCha8Rng;

/// Cached fitness breakdown of a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    /// L_F = divergence * compression^lambda; lower is better.
    pub total: f64,
    /// L_CO.
    pub divergence: f64,
    /// L_CR.
    pub compression: f64,
}

/// One genome: a per-layer LP format vector plus cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub delta: Vec<LPParams>,
    pub fitness: Option<Fitness>,
}

impl Candidate {
    pub fn new(delta: Vec<LPParams>) -> Self {
        Self {
            delta,
            fitness: None,
        }
    }

    pub fn total(&self) -> f64 {
        self.fitness.expect("candidate must be evaluated").total
    }

    /// Element-count-weighted mean bit width.
    pub fn mean_bits(&self, weight_counts: &[usize]) -> f64 {
        let total: usize = weight_counts.iter().sum();
        self.delta
            .iter()
            .zip(weight_counts)
            .map(|(p, &c)| f64::from(p.n) * c as f64)
            .sum::<f64>()
            / total as f64
    }
}

/// One history row, recorded after every population update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRecord {
    pub index: usize,
    pub best_fitness: f64,
    pub divergence: f64,
    pub compression: f64,
}

/// The evolving population: always exactly K evaluated members, sorted by
/// fitness (best first), plus the RNG driving all sampling and the
/// per-update best-fitness history.
#[derive(Debug, Clone)]
pub struct PopulationState {
    pub members: Vec<Candidate>,
    pub rng: ChaCha8Rng,
    pub history: Vec<UpdateRecord>,
}

impl PopulationState {
    pub fn best(&self) -> &Candidate {
        &self.members[0]
    }

    pub fn record_update(&mut self) {
        let best = self.best();
        let f = best.fitness.expect("population members are evaluated");
        self.history.push(UpdateRecord {
            index: self.history.len(),
            best_fitness: f.total,
            divergence: f.divergence,
            compression: f.compression,
        });
    }
}
