use crate::candidate::{Candidate, PopulationState, UpdateRecord};
use crate::config::{SearchConfig, SfCenterMode};
use crate::fitness::FitnessContext;
use crate::SearchError;
use lp_core::LPParams;
use lp_infer::{CalibrationSet, LayerSpec, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ops::Range;

/// Per-layer sf sampling centers.
pub fn sf_centers(model: &Model, mode: SfCenterMode) -> Vec<f64> {
    model
        .layers
        .iter()
        .filter_map(|l| match l {
            LayerSpec::Dense { weight, .. } | LayerSpec::Conv2d { weight, .. } => Some(weight),
            _ => None,
        })
        .map(|w| match mode {
            SfCenterMode::WeightMean => w.data().iter().sum::<f64>() / w.len() as f64,
            SfCenterMode::NegMeanLog2 => {
                let logs: Vec<f64> = w
                    .data()
                    .iter()
                    .filter(|v| **v != 0.0)
                    .map(|v| v.abs().log2())
                    .collect();
                if logs.is_empty() {
                    0.0
                } else {
                    -(logs.iter().sum::<f64>() / logs.len() as f64)
                }
            }
        })
        .collect()
}

fn uniform_ball(rng: &mut ChaCha8Rng, radius: f64) -> f64 {
    if radius == 0.0 {
        0.0
    } else {
        rng.gen_range(-radius..radius)
    }
}

fn clamp_fields(cfg: &SearchConfig, n_raw: i32, es_raw: i32, rs_raw: i32, sf: f64) -> LPParams {
    let n = cfg.clamp_n(n_raw);
    let es = es_raw.clamp(0, i32::from(n) - 3) as u8;
    let rs = rs_raw.clamp(2, i32::from(n) - 1) as u8;
    LPParams::new(n, es, rs, sf)
}

fn sample_fresh_layer(rng: &mut ChaCha8Rng, center: f64, cfg: &SearchConfig) -> LPParams {
    let allowed = cfg.allowed_n();
    let n = allowed[rng.gen_range(0..allowed.len())];
    let es = rng.gen_range(0..=(n - 3));
    let rs = rng.gen_range(2..=(n - 1));
    let sf = center + uniform_ball(rng, cfg.sf_radius);
    LPParams::new(n, es, rs, sf)
}

fn sample_fresh(rng: &mut ChaCha8Rng, centers: &[f64], cfg: &SearchConfig) -> Candidate {
    Candidate::new(
        centers
            .iter()
            .map(|&c| sample_fresh_layer(rng, c, cfg))
            .collect(),
    )
}

fn evaluate_batch(
    ctx: &FitnessContext,
    batch: &mut [Candidate],
    parallel: bool,
) -> Result<(), SearchError> {
    if parallel {
        let results: Vec<_> = batch
            .par_iter()
            .map(|c| ctx.evaluate(&c.delta))
            .collect();
        for (c, r) in batch.iter_mut().zip(results) {
            c.fitness = Some(r?);
        }
    } else {
        for c in batch.iter_mut() {
            c.fitness = Some(ctx.evaluate(&c.delta)?);
        }
    }
    Ok(())
}

fn sort_members(members: &mut [Candidate]) {
    // stable sort; ties keep insertion order for determinism
    members.sort_by(|a, b| a.total().total_cmp(&b.total()));
}

/// Step 1: K candidates sampled uniformly within the per-field bounds,
/// sf in a uniform ball around each layer's center, all fitnesses
/// evaluated and cached.
pub fn init_population(
    ctx: &FitnessContext,
    model: &Model,
    cfg: &SearchConfig,
) -> Result<PopulationState, SearchError> {
    if cfg.population < 2 {
        return Err(SearchError::PopulationTooSmall);
    }
    let centers = sf_centers(model, cfg.sf_center);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut members: Vec<Candidate> = (0..cfg.population)
        .map(|_| sample_fresh(&mut rng, &centers, cfg))
        .collect();
    evaluate_batch(ctx, &mut members, cfg.parallel)?;
    sort_members(&mut members);
    Ok(PopulationState {
        members,
        rng,
        history: Vec::new(),
    })
}

/// Step 2: block-wise regeneration. Outside the block the child copies the
/// best parent; inside, widths sample from [min-1, max+1], the regime from
/// [0, ceil(mean)+1], and sf from a ball around the parents' mean. Every
/// field is then clamped into its legal range (widths snap to {4,8} in
/// hardware mode).
pub fn crossover_mutate(
    rng: &mut ChaCha8Rng,
    best: &Candidate,
    other: &Candidate,
    block: &Range<usize>,
    cfg: &SearchConfig,
) -> Candidate {
    let mut delta = best.delta.clone();
    for l in block.clone() {
        let (p1, p2) = (&best.delta[l], &other.delta[l]);
        let n_raw = rng.gen_range(i32::from(p1.n.min(p2.n)) - 1..=i32::from(p1.n.max(p2.n)) + 1);
        let es_raw =
            rng.gen_range(i32::from(p1.es.min(p2.es)) - 1..=i32::from(p1.es.max(p2.es)) + 1);
        let rs_mean = (f64::from(p1.rs) + f64::from(p2.rs)) / 2.0;
        let rs_raw = rng.gen_range(0..=(rs_mean.ceil() as i32 + 1));
        let sf = (p1.sf + p2.sf) / 2.0 + uniform_ball(rng, cfg.sf_radius);
        delta[l] = clamp_fields(cfg, n_raw, es_raw, rs_raw, sf);
    }
    Candidate::new(delta)
}

/// Step 3: breed the step-2 child (acting as the best parent) against
/// freshly randomized parents over the same block, evaluate the children,
/// and return the fittest. None when no diversity parents are configured.
pub fn diversity_select(
    rng: &mut ChaCha8Rng,
    ctx: &FitnessContext,
    child: &Candidate,
    centers: &[f64],
    block: &Range<usize>,
    cfg: &SearchConfig,
) -> Result<Option<Candidate>, SearchError> {
    if cfg.diversity_parents == 0 {
        return Ok(None);
    }
    let mut children: Vec<Candidate> = (0..cfg.diversity_parents)
        .map(|_| {
            let parent = sample_fresh(rng, centers, cfg);
            crossover_mutate(rng, child, &parent, block, cfg)
        })
        .collect();
    evaluate_batch(ctx, &mut children, cfg.parallel)?;
    sort_members(&mut children);
    Ok(children.into_iter().next())
}

/// Step 4: insert the newcomers, rank by fitness, truncate back to K, and
/// append the best member to the history.
pub fn update_population(state: &mut PopulationState, newcomers: Vec<Candidate>, cfg: &SearchConfig) {
    state.members.extend(newcomers);
    sort_members(&mut state.members);
    state.members.truncate(cfg.population);
    state.record_update();
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Candidate,
    pub history: Vec<UpdateRecord>,
    pub final_population: Vec<Candidate>,
}

fn make_blocks(n: usize, block: usize) -> Vec<Range<usize>> {
    let b = block.max(1).min(n);
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        out.push(start..(start + b).min(n));
        start += b;
    }
    out
}

/// The full search: P passes over the blocks, C cycles per block (or the
/// literal P*C-updates reading behind the flag), steps 2-4 per cycle.
/// Returns the fittest candidate ever seen; rank truncation is elitist so
/// the best-fitness history is non-increasing.
pub fn run(
    model: &Model,
    calib: &CalibrationSet,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let ctx = FitnessContext::new(model, calib, cfg)?;
    let centers = sf_centers(model, cfg.sf_center);
    let mut state = init_population(&ctx, model, cfg)?;
    let blocks = make_blocks(model.quantizable_count(), cfg.block);

    let mut do_update = |state: &mut PopulationState, block: &Range<usize>| -> Result<(), SearchError> {
        let best = state.members[0].clone();
        let second = state.members[1].clone();
        let mut child = crossover_mutate(&mut state.rng, &best, &second, block, cfg);
        child.fitness = Some(ctx.evaluate(&child.delta)?);
        let mut rng = state.rng.clone();
        let diverse = diversity_select(&mut rng, &ctx, &child, &centers, block, cfg)?;
        state.rng = rng;
        let mut newcomers = vec![child];
        newcomers.extend(diverse);
        update_population(state, newcomers, cfg);
        Ok(())
    };

    if cfg.literal_pc_updates {
        let mut bi = 0usize;
        for _pass in 0..cfg.passes {
            for _cycle in 0..cfg.cycles {
                do_update(&mut state, &blocks[bi % blocks.len()])?;
                bi += 1;
            }
        }
    } else {
        for _pass in 0..cfg.passes {
            for block in &blocks {
                for _cycle in 0..cfg.cycles {
                    do_update(&mut state, block)?;
                }
            }
        }
    }

    Ok(SearchOutcome {
        best: state.members[0].clone(),
        history: state.history.clone(),
        final_population: state.members,
    })
}
