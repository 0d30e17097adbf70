//! Search for the shipped symmetry-breaking demo configuration.
//!
//! A single-pattern Hebbian net is permutation symmetric: every choice of k
//! dead inputs yields the same curve, so no damage ensemble over it can mix
//! curve classes. Storing a second pattern breaks that symmetry. The search
//! below walks a seeded shuffle of all 2^N bipolar candidates and keeps the
//! first second-pattern whose dead-input ensemble produces a rare TOT class.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvelab::{damage_ensemble_dead, ClassifyThresholds, EnsembleReport, NoiseModel};
use crate::error::Result;
use crate::netcore::{BipolarVector, SynapticMatrix, TieRule};

/// The reference pattern used throughout the shipped demos.
pub fn demo_reference() -> BipolarVector {
    BipolarVector::new([1, -1, 1, 1, -1, -1, 1, -1, 1]).expect("valid pattern")
}

/// A found demo configuration: the two stored patterns and the trained net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub reference: BipolarVector,
    pub second_pattern: BipolarVector,
    pub matrix: SynapticMatrix,
}

/// Search parameters for [`search_demo_config`].
#[derive(Debug, Clone, Copy)]
pub struct DemoSearch {
    pub seed: u64,
    pub k: usize,
    /// The qualifying TOT class must occur with probability strictly below
    /// this bound.
    pub max_tot_probability: f64,
    /// Among qualifying candidates, prefer the rare TOT class probability
    /// closest to this value (the published occurrence estimate).
    pub target_tot_probability: f64,
    pub max_candidates: usize,
}

impl Default for DemoSearch {
    fn default() -> Self {
        DemoSearch {
            seed: 0,
            k: 4,
            max_tot_probability: 0.10,
            target_tot_probability: 0.048,
            max_candidates: 512,
        }
    }
}

/// Runs the search over two-pattern nets `train_multi({x, z})`. A candidate
/// qualifies when its dead-input ensemble has at least two classes, a TOT
/// class rarer than `max_tot_probability`, and a positive strength against
/// the non-TOT baseline. Among qualifying candidates the one whose rare TOT
/// class probability lies closest to `target_tot_probability` wins.
/// Deterministic for a fixed seed.
pub fn search_demo_config(
    reference: &BipolarVector,
    search: &DemoSearch,
    tie: TieRule,
) -> Result<Option<(DemoConfig, EnsembleReport)>> {
    let n = reference.len();
    let thresholds = ClassifyThresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut candidates: Vec<u32> = (0..1u32 << n).collect();
    candidates.shuffle(&mut rng);
    let mut best: Option<(f64, DemoConfig, EnsembleReport)> = None;
    for bits in candidates.into_iter().take(search.max_candidates) {
        let z = BipolarVector::from_bits(bits, n);
        if z == *reference || z == reference.negated() {
            continue;
        }
        let matrix = SynapticMatrix::train_multi(&[reference.clone(), z.clone()])?;
        let report = damage_ensemble_dead(
            &matrix,
            reference,
            search.k,
            NoiseModel::Replacement,
            tie,
            &thresholds,
        )?;
        let rare_tot = report
            .classes
            .iter()
            .filter(|c| c.is_tot)
            .map(|c| c.probability.to_f64())
            .filter(|&p| p < search.max_tot_probability)
            .min_by(|a, b| {
                (a - search.target_tot_probability)
                    .abs()
                    .partial_cmp(&(b - search.target_tot_probability).abs())
                    .unwrap()
            });
        let Some(rare) = rare_tot else { continue };
        if report.classes.len() < 2 || report.tot_strength <= 0.0 {
            continue;
        }
        let distance = (rare - search.target_tot_probability).abs();
        if best.as_ref().is_none_or(|(d, _, _)| distance < *d) {
            best = Some((
                distance,
                DemoConfig {
                    reference: reference.clone(),
                    second_pattern: z,
                    matrix,
                },
                report,
            ));
        }
    }
    Ok(best.map(|(_, config, report)| (config, report)))
}
