//! The three-stage retrieval episode: localize the word node, test the
//! selected network with noisy cues, verify each output against the
//! metamemory etalon. Adds feeling-of-knowing, mislocalization via decoy
//! networks, strategy phases with repetition limits, and chronometry.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvelab::{draw_cue, CueSpec};
use crate::error::{Error, Result};
use crate::netcore::{matches_reference, BipolarVector, SynapticMatrix, TieRule};

/// One component network of a word node with its stored pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub net: SynapticMatrix,
    pub pattern: BipolarVector,
}

/// A word node: a named cluster of component networks (semantic, episodic,
/// phonological, ...), all sharing the same size N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordNode {
    pub id: String,
    pub parts: BTreeMap<String, Part>,
}

impl WordNode {
    pub fn validate(&self) -> Result<()> {
        let mut sizes = self.parts.values().map(|p| p.net.n());
        let first = sizes
            .next()
            .ok_or_else(|| Error::InvalidConfig("word node needs at least one part".into()))?;
        if sizes.any(|n| n != first) {
            return Err(Error::InvalidConfig(
                "all parts of a word node must share the same network size".into(),
            ));
        }
        Ok(())
    }
}

/// Etalon vectors held in metamemory, keyed by part name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetaMemory {
    pub references: BTreeMap<String, BipolarVector>,
}

/// Stage-I error configuration: parts listed here are bound to the given
/// decoy network instead of their own.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MislocalizationSpec {
    pub decoys: BTreeMap<String, SynapticMatrix>,
}

/// Result of stage I: which network each part was bound to, which bindings
/// are wrong, and whether the target etalon was found in metamemory.
#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    pub selected: BTreeMap<String, SynapticMatrix>,
    pub mislocalized: BTreeSet<String>,
    pub fok: bool,
}

/// Stage I. Binds every part to its own network, except parts named in
/// `error`, which get the configured decoy. The feeling-of-knowing flag
/// records whether the target part's etalon exists in metamemory.
pub fn localize(
    node: &WordNode,
    meta: &MetaMemory,
    target: &str,
    error: &MislocalizationSpec,
) -> Result<Localization> {
    node.validate()?;
    if !node.parts.contains_key(target) {
        return Err(Error::UnknownPart(target.to_string()));
    }
    for name in error.decoys.keys() {
        if !node.parts.contains_key(name) {
            return Err(Error::UnknownPart(name.clone()));
        }
    }
    let mut selected = BTreeMap::new();
    let mut mislocalized = BTreeSet::new();
    for (name, part) in &node.parts {
        match error.decoys.get(name) {
            Some(decoy) => {
                if decoy.n() != part.net.n() {
                    return Err(Error::LengthMismatch {
                        expected: part.net.n(),
                        got: decoy.n(),
                    });
                }
                selected.insert(name.clone(), decoy.clone());
                mislocalized.insert(name.clone());
            }
            None => {
                selected.insert(name.clone(), part.net.clone());
            }
        }
    }
    Ok(Localization {
        selected,
        mislocalized,
        fok: meta.references.contains_key(target),
    })
}

/// One stage II + III step: draw a noisy cue from the etalon, decode it
/// through the selected network, compare with the etalon.
pub fn attempt(
    net: &SynapticMatrix,
    reference: &BipolarVector,
    cue: &CueSpec,
    tie: TieRule,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    if reference.len() != net.n() {
        return Err(Error::LengthMismatch {
            expected: net.n(),
            got: reference.len(),
        });
    }
    cue.validate(net.n())?;
    let v = draw_cue(reference, cue, rng);
    let y = net.decode(&v, tie)?;
    matches_reference(&y, reference)
}

/// Per-series settings: the repetition limit L, the default cue, and the
/// decode tie rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub limit: u64,
    pub cue: CueSpec,
    pub tie: TieRule,
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.limit < 1 {
            return Err(Error::InvalidConfig("series limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Default repetition limit per series.
pub const DEFAULT_SERIES_LIMIT: u64 = 20;

/// Stage III loop: repeat attempts on one part up to the series limit,
/// stopping early on success.
pub fn run_series(
    loc: &Localization,
    part: &str,
    reference: &BipolarVector,
    cfg: &SeriesConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(bool, u64)> {
    cfg.validate()?;
    let net = loc
        .selected
        .get(part)
        .ok_or_else(|| Error::PartNotSelected(part.to_string()))?;
    let mut used = 0;
    while used < cfg.limit {
        used += 1;
        if attempt(net, reference, &cfg.cue, cfg.tie, rng)? {
            return Ok((true, used));
        }
    }
    Ok((false, used))
}

fn default_phase_series() -> u64 {
    1
}

/// One phase of a recall strategy, applied to the episode's target part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    /// Keep the recall conditions: run series with the given cue.
    Persist {
        cue: CueSpec,
        #[serde(default = "default_phase_series")]
        series: u64,
    },
    /// Free recall: fully random cue inputs (m = N).
    FreeRecall {
        #[serde(default = "default_phase_series")]
        series: u64,
    },
    /// Start over from stage I with a corrected localization, then test with
    /// the new cue.
    Relocalize {
        cue: CueSpec,
        #[serde(default = "default_phase_series")]
        series: u64,
    },
}

impl Phase {
    fn series_budget(&self) -> u64 {
        match self {
            Phase::Persist { series, .. }
            | Phase::FreeRecall { series }
            | Phase::Relocalize { series, .. } => *series,
        }
    }
}

/// The ordered phase schedule and the overall attempt budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub phases: Vec<Phase>,
    pub give_up_after: u64,
}

impl Strategy {
    pub fn validate(&self) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::InvalidConfig("strategy schedule is empty".into()));
        }
        if self.give_up_after < 1 {
            return Err(Error::InvalidConfig("give_up_after must be >= 1".into()));
        }
        Ok(())
    }
}

/// Durations in milliseconds for the chronometry of an episode. The total
/// episode time is exactly
/// `n_localizations·t_localize + n_attempts·(t_pulse + t_attempt + t_decision)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingModel {
    pub t_localize_ms: u64,
    pub t_attempt_ms: u64,
    pub t_decision_ms: u64,
    pub t_pulse_ms: u64,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            t_localize_ms: 300,
            t_attempt_ms: 150,
            t_decision_ms: 100,
            t_pulse_ms: 50,
        }
    }
}

impl TimingModel {
    pub fn per_attempt_ms(&self) -> u64 {
        self.t_pulse_ms + self.t_attempt_ms + self.t_decision_ms
    }
}

/// Total failed attempts after which resolution-on-relocalization counts as
/// sudden enough for the throw-up-one's-arms reaction.
pub const DEFAULT_ARMS_THRESHOLD: u64 = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    LocalizedStage { fok: bool },
    /// A companion (non-target) part was retrieved successfully.
    PartRecalled { part: String },
    AttemptFailed,
    SeriesExhausted,
    FokFelt,
    Relocalized,
    Resolved,
    ThrowUpArms,
    GaveUp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    #[serde(flatten)]
    pub kind: EventKind,
    pub t_ms: u64,
    pub phase_index: Option<usize>,
    /// Global 1-based attempt index, present on attempt-shaped events.
    pub attempt_index: Option<u64>,
}

/// Ordered record of one retrieval episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub events: Vec<Event>,
    pub attempts_by_phase: Vec<u64>,
    pub companion_attempts: u64,
    pub n_attempts: u64,
    pub n_localizations: u64,
    pub total_time_ms: u64,
}

impl EpisodeTrace {
    pub fn resolved(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Resolved))
    }

    pub fn find(&self, pred: impl Fn(&EventKind) -> bool) -> Option<usize> {
        self.events.iter().position(|e| pred(&e.kind))
    }
}

/// Everything needed to run one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub node: WordNode,
    pub meta: MetaMemory,
    /// The part the episode is trying to retrieve.
    pub target: String,
    #[serde(default)]
    pub mislocalization: MislocalizationSpec,
    /// Companion parts retrieved right after localization (stage Па-style
    /// accompanying information), each with its own cue, in order.
    #[serde(default)]
    pub companion_cues: Vec<(String, CueSpec)>,
    pub strategy: Strategy,
    pub series: SeriesConfig,
    #[serde(default)]
    pub timing: TimingModel,
    #[serde(default = "default_arms_threshold")]
    pub arms_threshold: u64,
}

fn default_arms_threshold() -> u64 {
    DEFAULT_ARMS_THRESHOLD
}

struct EpisodeState {
    events: Vec<Event>,
    clock_ms: u64,
    n_attempts: u64,
    n_localizations: u64,
    fok: bool,
    fok_felt: bool,
}

impl EpisodeState {
    fn emit(&mut self, kind: EventKind, phase_index: Option<usize>, attempt_index: Option<u64>) {
        self.events.push(Event {
            kind,
            t_ms: self.clock_ms,
            phase_index,
            attempt_index,
        });
    }

    fn series_exhausted(&mut self, phase_index: Option<usize>) {
        self.emit(EventKind::SeriesExhausted, phase_index, None);
        if self.fok && !self.fok_felt {
            // The feeling of knowing surfaces after the first failed series.
            self.emit(EventKind::FokFelt, phase_index, None);
            self.fok_felt = true;
        }
    }
}

/// Runs the full localize / retrieve / verify episode and returns its trace.
///
/// Phase semantics: each phase runs up to its series budget on the target
/// part, every series capped by the repetition limit. `Relocalize` phases
/// re-run stage I with an empty error set before testing. The episode ends
/// on resolution, on the overall attempt budget (`GaveUp`), or when the
/// schedule is exhausted (`GaveUp`).
pub fn run_episode(spec: &EpisodeSpec, rng: &mut ChaCha8Rng) -> Result<EpisodeTrace> {
    spec.strategy.validate()?;
    spec.series.validate()?;
    if !spec.node.parts.contains_key(&spec.target) {
        return Err(Error::UnknownPart(spec.target.clone()));
    }
    // Without an etalon in metamemory there is nothing to verify against:
    // fok stays false and no attempt can ever be confirmed. Cues are still
    // generated from the node's stored pattern so rng use stays uniform.
    let target_etalon = spec.meta.references.get(&spec.target).cloned();
    let cue_basis = target_etalon
        .clone()
        .unwrap_or_else(|| spec.node.parts[&spec.target].pattern.clone());

    let per_attempt = spec.timing.per_attempt_ms();
    let mut loc = localize(&spec.node, &spec.meta, &spec.target, &spec.mislocalization)?;
    let mut state = EpisodeState {
        events: Vec::new(),
        clock_ms: spec.timing.t_localize_ms,
        n_attempts: 0,
        n_localizations: 1,
        fok: loc.fok,
        fok_felt: false,
    };
    state.emit(EventKind::LocalizedStage { fok: loc.fok }, None, None);

    // Companion retrievals: accompanying information surfacing alongside the
    // still-missing target.
    let mut companion_attempts = 0u64;
    for (part, cue) in &spec.companion_cues {
        let reference = spec
            .meta
            .references
            .get(part)
            .ok_or_else(|| Error::UnknownPart(part.clone()))?;
        let net = loc
            .selected
            .get(part)
            .ok_or_else(|| Error::PartNotSelected(part.clone()))?
            .clone();
        let mut recalled = false;
        for _ in 0..spec.series.limit {
            state.n_attempts += 1;
            companion_attempts += 1;
            state.clock_ms += per_attempt;
            let index = Some(state.n_attempts);
            if attempt(&net, reference, cue, spec.series.tie, rng)? {
                state.emit(EventKind::PartRecalled { part: part.clone() }, None, index);
                recalled = true;
                break;
            }
            state.emit(EventKind::AttemptFailed, None, index);
        }
        if !recalled {
            state.series_exhausted(None);
        }
    }

    let mut attempts_by_phase = vec![0u64; spec.strategy.phases.len()];
    let mut attempts_at_relocalize: Option<u64> = None;
    let mut outcome: Option<EventKind> = None;

    'schedule: for (phase_index, phase) in spec.strategy.phases.iter().enumerate() {
        if let Phase::Relocalize { .. } = phase {
            loc = localize(
                &spec.node,
                &spec.meta,
                &spec.target,
                &MislocalizationSpec::default(),
            )?;
            state.n_localizations += 1;
            state.clock_ms += spec.timing.t_localize_ms;
            attempts_at_relocalize = Some(state.n_attempts);
            state.emit(EventKind::Relocalized, Some(phase_index), None);
        }
        let cue = match phase {
            Phase::Persist { cue, .. } | Phase::Relocalize { cue, .. } => *cue,
            Phase::FreeRecall { .. } => CueSpec::new(
                spec.node.parts[&spec.target].net.n(),
                spec.series.cue.noise_model,
            ),
        };
        let net = loc
            .selected
            .get(&spec.target)
            .ok_or_else(|| Error::PartNotSelected(spec.target.clone()))?
            .clone();
        for _series in 0..phase.series_budget() {
            for _ in 0..spec.series.limit {
                if state.n_attempts >= spec.strategy.give_up_after {
                    outcome = Some(EventKind::GaveUp);
                    break 'schedule;
                }
                state.n_attempts += 1;
                attempts_by_phase[phase_index] += 1;
                state.clock_ms += per_attempt;
                let index = Some(state.n_attempts);
                let success = attempt(&net, &cue_basis, &cue, spec.series.tie, rng)?
                    && target_etalon.is_some();
                if success {
                    let prior = state.n_attempts - 1;
                    state.emit(EventKind::Resolved, Some(phase_index), index);
                    if attempts_at_relocalize == Some(prior) && prior >= spec.arms_threshold {
                        state.emit(EventKind::ThrowUpArms, Some(phase_index), index);
                    }
                    outcome = Some(EventKind::Resolved);
                    break 'schedule;
                }
                state.emit(EventKind::AttemptFailed, Some(phase_index), index);
            }
            state.series_exhausted(Some(phase_index));
        }
    }

    match outcome {
        Some(EventKind::Resolved) => {}
        _ => state.emit(EventKind::GaveUp, None, None),
    }

    let trace = EpisodeTrace {
        events: state.events,
        attempts_by_phase,
        companion_attempts,
        n_attempts: state.n_attempts,
        n_localizations: state.n_localizations,
        total_time_ms: state.clock_ms,
    };
    debug_assert_eq!(
        trace.total_time_ms,
        trace.n_localizations * spec.timing.t_localize_ms + trace.n_attempts * per_attempt
    );
    Ok(trace)
}
