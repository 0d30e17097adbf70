//! The canonical "Horse Name" recall episode: a word node whose semantic and
//! episodic components surface immediately while the phonological component
//! (the surname itself) is bound to a decoy network. Persistence and free
//! recall fail for a long stretch; a new cue forces relocalization, the
//! corrected network recognizes a near-exact input at once, and the sudden
//! resolution fires the throw-up-one's-arms event.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvelab::{CueSpec, NoiseModel};
use crate::error::{Error, Result};
use crate::netcore::{BipolarVector, SynapticMatrix, TieRule};
use crate::retrieval::{
    run_episode, EpisodeSpec, EpisodeTrace, EventKind, MetaMemory, MislocalizationSpec, Part,
    Phase, SeriesConfig, Strategy, TimingModel, WordNode, DEFAULT_ARMS_THRESHOLD,
    DEFAULT_SERIES_LIMIT,
};

/// The shipped episode configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChekhovConfig {
    pub episode: EpisodeSpec,
}

fn stored(bits: &[i64]) -> (SynapticMatrix, BipolarVector) {
    let x = BipolarVector::new(bits.iter().copied()).expect("valid pattern");
    (SynapticMatrix::train_hebbian(&x, false), x)
}

/// Builds the shipped configuration: three intact component nets, all
/// etalons present in metamemory (so the feeling of knowing arises), the
/// phonological part initially bound to a decoy, and a schedule sized so
/// that well over the arms threshold of attempts fail before the
/// near-exact (m = 1) cue arrives with the relocalization.
pub fn chekhov_config() -> ChekhovConfig {
    let (semantic_net, semantic) = stored(&[1, 1, -1, 1, -1, 1, -1, -1, 1]);
    let (episodic_net, episodic) = stored(&[-1, 1, 1, -1, 1, -1, 1, 1, -1]);
    let (phonological_net, phonological) = stored(&[1, -1, 1, 1, -1, -1, 1, -1, 1]);
    // The decoy stores an unrelated pattern, so no cue toward the real
    // surname can ever surface from it.
    let (decoy_net, _) = stored(&[-1, -1, 1, -1, 1, 1, -1, 1, 1]);

    let node = WordNode {
        id: "horse-surname".into(),
        parts: [
            (
                "semantic".to_string(),
                Part {
                    net: semantic_net,
                    pattern: semantic.clone(),
                },
            ),
            (
                "episodic".to_string(),
                Part {
                    net: episodic_net,
                    pattern: episodic.clone(),
                },
            ),
            (
                "phonological".to_string(),
                Part {
                    net: phonological_net,
                    pattern: phonological.clone(),
                },
            ),
        ]
        .into(),
    };
    let meta = MetaMemory {
        references: [
            ("semantic".to_string(), semantic),
            ("episodic".to_string(), episodic),
            ("phonological".to_string(), phonological),
        ]
        .into(),
    };

    let episode = EpisodeSpec {
        node,
        meta,
        target: "phonological".into(),
        mislocalization: MislocalizationSpec {
            decoys: [("phonological".to_string(), decoy_net)].into(),
        },
        companion_cues: vec![
            ("semantic".to_string(), CueSpec::new(0, NoiseModel::Replacement)),
            ("episodic".to_string(), CueSpec::new(0, NoiseModel::Replacement)),
        ],
        strategy: Strategy {
            phases: vec![
                // persist with the original semantic cue (d near 0.7)
                Phase::Persist {
                    cue: CueSpec::new(6, NoiseModel::Replacement),
                    series: 3,
                },
                Phase::FreeRecall { series: 3 },
                // the decisive near-exact hint: one noisy component of nine
                Phase::Relocalize {
                    cue: CueSpec::new(1, NoiseModel::Replacement),
                    series: 1,
                },
            ],
            give_up_after: 200,
        },
        series: SeriesConfig {
            limit: DEFAULT_SERIES_LIMIT,
            cue: CueSpec::new(6, NoiseModel::Replacement),
            tie: TieRule::RetainInput,
        },
        timing: TimingModel::default(),
        arms_threshold: DEFAULT_ARMS_THRESHOLD,
    };
    ChekhovConfig { episode }
}

/// Narrative stage labels, in the order they must occur in the trace.
pub const STAGE_LABELS: [&str; 6] = ["I", "Па", "Пв", "Пс", "Пд", "III"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrativeRow {
    pub stage: String,
    pub description: String,
    /// Index into the trace's event list of the row's anchor event.
    pub event_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrativeMap {
    pub rows: Vec<NarrativeRow>,
}

impl std::fmt::Display for NarrativeMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<5} {:<8} description", "stage", "event#")?;
        for row in &self.rows {
            writeln!(f, "{:<5} {:<8} {}", row.stage, row.event_index, row.description)?;
        }
        Ok(())
    }
}

fn require(condition: bool, what: &str) -> Result<()> {
    if condition {
        Ok(())
    } else {
        Err(Error::SignatureMismatch(what.to_string()))
    }
}

/// Runs the shipped episode for the given seed, checks the full event
/// signature, and returns the trace with its narrative stage map.
///
/// Signature, in order: localization with fok = true; semantic and episodic
/// successes; exhausted cued series with the feeling of knowing surfacing
/// right after the first one; free-recall failures; relocalization; the
/// resolution exactly one attempt later; the throw-up-one's-arms event.
pub fn run_chekhov(seed: u64) -> Result<(EpisodeTrace, NarrativeMap)> {
    let config = chekhov_config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trace = run_episode(&config.episode, &mut rng)?;
    let map = narrative_map(&trace)?;
    Ok((trace, map))
}

/// Builds the stage map while verifying the episode signature.
pub fn narrative_map(trace: &EpisodeTrace) -> Result<NarrativeMap> {
    let events = &trace.events;
    require(
        matches!(events.first().map(|e| &e.kind), Some(EventKind::LocalizedStage { fok: true })),
        "LocalizedStage(fok = true) as the first event",
    )?;

    let recalled: Vec<usize> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.kind, EventKind::PartRecalled { .. }))
        .map(|(i, _)| i)
        .collect();
    require(recalled.len() == 2, "semantic and episodic successes")?;

    let first_exhausted = trace
        .find(|k| matches!(k, EventKind::SeriesExhausted))
        .ok_or_else(|| Error::SignatureMismatch("at least one SeriesExhausted".into()))?;
    require(
        recalled.iter().all(|&i| i < first_exhausted),
        "companion successes before the first exhausted series",
    )?;
    let fok_felt = trace
        .find(|k| matches!(k, EventKind::FokFelt))
        .ok_or_else(|| Error::SignatureMismatch("FOKFelt".into()))?;
    require(
        fok_felt == first_exhausted + 1,
        "FOKFelt immediately after the first SeriesExhausted",
    )?;

    let free_recall_failure = events
        .iter()
        .position(|e| matches!(e.kind, EventKind::AttemptFailed) && e.phase_index == Some(1))
        .ok_or_else(|| Error::SignatureMismatch("free-recall failures".into()))?;

    let relocalized = trace
        .find(|k| matches!(k, EventKind::Relocalized))
        .ok_or_else(|| Error::SignatureMismatch("Relocalized".into()))?;
    require(fok_felt < relocalized, "FOKFelt before Relocalized")?;

    let resolved = trace
        .find(|k| matches!(k, EventKind::Resolved))
        .ok_or_else(|| Error::SignatureMismatch("Resolved".into()))?;
    require(resolved > relocalized, "no Resolved before Relocalized")?;
    require(
        resolved == relocalized + 1,
        "Resolved exactly one attempt after Relocalized",
    )?;
    require(
        events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Resolved))
            .count()
            == 1,
        "exactly one Resolved",
    )?;
    require(
        trace.find(|k| matches!(k, EventKind::ThrowUpArms)) == Some(resolved + 1),
        "ThrowUpArms right after Resolved",
    )?;

    let rows = vec![
        NarrativeRow {
            stage: "I".into(),
            description: "word node localized; etalons bound; feeling of knowing primed".into(),
            event_index: 0,
        },
        NarrativeRow {
            stage: "Па".into(),
            description: "accompanying semantic and episodic information retrieved".into(),
            event_index: recalled[0],
        },
        NarrativeRow {
            stage: "Пв".into(),
            description: "persistent cued recall of the surname fails series after series".into(),
            event_index: first_exhausted,
        },
        NarrativeRow {
            stage: "Пс".into(),
            description: "free recall without cues keeps failing".into(),
            event_index: free_recall_failure,
        },
        NarrativeRow {
            stage: "Пд".into(),
            description: "new cue forces relocalization and a near-exact input".into(),
            event_index: relocalized,
        },
        NarrativeRow {
            stage: "III".into(),
            description: "output matches the etalon; sudden resolution, arms thrown up".into(),
            event_index: resolved,
        },
    ];
    Ok(NarrativeMap { rows })
}
