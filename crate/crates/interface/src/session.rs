//! Interactive game sessions held in memory.
//!
//! A session fixes its ensemble realization when it is created: all `N`
//! preparations are drawn up front from the preparation substream of the
//! seed and kept hidden until the last round has been played. Outcomes are
//! drawn from the outcome substream as rounds are played, so replaying a
//! session with the same seed and the same strategy sequence reproduces the
//! same outcomes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use spingame_core::entropy::{von_neumann_entropy, EntropyUnit};
use spingame_core::game::{
    axis_menu, best_restricted_strategy, best_unrestricted_strategy, expected_payoff,
    member_distributions, RoundSampler,
};
use spingame_core::quantum::spin::{bloch_angles, SpinHalf};
use spingame_core::{DensityOperator, Ensemble};
use thiserror::Error;

use crate::error::SpecError;
use crate::spec::{Axis, EnsembleSpec, ObservableSpec, StrategySpec};

/// Largest `N` a session may be created with.
pub const MAX_SESSION_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Invalid(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] spingame_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub ensemble: EnsembleSpec,
    pub rounds: u64,
    /// Fixed seed; drawn at random when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayRounds {
    pub strategy: StrategySpec,
    pub rounds: u64,
}

/// Public view of a session. Never contains preparations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStatus {
    pub id: String,
    pub ensemble: String,
    pub dimension: usize,
    pub entropy_bits: f64,
    pub rounds_total: u64,
    pub rounds_played: u64,
    pub score: i64,
    pub normalized: f64,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeView {
    pub round: u64,
    pub outcome: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub point: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayResponse {
    pub outcomes: Vec<OutcomeView>,
    pub rounds_played: u64,
    pub rounds_total: u64,
    pub score: i64,
    pub normalized: f64,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevealedRound {
    pub round: u64,
    pub prepared: usize,
    pub outcome: usize,
    pub point: i8,
    /// Index into `strategies`.
    pub strategy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyUse {
    pub strategy: StrategySpec,
    pub description: String,
    pub rounds: u64,
    pub score: i64,
    pub expected_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedOptimum {
    pub strategy: StrategySpec,
    pub description: String,
    pub payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnrestrictedOptimum {
    pub payoff: f64,
    /// Eigenvector bet on, as `(re, im)` pairs.
    pub eigenvector: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

/// Everything revealed once a session is over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionAnalysis {
    pub id: String,
    pub seed: u64,
    pub ensemble: EnsembleSpec,
    pub dimension: usize,
    pub entropy_bits: f64,
    pub rounds_total: u64,
    pub score: i64,
    pub normalized: f64,
    /// Hidden preparation sequence: index of the prepared ensemble member per round.
    pub preparations: Vec<usize>,
    pub rounds: Vec<RevealedRound>,
    pub strategies: Vec<StrategyUse>,
    /// True when the player switched strategy mid-session; the score is then
    /// not that of a single fixed strategy.
    pub strategy_changed: bool,
    /// Rounds-weighted mean of the exact payoffs of the strategies played.
    pub expected_normalized: f64,
    /// Best of the `Sz`/`Sx` menu; qubit sessions only.
    pub restricted_optimum: Option<RestrictedOptimum>,
    pub unrestricted_optimum: UnrestrictedOptimum,
}

#[derive(Debug, Clone, Copy)]
struct PlayedRound {
    outcome: usize,
    point: i8,
    strategy: usize,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    seed: u64,
    spec: EnsembleSpec,
    ensemble: Ensemble,
    rho: DensityOperator,
    entropy_bits: f64,
    preparations: Vec<usize>,
    sampler: RoundSampler,
    played: Vec<PlayedRound>,
    score: i64,
    strategies: Vec<StrategySpec>,
}

impl Session {
    pub fn create(id: String, req: &CreateSession, seed: u64) -> Result<Self, SessionError> {
        let ensemble = req.ensemble.build().map_err(|e| e.within("ensemble"))?;
        if req.rounds == 0 || req.rounds > MAX_SESSION_ROUNDS {
            return Err(
                SpecError::new("rounds", format!("must be in 1..={MAX_SESSION_ROUNDS}")).into(),
            );
        }
        let rho = DensityOperator::from_ensemble(&ensemble)?;
        let entropy_bits = von_neumann_entropy(&rho, EntropyUnit::Bits)?;
        let mut sampler = RoundSampler::new(seed);
        let preparations = (0..req.rounds)
            .map(|_| sampler.next_preparation(&ensemble))
            .collect();
        Ok(Self {
            id,
            seed,
            spec: req.ensemble.clone(),
            ensemble,
            rho,
            entropy_bits,
            preparations,
            sampler,
            played: Vec::new(),
            score: 0,
            strategies: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn rounds_total(&self) -> u64 {
        self.preparations.len() as u64
    }

    pub fn rounds_played(&self) -> u64 {
        self.played.len() as u64
    }

    pub fn is_finished(&self) -> bool {
        self.rounds_played() == self.rounds_total()
    }

    fn normalized(&self) -> f64 {
        if self.played.is_empty() {
            0.0
        } else {
            self.score as f64 / self.played.len() as f64
        }
    }

    pub fn status(&self) -> SessionStatus {
        SessionStatus {
            id: self.id.clone(),
            ensemble: self.spec.to_string(),
            dimension: self.ensemble.dim(),
            entropy_bits: self.entropy_bits,
            rounds_total: self.rounds_total(),
            rounds_played: self.rounds_played(),
            score: self.score,
            normalized: self.normalized(),
            finished: self.is_finished(),
        }
    }

    pub fn play(&mut self, req: &PlayRounds) -> Result<PlayResponse, SessionError> {
        if req.rounds == 0 {
            return Err(SpecError::new("rounds", "must be at least 1").into());
        }
        let remaining = self.rounds_total() - self.rounds_played();
        if remaining == 0 {
            return Err(SessionError::Conflict("session is finished".into()));
        }
        if req.rounds > remaining {
            return Err(SessionError::Conflict(format!(
                "requested {} rounds but only {remaining} remain",
                req.rounds
            )));
        }
        let strategy = req
            .strategy
            .build(self.ensemble.dim())
            .map_err(|e| e.within("strategy"))?;
        let born = member_distributions(&self.ensemble, strategy.observable())?;

        let strategy_index = match self.strategies.last() {
            Some(last) if *last == req.strategy => self.strategies.len() - 1,
            _ => {
                self.strategies.push(req.strategy.clone());
                self.strategies.len() - 1
            }
        };

        let mut outcomes = Vec::with_capacity(req.rounds as usize);
        for _ in 0..req.rounds {
            let round = self.played.len();
            let prepared = self.preparations[round];
            let outcome = self.sampler.next_outcome(&born[prepared]);
            let point: i8 = if outcome == strategy.chosen_index() {
                1
            } else {
                -1
            };
            self.score += i64::from(point);
            self.played.push(PlayedRound {
                outcome,
                point,
                strategy: strategy_index,
            });
            outcomes.push(OutcomeView {
                round: round as u64,
                outcome,
                label: strategy.observable().label(outcome).map(str::to_string),
                point,
            });
        }
        Ok(PlayResponse {
            outcomes,
            rounds_played: self.rounds_played(),
            rounds_total: self.rounds_total(),
            score: self.score,
            normalized: self.normalized(),
            finished: self.is_finished(),
        })
    }

    pub fn analysis(&self) -> Result<SessionAnalysis, SessionError> {
        if !self.is_finished() {
            return Err(SessionError::Conflict(format!(
                "analysis is available after all {} rounds; {} played",
                self.rounds_total(),
                self.rounds_played()
            )));
        }
        let dim = self.ensemble.dim();
        let mut uses: Vec<StrategyUse> = Vec::with_capacity(self.strategies.len());
        for spec in &self.strategies {
            let payoff = expected_payoff(&self.rho, &spec.build(dim)?)?;
            uses.push(StrategyUse {
                strategy: spec.clone(),
                description: spec.describe(),
                rounds: 0,
                score: 0,
                expected_payoff: payoff,
            });
        }
        for r in &self.played {
            uses[r.strategy].rounds += 1;
            uses[r.strategy].score += i64::from(r.point);
        }
        let expected_normalized = uses
            .iter()
            .map(|u| u.rounds as f64 * u.expected_payoff)
            .sum::<f64>()
            / self.rounds_total() as f64;

        let restricted_optimum = if dim == 2 {
            let menu = axis_menu(&SpinHalf::default());
            let best = best_restricted_strategy(&self.rho, &menu)?;
            let strategy = StrategySpec {
                observable: ObservableSpec::Axis(if best.index < 2 { Axis::Z } else { Axis::X }),
                pick: best.index % 2,
            };
            Some(RestrictedOptimum {
                description: strategy.describe(),
                strategy,
                payoff: best.payoff,
            })
        } else {
            None
        };

        let opt = best_unrestricted_strategy(&self.rho)?;
        let ket = opt.strategy.chosen_ket();
        let angles = if dim == 2 {
            Some(bloch_angles(ket)?)
        } else {
            None
        };
        let unrestricted_optimum = UnrestrictedOptimum {
            payoff: opt.payoff,
            eigenvector: ket.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            theta: angles.map(|a| a.0),
            phi: angles.map(|a| a.1),
        };

        Ok(SessionAnalysis {
            id: self.id.clone(),
            seed: self.seed,
            ensemble: self.spec.clone(),
            dimension: dim,
            entropy_bits: self.entropy_bits,
            rounds_total: self.rounds_total(),
            score: self.score,
            normalized: self.normalized(),
            preparations: self.preparations.clone(),
            rounds: self
                .played
                .iter()
                .zip(&self.preparations)
                .enumerate()
                .map(|(i, (r, &prepared))| RevealedRound {
                    round: i as u64,
                    prepared,
                    outcome: r.outcome,
                    point: r.point,
                    strategy: r.strategy,
                })
                .collect(),
            strategy_changed: uses.len() > 1,
            strategies: uses,
            expected_normalized,
            restricted_optimum,
            unrestricted_optimum,
        })
    }
}

/// Concurrent map of sessions. Each session sits behind its own mutex, so
/// round batches on one session are serialized while different sessions
/// proceed independently.
#[derive(Debug, Clone, Default)]
pub struct SessionStore {
    inner: Arc<RwLock<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self, req: &CreateSession) -> Result<SessionStatus, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let seed = req.seed.unwrap_or_else(rand::random);
        let session = Session::create(id.clone(), req, seed)?;
        let status = session.status();
        self.inner
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(status)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.inner
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_string()))
    }

    /// Runs `f` with exclusive access to one session.
    pub fn with_session<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<T, SessionError>,
    ) -> Result<T, SessionError> {
        let session = self.get(id)?;
        let mut guard = session.lock().expect("session poisoned");
        f(&mut guard)
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
