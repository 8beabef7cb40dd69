//! The measurement scoring game.
//!
//! A preparer emits members of an [`Ensemble`]; the player fixes one
//! observable and one of its eigenvectors for the whole run. Each round the
//! player scores +1 when the outcome belonging to that eigenvector comes up
//! and -1 otherwise, so the expected normalized score of a strategy with
//! eigenvector `v` is `2 <v|rho|v> - 1`.

use crate::entropy::{binary_entropy, von_neumann_entropy, EntropyUnit};
use crate::error::{Error, Result};
use crate::quantum::spin::{bloch_angles, x_plus, z_minus, z_plus, SpinHalf};
use crate::quantum::{
    born_distribution, outcome_probability, sample_index, DensityOperator, Ensemble, Ket,
    Observable,
};
use crate::rng::{self, Stream};

/// At most this many rounds are kept in a [`GameResult`] round log.
pub const MAX_LOGGED_ROUNDS: usize = 1_000_000;
/// Payoffs closer than this are ties; the lower menu index wins.
pub const PAYOFF_TIE_TOL: f64 = 1e-12;
/// Allowed disagreement between closed-form and engine curve values.
pub const CURVE_TOL: f64 = 1e-9;

/// One observable plus the eigenvector the player bets on.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    observable: Observable,
    chosen_index: usize,
}

impl Strategy {
    pub fn new(observable: Observable, chosen_index: usize) -> Result<Self> {
        if chosen_index >= observable.dim() {
            return Err(Error::IndexOutOfRange {
                index: chosen_index,
                dim: observable.dim(),
            });
        }
        Ok(Self {
            observable,
            chosen_index,
        })
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn chosen_index(&self) -> usize {
        self.chosen_index
    }

    pub fn chosen_ket(&self) -> &Ket {
        &self.observable.eigenkets()[self.chosen_index]
    }

    pub fn dim(&self) -> usize {
        self.observable.dim()
    }
}

/// `2 <v|rho|v> - 1` for the strategy's eigenvector `v`.
pub fn expected_payoff(rho: &DensityOperator, strategy: &Strategy) -> Result<f64> {
    Ok(2.0 * outcome_probability(rho, strategy.chosen_ket())? - 1.0)
}

/// Which strategies the player may pick from.
#[derive(Debug, Clone, PartialEq)]
pub enum GameMode {
    Restricted(Vec<Strategy>),
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub ensemble: Ensemble,
    pub rounds: u64,
    pub seed: u64,
    pub mode: GameMode,
    /// Keep a per-round log (first [`MAX_LOGGED_ROUNDS`] rounds).
    pub record_rounds: bool,
}

impl GameConfig {
    pub fn new(ensemble: Ensemble, rounds: u64, seed: u64) -> Result<Self> {
        let cfg = Self {
            ensemble,
            rounds,
            seed,
            mode: GameMode::Unrestricted,
            record_rounds: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: GameMode) -> Result<Self> {
        self.mode = mode;
        self.validate()?;
        Ok(self)
    }

    pub fn with_round_log(mut self, on: bool) -> Self {
        self.record_rounds = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        if let GameMode::Restricted(menu) = &self.mode {
            if menu.is_empty() {
                return Err(Error::InvalidConfig("restricted menu is empty".into()));
            }
            for s in menu {
                if s.dim() != self.ensemble.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.ensemble.dim(),
                        found: s.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The best strategy allowed by [`GameMode`].
    pub fn optimal_strategy(&self) -> Result<Strategy> {
        let rho = DensityOperator::from_ensemble(&self.ensemble)?;
        match &self.mode {
            GameMode::Restricted(menu) => {
                Ok(best_restricted_strategy(&rho, menu)?.strategy.clone())
            }
            GameMode::Unrestricted => Ok(best_unrestricted_strategy(&rho)?.strategy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub prepared: usize,
    pub outcome: usize,
    pub point: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    /// Wins minus losses.
    pub score: i64,
    pub rounds: u64,
    pub per_round: Option<Vec<RoundRecord>>,
}

impl GameResult {
    /// `N_p / N`.
    pub fn normalized(&self) -> f64 {
        self.score as f64 / self.rounds as f64
    }

    pub fn wins(&self) -> u64 {
        ((self.rounds as i64 + self.score) / 2) as u64
    }

    pub fn losses(&self) -> u64 {
        self.rounds - self.wins()
    }
}

/// The two random substreams driving a game.
///
/// Each round consumes exactly one variate from each stream, so playing more
/// rounds never changes the draws of earlier ones.
#[derive(Debug, Clone)]
pub struct RoundSampler {
    preparation: Stream,
    outcome: Stream,
}

impl RoundSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            preparation: rng::stream(seed, rng::PREPARATION_STREAM),
            outcome: rng::stream(seed, rng::OUTCOME_STREAM),
        }
    }

    /// Index of the next prepared ensemble member.
    pub fn next_preparation(&mut self, ensemble: &Ensemble) -> usize {
        ensemble.sample_member(&mut self.preparation)
    }

    /// Outcome index drawn from a Born distribution.
    pub fn next_outcome(&mut self, born: &[f64]) -> usize {
        sample_index(born, &mut self.outcome)
    }
}

/// Born distributions of `obs` for every ensemble member.
pub fn member_distributions(ensemble: &Ensemble, obs: &Observable) -> Result<Vec<Vec<f64>>> {
    ensemble
        .members()
        .iter()
        .map(|(_, ket)| born_distribution(ket, obs))
        .collect()
}

/// Plays `cfg.rounds` rounds of `strategy` against the configured ensemble.
pub fn simulate_game(cfg: &GameConfig, strategy: &Strategy) -> Result<GameResult> {
    cfg.validate()?;
    if strategy.dim() != cfg.ensemble.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.ensemble.dim(),
            found: strategy.dim(),
        });
    }
    let born = member_distributions(&cfg.ensemble, strategy.observable())?;
    let mut sampler = RoundSampler::new(cfg.seed);
    let mut log = cfg
        .record_rounds
        .then(|| Vec::with_capacity((cfg.rounds as usize).min(MAX_LOGGED_ROUNDS)));
    let mut score: i64 = 0;
    for _ in 0..cfg.rounds {
        let prepared = sampler.next_preparation(&cfg.ensemble);
        let outcome = sampler.next_outcome(&born[prepared]);
        let point: i8 = if outcome == strategy.chosen_index() {
            1
        } else {
            -1
        };
        score += i64::from(point);
        if let Some(log) = log.as_mut() {
            if log.len() < MAX_LOGGED_ROUNDS {
                log.push(RoundRecord {
                    prepared,
                    outcome,
                    point,
                });
            }
        }
    }
    Ok(GameResult {
        score,
        rounds: cfg.rounds,
        per_round: log,
    })
}

/// Runs `replicas` independent games in parallel; replica `i` uses seed
/// `rng::split_seed(cfg.seed, i)`.
pub fn simulate_replicas(
    cfg: &GameConfig,
    strategy: &Strategy,
    replicas: usize,
) -> Result<Vec<GameResult>> {
    let configs: Vec<GameConfig> = (0..replicas)
        .map(|i| GameConfig {
            seed: rng::split_seed(cfg.seed, i as u64),
            ..cfg.clone()
        })
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || simulate_game(c, strategy)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// The argmax of a restricted menu.
#[derive(Debug, Clone, PartialEq)]
pub struct MenuChoice<'a> {
    pub index: usize,
    pub strategy: &'a Strategy,
    pub payoff: f64,
}

/// Best strategy from `menu`; ties go to the lowest index.
pub fn best_restricted_strategy<'a>(
    rho: &DensityOperator,
    menu: &'a [Strategy],
) -> Result<MenuChoice<'a>> {
    let mut best: Option<MenuChoice<'a>> = None;
    for (index, strategy) in menu.iter().enumerate() {
        let payoff = expected_payoff(rho, strategy)?;
        if best
            .as_ref()
            .is_none_or(|b| payoff > b.payoff + PAYOFF_TIE_TOL)
        {
            best = Some(MenuChoice {
                index,
                strategy,
                payoff,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidConfig("restricted menu is empty".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub strategy: Strategy,
    /// `2 lambda_max - 1`.
    pub payoff: f64,
}

/// Best strategy over every observable: bet on a top eigenvector of `rho`.
///
/// For qubits the observable is the spin along that eigenvector's Bloch
/// direction; otherwise it is diagonal in the eigenbasis of `rho` with
/// eigenvalues `d-1, ..., 0`. The chosen index is always 0.
pub fn best_unrestricted_strategy(rho: &DensityOperator) -> Result<Optimum> {
    let top = Ket::new(rho.spectrum().eigenvectors()[0].clone())?;
    let observable = if rho.dim() == 2 {
        let (theta, phi) = bloch_angles(&top)?;
        SpinHalf::default().direction(theta, phi)?
    } else {
        let kets = rho
            .spectrum()
            .eigenvectors()
            .iter()
            .map(|v| Ket::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<f64> = (0..rho.dim()).rev().map(|k| k as f64).collect();
        Observable::from_spectrum(&labels, &kets)?
    };
    Ok(Optimum {
        strategy: Strategy::new(observable, 0)?,
        payoff: 2.0 * rho.max_eigenvalue() - 1.0,
    })
}

/// Preset preparations `rho1`, `rho2`, `rho3`, parametrized by `p1 = 1 - p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetEnsemble {
    /// `|z+><z+|`.
    Rho1,
    /// `p1 |z+><z+| + p2 |x+><x+|`.
    Rho2 { p1: f64 },
    /// `p1 |z+><z+| + p2 |z-><z-|`.
    Rho3 { p1: f64 },
}

fn check_p1(p1: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p1) {
        Ok(p1)
    } else {
        Err(Error::InvalidProbability(p1))
    }
}

impl PresetEnsemble {
    pub fn ensemble(self) -> Result<Ensemble> {
        match self {
            Self::Rho1 => Ok(Ensemble::pure(z_plus())),
            Self::Rho2 { p1 } => {
                let p1 = check_p1(p1)?;
                Ensemble::new(vec![(p1, z_plus()), (1.0 - p1, x_plus())])
            }
            Self::Rho3 { p1 } => {
                let p1 = check_p1(p1)?;
                Ensemble::new(vec![(p1, z_plus()), (1.0 - p1, z_minus())])
            }
        }
    }

    pub fn density(self) -> Result<DensityOperator> {
        DensityOperator::from_ensemble(&self.ensemble()?)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Rho1 => "rho1",
            Self::Rho2 { .. } => "rho2",
            Self::Rho3 { .. } => "rho3",
        }
    }
}

/// `[(Sz, z+), (Sz, z-), (Sx, x+), (Sx, x-)]`.
pub fn axis_menu(spin: &SpinHalf) -> Vec<Strategy> {
    let (sz, sx) = (spin.sz(), spin.sx());
    vec![
        Strategy::new(sz.clone(), 0),
        Strategy::new(sz, 1),
        Strategy::new(sx.clone(), 0),
        Strategy::new(sx, 1),
    ]
    .into_iter()
    .map(|s| s.expect("index within a qubit"))
    .collect()
}

/// Closed-form entropies and payoffs for [`PresetEnsemble`].
pub mod closed_form {
    use super::*;

    /// Smaller eigenvalue of `rho2`: `(1 - sqrt(1 - 2 p1 p2)) / 2`.
    pub fn rho2_min_eigenvalue(p1: f64) -> f64 {
        let p2 = 1.0 - p1;
        (1.0 - (1.0 - 2.0 * p1 * p2).sqrt()) / 2.0
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(e: PresetEnsemble) -> f64 {
        match e {
            PresetEnsemble::Rho1 => 0.0,
            PresetEnsemble::Rho2 { p1 } => binary_entropy(rho2_min_eigenvalue(p1)),
            PresetEnsemble::Rho3 { p1 } => binary_entropy(p1),
        }
    }

    /// Best payoff over the `Sz`/`Sx` menu.
    pub fn restricted_payoff(e: PresetEnsemble) -> f64 {
        match e {
            PresetEnsemble::Rho1 => 1.0,
            PresetEnsemble::Rho2 { p1 } => p1.max(1.0 - p1),
            PresetEnsemble::Rho3 { p1 } => (2.0 * p1 - 1.0).abs(),
        }
    }

    /// `2 lambda_max - 1` over all observables.
    pub fn unrestricted_payoff(e: PresetEnsemble) -> f64 {
        match e {
            PresetEnsemble::Rho1 => 1.0,
            PresetEnsemble::Rho2 { p1 } => (1.0 - 2.0 * p1 * (1.0 - p1)).sqrt(),
            PresetEnsemble::Rho3 { p1 } => (2.0 * p1 - 1.0).abs(),
        }
    }
}

/// Entropy and restricted payoff of `rho1`, `rho2`, `rho3` at one `p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub entropy: [f64; 3],
    pub payoff: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub p1: f64,
    pub closed: CurvePoint,
    pub engine: CurvePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurves {
    pub rows: Vec<CurveRow>,
    /// Largest closed-form vs engine disagreement over the grid.
    pub max_deviation: f64,
}

fn ensembles_at(p1: f64) -> [PresetEnsemble; 3] {
    [
        PresetEnsemble::Rho1,
        PresetEnsemble::Rho2 { p1 },
        PresetEnsemble::Rho3 { p1 },
    ]
}

/// Evaluates every grid point by closed form and by the engine
/// (density operator, spectrum, menu argmax) and checks they agree within
/// [`CURVE_TOL`].
pub fn reference_curves(grid: &[f64]) -> Result<ReferenceCurves> {
    let menu = axis_menu(&SpinHalf::default());
    let mut rows = Vec::with_capacity(grid.len());
    let mut max_deviation: f64 = 0.0;
    for &p1 in grid {
        check_p1(p1)?;
        let mut closed = CurvePoint {
            entropy: [0.0; 3],
            payoff: [0.0; 3],
        };
        let mut engine = closed;
        for (k, e) in ensembles_at(p1).into_iter().enumerate() {
            let rho = e.density()?;
            closed.entropy[k] = closed_form::entropy(e);
            closed.payoff[k] = closed_form::restricted_payoff(e);
            engine.entropy[k] = von_neumann_entropy(&rho, EntropyUnit::Bits)?;
            engine.payoff[k] = best_restricted_strategy(&rho, &menu)?.payoff;

            let ds = (closed.entropy[k] - engine.entropy[k]).abs();
            let dp = (closed.payoff[k] - engine.payoff[k]).abs();
            for (column, dev) in [(["S1", "S2", "S3"][k], ds), (["P1", "P2", "P3"][k], dp)] {
                if dev.is_nan() || dev > CURVE_TOL {
                    return Err(Error::CurveMismatch {
                        p1,
                        column,
                        deviation: dev,
                    });
                }
                max_deviation = max_deviation.max(dev);
            }
        }
        rows.push(CurveRow { p1, closed, engine });
    }
    Ok(ReferenceCurves {
        rows,
        max_deviation,
    })
}

/// `0, step, 2 step, ...` up to and including 1.
pub fn uniform_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidConfig(format!(
            "grid step must be in (0, 0.5], got {step}"
        )));
    }
    let n = (1.0 / step).round();
    if ((n * step) - 1.0).abs() < 1e-9 {
        // exact fractions k/n avoid accumulating k * step error
        let n = n as usize;
        return Ok((0..=n).map(|k| k as f64 / n as f64).collect());
    }
    let mut grid: Vec<f64> = (0..)
        .map(|k| k as f64 * step)
        .take_while(|&p| p < 1.0 - 1e-12)
        .collect();
    grid.push(1.0);
    Ok(grid)
}
