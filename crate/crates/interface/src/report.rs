//! Text reports for the `entropy` and `play` commands.

use std::fmt;

use spingame_core::entropy::{von_neumann_entropy, EntropyUnit};
use spingame_core::game::{best_unrestricted_strategy, expected_payoff, simulate_game, GameConfig};
use spingame_core::quantum::spin::bloch_angles;
use spingame_core::DensityOperator;

use crate::error::Result;
use crate::spec::{EnsembleSpec, StrategySpec};
use crate::sweep::format_value;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub ensemble: String,
    pub density: DensityOperator,
    pub entropy: f64,
    pub unit: EntropyUnit,
}

pub fn entropy_report(spec: &EnsembleSpec, unit: EntropyUnit) -> Result<EntropyReport> {
    let density = DensityOperator::from_ensemble(&spec.build()?)?;
    let entropy = von_neumann_entropy(&density, unit)?;
    Ok(EntropyReport {
        ensemble: spec.to_string(),
        density,
        entropy,
        unit,
    })
}

impl fmt::Display for EntropyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ensemble: {}", self.ensemble)?;
        let basis = if self.density.dim() == 2 {
            "|z+>, |z->".to_string()
        } else {
            format!("|0>..|{}>", self.density.dim() - 1)
        };
        writeln!(f, "density matrix (basis {basis}):")?;
        write!(f, "{:.9}", self.density.matrix())?;
        let ev: Vec<String> = self
            .density
            .eigenvalues()
            .iter()
            .map(|&x| format_value(x))
            .collect();
        writeln!(f, "eigenvalues: {}", ev.join(", "))?;
        writeln!(
            f,
            "S = {} {}",
            format_value(self.entropy),
            self.unit.symbol()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayReport {
    pub ensemble: String,
    pub strategy: String,
    pub rounds: u64,
    pub seed: u64,
    pub score: i64,
    pub empirical: f64,
    pub exact: f64,
    pub entropy: f64,
    pub unit: EntropyUnit,
    pub optimum: f64,
    /// Bloch angles of the optimal eigenvector, for qubits.
    pub optimum_direction: Option<(f64, f64)>,
}

pub fn play_report(
    spec: &EnsembleSpec,
    strategy: &StrategySpec,
    rounds: u64,
    seed: u64,
    unit: EntropyUnit,
) -> Result<PlayReport> {
    let ensemble = spec.build()?;
    let strat = strategy.build(ensemble.dim())?;
    let rho = DensityOperator::from_ensemble(&ensemble)?;
    let cfg = GameConfig::new(ensemble, rounds, seed)?;
    let result = simulate_game(&cfg, &strat)?;
    let optimum = best_unrestricted_strategy(&rho)?;
    let optimum_direction = if rho.dim() == 2 {
        Some(bloch_angles(optimum.strategy.chosen_ket())?)
    } else {
        None
    };
    Ok(PlayReport {
        ensemble: spec.to_string(),
        strategy: strategy.describe(),
        rounds,
        seed,
        score: result.score,
        empirical: result.normalized(),
        exact: expected_payoff(&rho, &strat)?,
        entropy: von_neumann_entropy(&rho, unit)?,
        unit,
        optimum: optimum.payoff,
        optimum_direction,
    })
}

impl fmt::Display for PlayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ensemble: {}", self.ensemble)?;
        writeln!(f, "strategy: {}", self.strategy)?;
        writeln!(f, "rounds: {}  seed: {}", self.rounds, self.seed)?;
        writeln!(f, "N_p = {}", self.score)?;
        writeln!(f, "P_emp = {}", format_value(self.empirical))?;
        writeln!(f, "P_exact = {}", format_value(self.exact))?;
        writeln!(
            f,
            "S = {} {}",
            format_value(self.entropy),
            self.unit.symbol()
        )?;
        write!(
            f,
            "unrestricted optimum: P* = {}",
            format_value(self.optimum)
        )?;
        if let Some((theta, phi)) = self.optimum_direction {
            write!(
                f,
                " (theta = {}, phi = {} rad)",
                format_value(theta),
                format_value(phi)
            )?;
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{Axis, ObservableSpec, Preset};

    fn strat(axis: Axis, pick: usize) -> StrategySpec {
        StrategySpec {
            observable: ObservableSpec::Axis(axis),
            pick,
        }
    }

    #[test]
    fn entropy_of_presets() {
        let r =
            entropy_report(&EnsembleSpec::preset(Preset::Rho1, None), EntropyUnit::Bits).unwrap();
        assert_eq!(r.entropy, 0.0);
        let r = entropy_report(
            &EnsembleSpec::preset(Preset::Rho3, Some(0.5)),
            EntropyUnit::Bits,
        )
        .unwrap();
        assert!((r.entropy - 1.0).abs() < 1e-12);
        let r = entropy_report(
            &EnsembleSpec::preset(Preset::Rho2, Some(0.5)),
            EntropyUnit::Bits,
        )
        .unwrap();
        assert!((r.entropy - 0.600876).abs() < 1e-6);
        let text = r.to_string();
        assert!(text.contains("[0.750000000, 0.250000000]"), "{text}");
        assert!(text.contains("S = 0.600876037 bits"), "{text}");
    }

    #[test]
    fn play_examples() {
        let r = play_report(
            &EnsembleSpec::preset(Preset::Rho1, None),
            &strat(Axis::Z, 0),
            1000,
            0,
            EntropyUnit::Bits,
        )
        .unwrap();
        assert_eq!(r.score, 1000);
        assert_eq!(r.optimum, 1.0);

        let r = play_report(
            &EnsembleSpec::preset(Preset::Rho3, Some(0.5)),
            &strat(Axis::Z, 0),
            100_000,
            12345,
            EntropyUnit::Bits,
        )
        .unwrap();
        assert!(r.empirical.abs() <= 0.0158, "P_emp = {}", r.empirical);

        let r = play_report(
            &EnsembleSpec::preset(Preset::Rho2, Some(0.75)),
            &strat(Axis::X, 0),
            10,
            1,
            EntropyUnit::Bits,
        )
        .unwrap();
        assert!((r.exact - 0.25).abs() < 1e-12);
        assert!(r.to_string().contains("P_exact = 0.25"));
    }
}
