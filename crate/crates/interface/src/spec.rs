//! User-facing descriptions of ensembles and strategies.
//!
//! The same types back the CLI flags, the ensemble text file and the JSON
//! bodies of the session API.
//!
//! Ensemble file format:
//!
//! ```text
//! # comments start with '#'
//! 2                       <- dimension n
//! 0.5 1 0 0 0             <- weight, then n (re, im) amplitude pairs
//! 0.5 0.7071 0 0.7071 0
//! ```
//!
//! Amplitudes are rescaled to unit norm on load; weights must sum to 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spingame_core::game::{PresetEnsemble, Strategy};
use spingame_core::linalg::{Complex, ComplexMatrix, ComplexVector};
use spingame_core::quantum::spin::SpinHalf;
use spingame_core::{Ensemble, Ket, Observable};

use crate::error::SpecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Rho1,
    Rho2,
    Rho3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rho1 => "rho1",
            Self::Rho2 => "rho2",
            Self::Rho3 => "rho3",
        }
    }
}

/// Parses `rho1`, `rho2`, `rho3`, optionally with an inline `p1` as in
/// `rho2(0.75)`.
impl FromStr for PresetArg {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let s = s.trim();
        let (name, p1) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| {
                    SpecError::new("preset", format!("unbalanced parenthesis in {s:?}"))
                })?;
                let p1 = inner
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| SpecError::new("preset", format!("bad p1 {inner:?}")))?;
                (name.trim(), Some(p1))
            }
            None => (s, None),
        };
        let preset = match name.to_ascii_lowercase().as_str() {
            "rho1" => Preset::Rho1,
            "rho2" => Preset::Rho2,
            "rho3" => Preset::Rho3,
            other => {
                return Err(SpecError::new(
                    "preset",
                    format!("unknown preset {other:?} (expected rho1, rho2 or rho3)"),
                ))
            }
        };
        Ok(PresetArg { preset, p1 })
    }
}

/// A preset name with an optional inline `p1`, as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetArg {
    pub preset: Preset,
    pub p1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub weight: f64,
    /// `(re, im)` pairs, one per basis state.
    pub amplitudes: Vec<[f64; 2]>,
}

/// Either a named preset or an explicit list of weighted states.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberSpec>,
}

impl EnsembleSpec {
    pub fn preset(preset: Preset, p1: Option<f64>) -> Self {
        Self {
            preset: Some(preset),
            p1,
            ..Self::default()
        }
    }

    /// The preset as a core [`PresetEnsemble`], if this spec names one.
    pub fn preset_ensemble(&self) -> Result<Option<PresetEnsemble>, SpecError> {
        let Some(preset) = self.preset else {
            return Ok(None);
        };
        if !self.members.is_empty() {
            return Err(SpecError::new(
                "members",
                "not allowed together with a preset",
            ));
        }
        if let Some(d) = self.dimension {
            if d != 2 {
                return Err(SpecError::new("dimension", "presets are two-dimensional"));
            }
        }
        let need_p1 = || -> Result<f64, SpecError> {
            let p1 = self
                .p1
                .ok_or_else(|| SpecError::new("p1", format!("{} needs p1", preset.name())))?;
            if !(0.0..=1.0).contains(&p1) {
                return Err(SpecError::new("p1", format!("must be in [0, 1], got {p1}")));
            }
            Ok(p1)
        };
        Ok(Some(match preset {
            Preset::Rho1 => {
                if self.p1.is_some() {
                    return Err(SpecError::new("p1", "rho1 takes no p1"));
                }
                PresetEnsemble::Rho1
            }
            Preset::Rho2 => PresetEnsemble::Rho2 { p1: need_p1()? },
            Preset::Rho3 => PresetEnsemble::Rho3 { p1: need_p1()? },
        }))
    }

    /// Validates and builds the ensemble.
    pub fn build(&self) -> Result<Ensemble, SpecError> {
        if let Some(preset) = self.preset_ensemble()? {
            return preset
                .ensemble()
                .map_err(|e| SpecError::new("p1", e.to_string()));
        }
        if self.p1.is_some() {
            return Err(SpecError::new("p1", "only valid with a preset"));
        }
        let dim = self
            .dimension
            .ok_or_else(|| SpecError::new("dimension", "required without a preset"))?;
        if dim == 0 {
            return Err(SpecError::new("dimension", "must be at least 1"));
        }
        if self.members.is_empty() {
            return Err(SpecError::new("members", "at least one member is required"));
        }
        let mut members = Vec::with_capacity(self.members.len());
        for (i, m) in self.members.iter().enumerate() {
            let at = |f: &str| format!("members[{i}].{f}");
            if !(m.weight.is_finite() && (0.0..=1.0).contains(&m.weight)) {
                return Err(SpecError::new(
                    at("weight"),
                    format!("must be in [0, 1], got {}", m.weight),
                ));
            }
            if m.amplitudes.len() != dim {
                return Err(SpecError::new(
                    at("amplitudes"),
                    format!("expected {dim} amplitudes, got {}", m.amplitudes.len()),
                ));
            }
            let ket = ComplexVector::new(
                m.amplitudes
                    .iter()
                    .map(|[re, im]| Complex::new(*re, *im))
                    .collect(),
            )
            .and_then(Ket::normalized)
            .map_err(|e| SpecError::new(at("amplitudes"), e.to_string()))?;
            members.push((m.weight, ket));
        }
        Ensemble::new(members).map_err(|e| SpecError::new("members", e.to_string()))
    }

    /// Parses the ensemble text file format.
    pub fn parse_file(text: &str) -> Result<Self, SpecError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (n_line, header) = lines
            .next()
            .ok_or_else(|| SpecError::new("line 1", "empty ensemble file"))?;
        let dim: usize = header.parse().map_err(|_| {
            SpecError::new(
                format!("line {n_line}"),
                format!("expected dimension, got {header:?}"),
            )
        })?;

        let mut members = Vec::new();
        for (line_no, line) in lines {
            let field = format!("line {line_no}");
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| SpecError::new(&field, format!("not a number: {tok:?}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if nums.len() != 1 + 2 * dim {
                return Err(SpecError::new(
                    &field,
                    format!(
                        "expected weight and {} numbers, got {} values",
                        2 * dim,
                        nums.len()
                    ),
                ));
            }
            members.push(MemberSpec {
                weight: nums[0],
                amplitudes: nums[1..].chunks(2).map(|c| [c[0], c[1]]).collect(),
            });
        }
        Ok(Self {
            dimension: Some(dim),
            members,
            ..Self::default()
        })
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.preset, self.p1) {
            (Some(p), Some(p1)) => write!(f, "{}(p1={p1})", p.name()),
            (Some(p), None) => write!(f, "{}", p.name()),
            _ => write!(
                f,
                "explicit ensemble, dimension {}, {} members",
                self.dimension.unwrap_or(0),
                self.members.len()
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Z,
    X,
}

/// Which observable the player measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    /// `"z"` or `"x"`.
    Axis(Axis),
    /// Spin along the Bloch direction `(theta, phi)`, radians.
    Direction { theta: f64, phi: f64 },
    /// Any Hermitian, non-degenerate matrix of `(re, im)` pairs.
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

impl ObservableSpec {
    pub fn build(&self, dim: usize) -> Result<Observable, SpecError> {
        let spin = SpinHalf::default();
        let need_qubit = || {
            if dim == 2 {
                Ok(())
            } else {
                Err(SpecError::new(
                    "observable",
                    format!("spin observables need dimension 2, ensemble has {dim}"),
                ))
            }
        };
        match self {
            Self::Axis(Axis::Z) => need_qubit().map(|_| spin.sz()),
            Self::Axis(Axis::X) => need_qubit().map(|_| spin.sx()),
            Self::Direction { theta, phi } => {
                need_qubit()?;
                spin.direction(*theta, *phi)
                    .map_err(|e| SpecError::new("observable", e.to_string()))
            }
            Self::Matrix { matrix } => {
                if matrix.len() != dim {
                    return Err(SpecError::new(
                        "observable.matrix",
                        format!("expected {dim} rows, got {}", matrix.len()),
                    ));
                }
                let rows = matrix
                    .iter()
                    .map(|r| r.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
                    .collect();
                ComplexMatrix::from_rows(rows)
                    .and_then(Observable::new)
                    .map_err(|e| SpecError::new("observable.matrix", e.to_string()))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Axis(Axis::Z) => "Sz".to_string(),
            Self::Axis(Axis::X) => "Sx".to_string(),
            Self::Direction { theta, phi } => format!("S(theta={theta}, phi={phi})"),
            Self::Matrix { matrix } => format!("{0}x{0} matrix", matrix.len()),
        }
    }
}

/// Parses `z`, `x`, or `theta,phi` (radians).
impl FromStr for ObservableSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(Self::Axis(Axis::Z)),
            "x" => Ok(Self::Axis(Axis::X)),
            other => {
                let (t, p) = other.split_once(',').ok_or_else(|| {
                    SpecError::new("obs", format!("expected z, x or theta,phi; got {s:?}"))
                })?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| SpecError::new("obs", format!("bad angle {v:?}")))
                };
                Ok(Self::Direction {
                    theta: parse(t)?,
                    phi: parse(p)?,
                })
            }
        }
    }
}

/// An observable plus the index of the eigenvector bet on (0 = largest
/// eigenvalue, so 0 is `z+`/`x+` for the spin observables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    pub observable: ObservableSpec,
    pub pick: usize,
}

impl StrategySpec {
    pub fn build(&self, dim: usize) -> Result<Strategy, SpecError> {
        let obs = self.observable.build(dim)?;
        Strategy::new(obs, self.pick).map_err(|e| SpecError::new("pick", e.to_string()))
    }

    pub fn describe(&self) -> String {
        let label = match (&self.observable, self.pick) {
            (ObservableSpec::Axis(Axis::Z), 0) => " (z+)",
            (ObservableSpec::Axis(Axis::Z), 1) => " (z-)",
            (ObservableSpec::Axis(Axis::X), 0) => " (x+)",
            (ObservableSpec::Axis(Axis::X), 1) => " (x-)",
            _ => "",
        };
        format!("{}, pick {}{label}", self.observable.describe(), self.pick)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_args() {
        let p: PresetArg = "rho2(0.75)".parse().unwrap();
        assert_eq!(
            p,
            PresetArg {
                preset: Preset::Rho2,
                p1: Some(0.75)
            }
        );
        let p: PresetArg = "RHO1".parse().unwrap();
        assert_eq!(p.preset, Preset::Rho1);
        assert!("rho4".parse::<PresetArg>().is_err());
        assert!("rho2(0.5".parse::<PresetArg>().is_err());
    }

    #[test]
    fn presets_expand_exactly() {
        let e = EnsembleSpec::preset(Preset::Rho2, Some(0.25))
            .build()
            .unwrap();
        assert_eq!(e, PresetEnsemble::Rho2 { p1: 0.25 }.ensemble().unwrap());
        let e = EnsembleSpec::preset(Preset::Rho1, None).build().unwrap();
        assert_eq!(e, PresetEnsemble::Rho1.ensemble().unwrap());
    }

    #[test]
    fn preset_errors_name_the_field() {
        let err = EnsembleSpec::preset(Preset::Rho3, None)
            .build()
            .unwrap_err();
        assert_eq!(err.field, "p1");
        let err = EnsembleSpec::preset(Preset::Rho3, Some(1.5))
            .build()
            .unwrap_err();
        assert_eq!(err.field, "p1");
        let err = EnsembleSpec::preset(Preset::Rho1, Some(0.5))
            .build()
            .unwrap_err();
        assert_eq!(err.field, "p1");
    }

    #[test]
    fn ensemble_file_round_trip() {
        let text = "# rho2 at p1 = 1/2\n2\n0.5 1 0 0 0  # z+\n\n0.5 0.70710678 0 0.70710678 0\n";
        let spec = EnsembleSpec::parse_file(text).unwrap();
        assert_eq!(spec.dimension, Some(2));
        assert_eq!(spec.members.len(), 2);
        let e = spec.build().unwrap();
        let expected = PresetEnsemble::Rho2 { p1: 0.5 }.ensemble().unwrap();
        for ((w, k), (w2, k2)) in e.members().iter().zip(expected.members()) {
            assert_eq!(w, w2);
            assert!(k.amplitudes().max_abs_diff(k2.amplitudes()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn ensemble_file_errors() {
        assert_eq!(
            EnsembleSpec::parse_file("# nothing\n").unwrap_err().field,
            "line 1"
        );
        assert_eq!(
            EnsembleSpec::parse_file("two\n").unwrap_err().field,
            "line 1"
        );
        assert_eq!(
            EnsembleSpec::parse_file("2\n1 1 0\n").unwrap_err().field,
            "line 2"
        );
        assert_eq!(
            EnsembleSpec::parse_file("2\n1 1 0 a 0\n")
                .unwrap_err()
                .field,
            "line 2"
        );
        let spec = EnsembleSpec::parse_file("2\n0.5 1 0 0 0\n0.6 0 0 1 0\n").unwrap();
        assert_eq!(spec.build().unwrap_err().field, "members");
        let spec = EnsembleSpec::parse_file("2\n1 0 0 0 0\n").unwrap();
        assert_eq!(spec.build().unwrap_err().field, "members[0].amplitudes");
    }

    #[test]
    fn observable_specs() {
        assert_eq!(
            "z".parse::<ObservableSpec>().unwrap(),
            ObservableSpec::Axis(Axis::Z)
        );
        assert_eq!(
            "1.5707963267948966,0".parse::<ObservableSpec>().unwrap(),
            ObservableSpec::Direction {
                theta: std::f64::consts::FRAC_PI_2,
                phi: 0.0
            }
        );
        assert!("y".parse::<ObservableSpec>().is_err());

        let sx = SpinHalf::default().sx();
        let dir = ObservableSpec::Direction {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
        .build(2)
        .unwrap();
        assert!(dir.matrix().max_abs_diff(sx.matrix()).unwrap() < 1e-12);
        assert!(ObservableSpec::Axis(Axis::Z).build(3).is_err());

        let m = ObservableSpec::Matrix {
            matrix: vec![
                vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [2.0, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]],
            ],
        };
        assert_eq!(m.build(3).unwrap().eigenvalue(0).unwrap(), 3.0);
    }

    #[test]
    fn json_shapes() {
        let s: StrategySpec = serde_json::from_str(r#"{"observable":"x","pick":1}"#).unwrap();
        assert_eq!(s.observable, ObservableSpec::Axis(Axis::X));
        let s: StrategySpec =
            serde_json::from_str(r#"{"observable":{"theta":0.5,"phi":1},"pick":0}"#).unwrap();
        assert_eq!(
            s.observable,
            ObservableSpec::Direction {
                theta: 0.5,
                phi: 1.0
            }
        );
        assert_eq!(s.describe(), "S(theta=0.5, phi=1), pick 0");
        let e: EnsembleSpec = serde_json::from_str(r#"{"preset":"rho2","p1":0.5}"#).unwrap();
        assert_eq!(e.to_string(), "rho2(p1=0.5)");
        assert!(serde_json::from_str::<EnsembleSpec>(r#"{"preset":"rho2","q":1}"#).is_err());
        assert!(StrategySpec {
            observable: ObservableSpec::Axis(Axis::Z),
            pick: 2
        }
        .build(2)
        .is_err());
    }
}
