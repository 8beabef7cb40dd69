//! Entropy and best-payoff curves of `rho1`, `rho2`, `rho3` over `p1`, as CSV.
//!
//! Columns: `p1,S1,P1,S2,P2,S3,P3`. Entropies in bits, payoffs are the best
//! normalized score over the `Sz`/`Sx` menu. Values carry 9 decimal places
//! with trailing zeros dropped.

use std::io::{Read, Write};

use spingame_core::game::{
    closed_form, reference_curves, uniform_grid, PresetEnsemble, ReferenceCurves,
};

use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = ["p1", "S1", "P1", "S2", "P2", "S3", "P3"];
pub const DECIMALS: usize = 9;
/// Re-read values must match the closed forms this closely.
pub const READBACK_TOL: f64 = 1e-8;

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p1: f64,
    pub entropy: [f64; 3],
    pub payoff: [f64; 3],
}

/// Fixed 9-decimal rendering without trailing zeros; `-0` prints as `0`.
pub fn format_value(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Builds and cross-checks the curves on a uniform grid of `step`.
pub fn compute(step: f64) -> Result<ReferenceCurves> {
    let grid = uniform_grid(step)?;
    Ok(reference_curves(&grid)?)
}

pub fn write_csv<W: Write>(curves: &ReferenceCurves, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in &curves.rows {
        let c = &row.closed;
        let values = [
            row.p1,
            c.entropy[0],
            c.payoff[0],
            c.entropy[1],
            c.payoff[1],
            c.entropy[2],
            c.payoff[2],
        ];
        w.write_record(values.iter().map(|&v| format_value(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Verification(format!(
            "unexpected header {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let v: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Verification(format!("bad number in {record:?}: {e}")))?;
        if v.len() != HEADER.len() {
            return Err(Error::Verification(format!(
                "row {record:?} has {} fields",
                v.len()
            )));
        }
        rows.push(SweepRow {
            p1: v[0],
            entropy: [v[1], v[3], v[5]],
            payoff: [v[2], v[4], v[6]],
        });
    }
    Ok(rows)
}

/// Largest deviation of parsed rows from the closed forms.
pub fn verify_rows(rows: &[SweepRow]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for row in rows {
        let ensembles = [
            PresetEnsemble::Rho1,
            PresetEnsemble::Rho2 { p1: row.p1 },
            PresetEnsemble::Rho3 { p1: row.p1 },
        ];
        for (k, e) in ensembles.into_iter().enumerate() {
            worst = worst
                .max((row.entropy[k] - closed_form::entropy(e)).abs())
                .max((row.payoff[k] - closed_form::restricted_payoff(e)).abs());
        }
    }
    if worst > READBACK_TOL {
        return Err(Error::Verification(format!(
            "re-read values deviate from closed forms by {worst:e}"
        )));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(0.5), "0.5");
        assert_eq!(format_value(1.0), "1");
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(-1e-17), "0");
        assert_eq!(format_value(0.600876037), "0.600876037");
        assert_eq!(format_value(0.1 + 0.2), "0.3");
    }

    #[test]
    fn half_row_matches_expected_text() {
        let curves = reference_curves(&[0.5, 0.75, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&curves, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p1,S1,P1,S2,P2,S3,P3");
        assert_eq!(lines[1], "0.5,0,1,0.600876037,0.5,1,0");
        assert!(lines[2].starts_with("0.75,0,1,"));
        let f: Vec<&str> = lines[2].split(',').collect();
        assert_eq!((f[4], f[6]), ("0.75", "0.5"));
        assert_eq!(lines[3], "1,0,1,0,1,0,1");
    }

    #[test]
    fn csv_round_trip_verifies() {
        let curves = compute(0.05).unwrap();
        let mut buf = Vec::new();
        write_csv(&curves, &mut buf).unwrap();
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 21);
        assert!(verify_rows(&rows).unwrap() <= READBACK_TOL);
    }

    #[test]
    fn verification_catches_corruption() {
        let bad = "p1,S1,P1,S2,P2,S3,P3\n0.5,0,1,0.7,0.5,1,0\n";
        assert!(verify_rows(&read_csv(bad.as_bytes()).unwrap()).is_err());
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn step_is_validated() {
        assert!(compute(0.0).is_err());
        assert!(compute(0.75).is_err());
    }
}
