//! Report schemas and writers. Floats are printed with 12 significant
//! digits, big integers and rationals as strings.

use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `%.12g`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to 12 significant digits, for JSON numbers.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_float(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

pub fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidateReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub epsilon: String,
    pub length: usize,
    pub g1_holds: bool,
    pub g1_onset: Option<usize>,
    pub g2_alpha_decays: bool,
    pub g2_beta_decays: bool,
    pub g2_alpha_onset: Option<usize>,
    pub g2_beta_onset: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntersectionReport {
    pub j: usize,
    pub k: usize,
    pub value: String,
    /// Normalizer and normalized ratio, for indices of equal parity.
    pub normalizer: Option<String>,
    pub ratio: Option<String>,
    pub ratio_value: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasureReport {
    pub weights: [f64; 5],
    pub c_alpha: f64,
    pub c_beta: f64,
    pub achieved_k: usize,
    pub change: f64,
    pub switch_defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LimitsReport {
    pub nu_alpha: MeasureReport,
    pub nu_beta: MeasureReport,
    pub blend: MeasureReport,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LinkReport {
    pub link: String,
    pub holds: bool,
    pub onset: Option<usize>,
    pub diverges: Option<bool>,
    pub first_gap: f64,
    pub last_gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LittleOSummary {
    pub threshold: f64,
    pub log_m_decays: bool,
    pub log_n_decays: bool,
    pub alpha_gap_decays: Option<bool>,
    pub beta_gap_decays: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrderingReport {
    pub c_alpha: f64,
    pub c_beta: f64,
    pub window: [usize; 2],
    pub orderings_hold: bool,
    pub divergence_holds: bool,
    pub links: Vec<LinkReport>,
    pub formula_deviation_alpha: f64,
    pub formula_deviation_beta: f64,
    pub little_o: LittleOSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProbeSummary {
    pub converged: bool,
    pub final_relative_error: f64,
    pub final_diagnostic: f64,
    pub diagnostic_decreasing: bool,
    pub case: String,
    pub focus: String,
    pub test_curves: [usize; 2],
    pub hyp_exponent: f64,
    pub first_index: usize,
    pub last_index: usize,
}
