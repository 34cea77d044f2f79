//! TOML run configuration.
//!
//! Exact rationals are written as `"p/q"` strings and reals as decimal
//! strings, so that a config file means the same thing on every platform.
//!
//! ```toml
//! epsilon = "1/5"
//!
//! [sequence]
//! kind = "k-family"   # or "explicit" with r = ["6", "36", ...]
//! k = 6
//! length = 48
//!
//! [weights]
//! c_alpha = "0.5"
//! c_beta = "0.5"
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::curves::{validate_sequence, Parity, RSequence};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_epsilon")]
    epsilon: String,
    #[serde(default)]
    sequence: RawSequence,
    #[serde(default)]
    weights: RawWeights,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    probe: RawProbe,
    #[serde(default)]
    output: RawOutput,
}

fn default_epsilon() -> String {
    "1/5".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawSequence {
    KFamily { k: u64, length: usize },
    Explicit { r: Vec<String> },
}

impl Default for RawSequence {
    fn default() -> Self {
        RawSequence::KFamily { k: 6, length: 48 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    c_alpha: String,
    c_beta: String,
}

impl Default for RawWeights {
    fn default() -> Self {
        RawWeights {
            c_alpha: "0.5".into(),
            c_beta: "0.5".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
struct RawTolerances {
    convergence: String,
    measure: String,
    divergence_floor: String,
    offset_slack: String,
    little_o: String,
    growth: String,
    probe: String,
    diagnostic: String,
}

impl Default for RawTolerances {
    fn default() -> Self {
        RawTolerances {
            convergence: "1e-5".into(),
            measure: "1e-10".into(),
            divergence_floor: "2".into(),
            offset_slack: "2".into(),
            little_o: "1e-3".into(),
            growth: "1/1000".into(),
            probe: "0.05".into(),
            diagnostic: "1e-2".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
struct RawProbe {
    test_curves: [usize; 2],
    focus: String,
    hyp_exponent: String,
    first_index: usize,
}

impl Default for RawProbe {
    fn default() -> Self {
        RawProbe {
            test_curves: [2, 4],
            focus: "alpha".into(),
            hyp_exponent: "2".into(),
            first_index: 4,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: String,
    max_index: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            dir: "out".into(),
            max_index: 14,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative change at which ratio-limit intersections count as stable.
    pub convergence: f64,
    /// Sup-norm change at which the limit weight vectors count as stable.
    pub measure: f64,
    pub divergence_floor: f64,
    pub offset_slack: f64,
    pub little_o: f64,
    /// Threshold for the exact growth-condition ratios.
    pub growth: BigRational,
    pub probe: f64,
    pub diagnostic: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub epsilon: BigRational,
    pub r: Vec<BigInt>,
    pub c_alpha: f64,
    pub c_beta: f64,
    pub tolerances: Tolerances,
    /// γ indices of the two probe curves.
    pub test_curves: [usize; 2],
    pub focus: Parity,
    pub hyp_exponent: f64,
    pub probe_first: usize,
    pub out_dir: PathBuf,
    /// Last family index `i` (last γ index for `curves`).
    pub max_index: usize,
}

fn bad(what: &str, value: &str) -> Error {
    Error::Config(format!("cannot parse {what} from {value:?}"))
}

/// `"p/q"`, `"p"` or a plain decimal such as `"0.2"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad("rational", s))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad("rational", s))?;
        if q == BigInt::from(0) {
            return Err(bad("rational", s));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let p = BigInt::from_str(&digits).map_err(|_| bad("rational", s))?;
        let q = BigInt::from(10).pow(frac.len() as u32);
        return Ok(BigRational::new(p, q));
    }
    let p = BigInt::from_str(s).map_err(|_| bad("rational", s))?;
    Ok(BigRational::from_integer(p))
}

fn parse_real(what: &str, s: &str) -> Result<f64> {
    match f64::from_str(s.trim()) {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(bad(what, s)),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let epsilon = parse_rational(&raw.epsilon)?;
        let r = match &raw.sequence {
            RawSequence::KFamily { k, length } => {
                if *k < 2 {
                    return Err(Error::Config("k-family needs k ≥ 2".into()));
                }
                (1..=*length)
                    .map(|i| BigInt::from(*k).pow(i as u32))
                    .collect()
            }
            RawSequence::Explicit { r } => r
                .iter()
                .map(|x| BigInt::from_str(x.trim()).map_err(|_| bad("integer", x)))
                .collect::<Result<_>>()?,
        };
        let c_alpha = parse_real("c_alpha", &raw.weights.c_alpha)?;
        let c_beta = parse_real("c_beta", &raw.weights.c_beta)?;
        if c_alpha < 0.0 || c_beta < 0.0 || c_alpha + c_beta <= 0.0 {
            return Err(Error::Config(
                "weights must be nonnegative with c_alpha + c_beta > 0".into(),
            ));
        }
        let t = &raw.tolerances;
        let tolerances = Tolerances {
            convergence: parse_real("convergence", &t.convergence)?,
            measure: parse_real("measure", &t.measure)?,
            divergence_floor: parse_real("divergence_floor", &t.divergence_floor)?,
            offset_slack: parse_real("offset_slack", &t.offset_slack)?,
            little_o: parse_real("little_o", &t.little_o)?,
            growth: parse_rational(&t.growth)?,
            probe: parse_real("probe", &t.probe)?,
            diagnostic: parse_real("diagnostic", &t.diagnostic)?,
        };
        let focus = match raw.probe.focus.as_str() {
            "alpha" => Parity::Alpha,
            "beta" => Parity::Beta,
            other => return Err(bad("probe focus", other)),
        };
        let [g, h] = raw.probe.test_curves;
        if g < 2 || h < 2 {
            return Err(Error::Config("probe test curves must be γ₂ or later".into()));
        }
        Ok(RunConfig {
            epsilon,
            r,
            c_alpha,
            c_beta,
            tolerances,
            test_curves: raw.probe.test_curves,
            focus,
            hyp_exponent: parse_real("hyp_exponent", &raw.probe.hyp_exponent)?,
            probe_first: raw.probe.first_index,
            out_dir: PathBuf::from(raw.output.dir),
            max_index: raw.output.max_index,
        })
    }

    pub fn sequence(&self) -> Result<RSequence> {
        validate_sequence(&self.epsilon, self.r.clone())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_raw(RawConfig {
            epsilon: default_epsilon(),
            sequence: RawSequence::default(),
            weights: RawWeights::default(),
            tolerances: RawTolerances::default(),
            probe: RawProbe::default(),
            output: RawOutput::default(),
        })
        .expect("defaults parse")
    }
}
