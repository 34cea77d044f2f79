//! Command-line front end.
//!
//! Every subcommand writes its files into the output directory and prints a
//! one-line summary. Exit codes: 0 ok, 1 verdict failure or module error,
//! 2 usage or config error.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::curves::{growth_check, CurveIndex, GrowthVerdict, Parity, RSequence};
use crate::error::{Error, Result};
use crate::lengthmodel::{limit_set_probe, HypModel, ProbeCase, ProbeParams};
use crate::measures::{blend, limit_measure, singularity_rows, MeasureContext, MeasureVector};
use crate::numerics::ratio_to_f64;
use crate::timeline::{layout, little_o_diagnostics, ordering_verdict, OrderingParams};

pub use config::RunConfig;
use report::{
    fmt_float, fmt_rational, round_sig, write_csv, write_json, IntersectionReport, LimitsReport,
    LinkReport, LittleOSummary, MeasureReport, OrderingReport, ProbeSummary, ValidateReport,
};

#[derive(Debug, Parser)]
#[command(name = "lamlab", version, about = "Twist-cocycle laboratory on the five-punctured sphere")]
pub struct Cli {
    /// TOML run configuration (defaults are used when omitted)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Last index to evaluate (overrides the config)
    #[arg(long, global = true)]
    pub max_index: Option<usize>,
    /// Convergence tolerance for ratio limits (overrides the config)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the sequence constraints and the growth conditions
    Validate,
    /// Weight vectors of γ_2, …, γ_N
    Curves,
    /// One exact intersection number, or the table up to --max-index
    Intersections {
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Limit measures and mutual-singularity diagnostics
    Limits,
    /// Balance times, active intervals and ordering verdicts
    Timeline,
    /// Length-ratio probe towards the limit set
    Probe,
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&cli.command, &cfg) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(n) = cli.max_index {
        cfg.max_index = n;
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Config(format!("--tol must be positive (got {t})")));
        }
        cfg.tolerances.convergence = t;
    }
    Ok(cfg)
}

/// Run one subcommand; `Ok(false)` is a verdict failure.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<bool> {
    fs::create_dir_all(&cfg.out_dir)?;
    match cmd {
        Command::Validate => cmd_validate(cfg),
        Command::Curves => cmd_curves(cfg),
        Command::Intersections { j, k } => cmd_intersections(cfg, *j, *k),
        Command::Limits => cmd_limits(cfg),
        Command::Timeline => cmd_timeline(cfg),
        Command::Probe => cmd_probe(cfg),
    }
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<bool> {
    let path = cfg.out_dir.join("validate.json");
    let report = match cfg.sequence() {
        Ok(seq) => {
            let g = growth_check(&seq, &cfg.tolerances.growth);
            ValidateReport {
                valid: true,
                violations: Vec::new(),
                epsilon: fmt_rational(&cfg.epsilon),
                length: seq.len(),
                g1_holds: g.g1_holds(),
                g1_onset: g.g1_onset,
                g2_alpha_decays: g.g2_alpha_decays,
                g2_beta_decays: g.g2_beta_decays,
                g2_alpha_onset: g.g2_alpha_onset,
                g2_beta_onset: g.g2_beta_onset,
            }
        }
        Err(Error::InvalidSequence(v)) => ValidateReport {
            valid: false,
            violations: v.iter().map(ToString::to_string).collect(),
            epsilon: fmt_rational(&cfg.epsilon),
            length: cfg.r.len(),
            g1_holds: false,
            g1_onset: None,
            g2_alpha_decays: false,
            g2_beta_decays: false,
            g2_alpha_onset: None,
            g2_beta_onset: None,
        },
        Err(e) => return Err(e),
    };
    write_json(&path, &report)?;
    let ok = report.valid && report.g1_holds && report.g2_alpha_decays && report.g2_beta_decays;
    if report.valid {
        println!(
            "{}: G1 {} (onset {:?}), G2 alpha {} beta {}",
            if ok { "PASS" } else { "FAIL" },
            report.g1_holds,
            report.g1_onset,
            report.g2_alpha_decays,
            report.g2_beta_decays
        );
    } else {
        println!("FAIL: {}", report.violations.join("; "));
    }
    Ok(ok)
}

pub fn cmd_curves(cfg: &RunConfig) -> Result<bool> {
    let seq = cfg.sequence()?;
    let last = cfg.max_index.clamp(2, seq.max_curve());
    let table = seq.intersection_table(last)?;
    let weights = seq.all_curve_weights(true);
    let mut rows = Vec::new();
    for (off, w) in weights.iter().take(last - 1).enumerate() {
        let i = off + 2;
        let mut row = vec![i.to_string(), CurveIndex::gamma(i).label()];
        row.extend(w.as_vector().iter().map(ToString::to_string));
        row.push(match table.marking(i) {
            Ok(v) => v.to_string(),
            Err(_) => String::new(),
        });
        rows.push(row);
    }
    write_csv(
        &cfg.out_dir.join("curves.csv"),
        &["i", "label", "s1", "s2", "s3", "s4", "s5", "i_mu"],
        &rows,
    )?;
    println!("wrote {} curves", rows.len());
    Ok(true)
}

pub fn cmd_intersections(cfg: &RunConfig, j: Option<usize>, k: Option<usize>) -> Result<bool> {
    let seq = cfg.sequence()?;
    match (j, k) {
        (Some(j), Some(k)) => {
            let value = seq.intersection(j, k)?;
            let (normalizer, ratio) = if j % 2 == k % 2 && j.abs_diff(k) >= 2 {
                let (a, b) = (j.min(k), j.max(k));
                (
                    Some(seq.comparability_normalizer(a, b)?),
                    Some(seq.comparability(a, b)?),
                )
            } else {
                (None, None)
            };
            let report = IntersectionReport {
                j,
                k,
                value: value.to_string(),
                normalizer: normalizer.map(|n| n.to_string()),
                ratio_value: ratio.as_ref().map(|q| round_sig(ratio_to_f64(q))),
                ratio: ratio.as_ref().map(fmt_rational),
            };
            write_json(&cfg.out_dir.join("intersections.json"), &report)?;
            println!("i(gamma_{j}, gamma_{k}) = {value}");
        }
        (None, None) => {
            let last = cfg.max_index.clamp(1, seq.len() + 3);
            let table = seq.intersection_table(last)?;
            let mut rows = Vec::new();
            for k in 1..=last {
                for a in 0..k {
                    let v = match table.get(a, k) {
                        Ok(v) => v.to_string(),
                        Err(_) => String::new(),
                    };
                    rows.push(vec![a.to_string(), k.to_string(), v]);
                }
            }
            write_csv(&cfg.out_dir.join("intersections.csv"), &["j", "k", "value"], &rows)?;
            println!("wrote {} intersection numbers", rows.len());
        }
        _ => return Err(Error::Config("--j and --k must be given together".into())),
    }
    Ok(true)
}

struct Session {
    seq: RSequence,
    growth: GrowthVerdict,
    ctx: MeasureContext,
    alpha: MeasureVector,
    beta: MeasureVector,
    measure: MeasureVector,
}

impl Session {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let seq = cfg.sequence()?;
        let growth = growth_check(&seq, &cfg.tolerances.growth);
        let ctx = MeasureContext::new(seq.clone(), cfg.tolerances.convergence)?;
        let alpha = limit_measure(&ctx, Parity::Alpha, cfg.tolerances.measure)?;
        let beta = limit_measure(&ctx, Parity::Beta, cfg.tolerances.measure)?;
        let measure = blend(&alpha, &beta, cfg.c_alpha, cfg.c_beta)?;
        Ok(Session {
            seq,
            growth,
            ctx,
            alpha,
            beta,
            measure,
        })
    }
}

fn measure_report(m: &MeasureVector) -> MeasureReport {
    MeasureReport {
        weights: m.weights.0.map(round_sig),
        c_alpha: round_sig(m.c_alpha),
        c_beta: round_sig(m.c_beta),
        achieved_k: m.achieved_k,
        change: round_sig(m.tolerance),
        switch_defect: round_sig(m.switch_defect()),
    }
}

pub fn cmd_limits(cfg: &RunConfig) -> Result<bool> {
    let s = Session::new(cfg)?;
    let report = LimitsReport {
        nu_alpha: measure_report(&s.alpha),
        nu_beta: measure_report(&s.beta),
        blend: measure_report(&s.measure),
    };
    write_json(&cfg.out_dir.join("limits.json"), &report)?;
    let rows: Vec<Vec<String>> = singularity_rows(&s.ctx, 3..=cfg.max_index)?
        .iter()
        .map(|r| {
            let mut v = vec![r.i.to_string()];
            v.extend(
                [
                    r.alpha_own,
                    r.alpha_cross,
                    r.beta_own,
                    r.beta_cross,
                    r.alpha_ratio,
                    r.beta_ratio,
                ]
                .map(fmt_float),
            );
            v
        })
        .collect();
    write_csv(
        &cfg.out_dir.join("singularity.csv"),
        &[
            "i",
            "alpha_own",
            "alpha_cross",
            "beta_own",
            "beta_cross",
            "alpha_ratio",
            "beta_ratio",
        ],
        &rows,
    )?;
    println!(
        "nu_alpha at k={}, nu_beta at k={}",
        s.alpha.achieved_k, s.beta.achieved_k
    );
    Ok(true)
}

pub fn cmd_timeline(cfg: &RunConfig) -> Result<bool> {
    let s = Session::new(cfg)?;
    let last = cfg.max_index;
    if last < 4 {
        return Err(Error::Config("timeline needs --max-index ≥ 4".into()));
    }
    let lay = layout(&s.ctx, &s.measure, 2..=last + 1)?;
    let rows: Vec<Vec<String>> = lay
        .rows
        .iter()
        .map(|r| {
            let mut v = vec![r.i.to_string()];
            v.extend([r.a, r.b, r.a_lo, r.a_hi, r.b_lo, r.b_hi].map(fmt_float));
            v
        })
        .collect();
    write_csv(
        &cfg.out_dir.join("timeline.csv"),
        &["i", "a", "b", "a_lo", "a_hi", "b_lo", "b_hi"],
        &rows,
    )?;

    let params = OrderingParams {
        divergence_floor: cfg.tolerances.divergence_floor,
        offset_slack: cfg.tolerances.offset_slack,
    };
    let window = 3..=last;
    let verdict = ordering_verdict(&lay, window.clone(), &params)?;
    let gap_rows: Vec<Vec<String>> = verdict
        .links
        .iter()
        .flat_map(|l| {
            l.gaps
                .iter()
                .map(move |(i, g)| vec![l.link.to_string(), i.to_string(), fmt_float(*g)])
        })
        .collect();
    write_csv(&cfg.out_dir.join("gaps.csv"), &["link", "i", "gap"], &gap_rows)?;

    let (dev_a, dev_b) = lay.formula_deviation(window.clone())?;
    let lo = little_o_diagnostics(&s.seq, &lay, 2..=last, cfg.tolerances.little_o)?;
    let report = OrderingReport {
        c_alpha: round_sig(lay.c_alpha),
        c_beta: round_sig(lay.c_beta),
        window: [3, last],
        orderings_hold: verdict.orderings_hold(),
        divergence_holds: verdict.divergence_holds(),
        links: verdict
            .links
            .iter()
            .map(|l| LinkReport {
                link: l.link.to_string(),
                holds: l.holds,
                onset: l.onset,
                diverges: l.diverges,
                first_gap: round_sig(l.gaps.first().map_or(f64::NAN, |g| g.1)),
                last_gap: round_sig(l.gaps.last().map_or(f64::NAN, |g| g.1)),
            })
            .collect(),
        formula_deviation_alpha: round_sig(dev_a),
        formula_deviation_beta: round_sig(dev_b),
        little_o: LittleOSummary {
            threshold: lo.threshold,
            log_m_decays: lo.log_m_decays(),
            log_n_decays: lo.log_n_decays(),
            alpha_gap_decays: lo.alpha_gap_decays(),
            beta_gap_decays: lo.beta_gap_decays(),
        },
    };
    write_json(&cfg.out_dir.join("orderings.json"), &report)?;
    println!(
        "{}: orderings {} divergence {} (window 3..={last})",
        if report.orderings_hold { "PASS" } else { "FAIL" },
        report.orderings_hold,
        report.divergence_holds
    );
    Ok(report.orderings_hold)
}

pub fn cmd_probe(cfg: &RunConfig) -> Result<bool> {
    let s = Session::new(cfg)?;
    let last = cfg.max_index;
    if last < cfg.probe_first {
        return Err(Error::Config("--max-index is below the first probe index".into()));
    }
    let lay = layout(&s.ctx, &s.measure, 2..=last + 1)?;
    let model = HypModel {
        exponent: cfg.hyp_exponent,
        ..HypModel::default()
    };
    let params = ProbeParams {
        focus: cfg.focus,
        relative_tol: cfg.tolerances.probe,
        diagnostic_threshold: cfg.tolerances.diagnostic,
    };
    let [g, h] = cfg.test_curves;
    let trace = limit_set_probe(
        &s.ctx,
        &lay,
        &model,
        &s.growth,
        (CurveIndex::gamma(g), CurveIndex::gamma(h)),
        cfg.probe_first..=last,
        &params,
    )?;
    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| {
            let mut v = vec![r.i.to_string()];
            v.extend([r.t, r.ratio, r.target, r.diagnostic].map(fmt_float));
            v
        })
        .collect();
    write_csv(
        &cfg.out_dir.join("probe_trace.csv"),
        &["i", "t_i", "ratio", "target", "diagnostic"],
        &rows,
    )?;
    let summary = ProbeSummary {
        converged: trace.converged(),
        final_relative_error: round_sig(trace.final_relative_error()),
        final_diagnostic: round_sig(trace.rows.last().map_or(f64::NAN, |r| r.diagnostic)),
        diagnostic_decreasing: trace.diagnostic_decreasing(),
        case: match trace.case {
            ProbeCase::IntervalEnd => "interval-end",
            ProbeCase::UnitLength => "unit-length",
        }
        .into(),
        focus: match cfg.focus {
            Parity::Alpha => "alpha",
            Parity::Beta => "beta",
        }
        .into(),
        test_curves: cfg.test_curves,
        hyp_exponent: round_sig(cfg.hyp_exponent),
        first_index: cfg.probe_first,
        last_index: last,
    };
    write_json(&cfg.out_dir.join("probe_summary.json"), &summary)?;
    println!(
        "{}: final relative error {}, final diagnostic {}",
        if summary.converged { "PASS" } else { "FAIL" },
        fmt_float(summary.final_relative_error),
        fmt_float(summary.final_diagnostic)
    );
    Ok(summary.converged)
}
