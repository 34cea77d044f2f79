//! Model hyperbolic lengths of test curves along the geodesic, and the
//! probe that tracks their ratios towards the limit set.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::curves::{CurveIndex, GrowthVerdict, Parity};
use crate::error::{Error, Result};
use crate::measures::MeasureContext;
use crate::numerics::{ln_bigint, log_sum_nonnegative, LogReal};
use crate::timeline::{TimelineLayout, TimelineRow};

/// `Hyp_t = min(1, cosh^κ(t − balance) / twist)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypModel {
    /// Growth exponent κ of the cosh law.
    pub exponent: f64,
    /// Coefficient of `i(α,γ) + i(β,γ)` in the total length.
    pub slack: f64,
}

impl Default for HypModel {
    fn default() -> Self {
        HypModel {
            exponent: 2.0,
            slack: 1.0,
        }
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl HypModel {
    pub fn ln_hyp(&self, t: f64, balance: f64, ln_twist: f64) -> f64 {
        (self.exponent * ln_cosh(t - balance) - ln_twist).min(0.0)
    }

    pub fn hyp(&self, t: f64, balance: f64, ln_twist: f64) -> f64 {
        self.ln_hyp(t, balance, ln_twist).exp()
    }

    /// First `t ≥ balance` with `Hyp_t = 1`.
    pub fn unit_time(&self, balance: f64, ln_twist: f64) -> f64 {
        balance + (ln_twist / self.exponent).exp().acosh()
    }
}

/// `2 log(1/Hyp)` below 1, else 0.
pub fn width(hyp: f64) -> f64 {
    if hyp < 1.0 {
        -2.0 * hyp.ln()
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwistRegime {
    PreBalance,
    PostBalance(BigInt),
}

impl TwistRegime {
    pub fn value(&self) -> f64 {
        match self {
            TwistRegime::PreBalance => 0.0,
            TwistRegime::PostBalance(n) => LogReal::<f64>::from_bigint(n).value(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortCurveState {
    pub curve: CurveIndex,
    pub t: f64,
    pub hyp: f64,
    pub width: f64,
    pub twist: TwistRegime,
}

impl ShortCurveState {
    /// State of α_i (or β_i) at time `t` from its row of the layout.
    pub fn at(
        model: &HypModel,
        ctx: &MeasureContext,
        row: &TimelineRow,
        parity: Parity,
        t: f64,
    ) -> Result<Self> {
        let seq = ctx.seq();
        let (curve, balance, twist) = match parity {
            Parity::Alpha => (CurveIndex::alpha(row.i), row.a, seq.n(row.i)?.clone()),
            Parity::Beta => (CurveIndex::beta(row.i), row.b, seq.m(row.i)?),
        };
        let hyp = model.hyp(t, balance, ln_bigint(&twist));
        Ok(ShortCurveState {
            curve,
            t,
            hyp,
            width: width(hyp),
            twist: if t >= balance {
                TwistRegime::PostBalance(twist)
            } else {
                TwistRegime::PreBalance
            },
        })
    }
}

/// `i · (width + twist · Hyp)`.
pub fn contribution_value(i_count: &BigInt, width: f64, twist: f64, hyp: f64) -> LogReal<f64> {
    LogReal::from_bigint(i_count) * LogReal::from_value(width + twist * hyp)
}

pub fn contribution(state: &ShortCurveState, i_count: &BigInt) -> LogReal<f64> {
    contribution_value(i_count, state.width, state.twist.value(), state.hyp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveLength {
    pub curve: CurveIndex,
    pub i_alpha: BigInt,
    pub i_beta: BigInt,
    pub contribution_alpha: LogReal<f64>,
    pub contribution_beta: LogReal<f64>,
    /// `slack · (i(α,γ) + i(β,γ))`
    pub slack: f64,
    pub total: LogReal<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LengthReport {
    pub t: f64,
    pub alpha: ShortCurveState,
    pub beta: ShortCurveState,
    pub curves: Vec<CurveLength>,
}

fn intersection_or_zero(ctx: &MeasureContext, a: CurveIndex, b: CurveIndex) -> Result<BigInt> {
    if a == b {
        return Ok(BigInt::zero());
    }
    ctx.intersection(a.gamma_index(), b.gamma_index()).cloned()
}

/// The row of the given family whose curve is shortest at `t`, ties broken
/// by distance to the balance time.
pub fn select_active<'a>(
    model: &HypModel,
    ctx: &MeasureContext,
    layout: &'a TimelineLayout,
    parity: Parity,
    t: f64,
) -> Result<&'a TimelineRow> {
    let seq = ctx.seq();
    let mut best: Option<((f64, f64), &TimelineRow)> = None;
    for row in &layout.rows {
        let (balance, ln_twist) = match parity {
            Parity::Alpha => (row.a, ln_bigint(seq.n(row.i)?)),
            Parity::Beta => (row.b, ln_bigint(&seq.m(row.i)?)),
        };
        let key = (model.ln_hyp(t, balance, ln_twist), (t - balance).abs());
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, row));
        }
    }
    best.map(|b| b.1).ok_or(Error::TimelineExhausted(t))
}

fn check_covered(layout: &TimelineLayout, t: f64) -> Result<()> {
    let last = layout.rows.last().ok_or(Error::TimelineExhausted(t))?;
    if t > last.a_lo.min(last.b_lo) {
        return Err(Error::TimelineExhausted(t));
    }
    Ok(())
}

fn measure_lengths(
    model: &HypModel,
    ctx: &MeasureContext,
    alpha: &ShortCurveState,
    beta: &ShortCurveState,
    curve: CurveIndex,
) -> Result<CurveLength> {
    let i_alpha = intersection_or_zero(ctx, curve, alpha.curve)?;
    let i_beta = intersection_or_zero(ctx, curve, beta.curve)?;
    let contribution_alpha = contribution(alpha, &i_alpha);
    let contribution_beta = contribution(beta, &i_beta);
    let slack = LogReal::from_bigint(&(&i_alpha + &i_beta)).scale(model.slack);
    let total = log_sum_nonnegative(&[contribution_alpha, contribution_beta, slack]);
    Ok(CurveLength {
        curve,
        i_alpha,
        i_beta,
        contribution_alpha,
        contribution_beta,
        slack: slack.value(),
        total,
    })
}

/// Lengths of the test curves at time `t`, using the shortest α and β
/// curves of the layout.
pub fn length_report(
    ctx: &MeasureContext,
    layout: &TimelineLayout,
    model: &HypModel,
    t: f64,
    test_curves: &[CurveIndex],
) -> Result<LengthReport> {
    check_covered(layout, t)?;
    let ra = select_active(model, ctx, layout, Parity::Alpha, t)?;
    let rb = select_active(model, ctx, layout, Parity::Beta, t)?;
    let alpha = ShortCurveState::at(model, ctx, ra, Parity::Alpha, t)?;
    let beta = ShortCurveState::at(model, ctx, rb, Parity::Beta, t)?;
    report_for(model, ctx, alpha, beta, t, test_curves)
}

fn report_for(
    model: &HypModel,
    ctx: &MeasureContext,
    alpha: ShortCurveState,
    beta: ShortCurveState,
    t: f64,
    test_curves: &[CurveIndex],
) -> Result<LengthReport> {
    let curves = test_curves
        .iter()
        .map(|&c| measure_lengths(model, ctx, &alpha, &beta, c))
        .collect::<Result<_>>()?;
    Ok(LengthReport {
        t,
        alpha,
        beta,
        curves,
    })
}

/// Evaluation times of the probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeCase {
    /// Right endpoint of the focus interval (focus weight positive).
    IntervalEnd,
    /// First time after the balance time where the focus curve has length 1,
    /// clipped to the gap before the next focus interval (focus weight zero).
    UnitLength,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeParams {
    /// Family whose ergodic measure is the target.
    pub focus: Parity,
    /// Relative error the final ratio must reach.
    pub relative_tol: f64,
    /// Bound the final diagnostic must fall below.
    pub diagnostic_threshold: f64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            focus: Parity::Alpha,
            relative_tol: 0.05,
            diagnostic_threshold: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub i: usize,
    pub t: f64,
    /// length(γ) / length(γ′)
    pub ratio: f64,
    /// i(γ, ν̄) / i(γ′, ν̄) for the focus measure
    pub target: f64,
    /// contribution of the other family / contribution of the focus curve, for γ
    pub diagnostic: f64,
    /// focus contribution / (i(γ, ν̄) ∏_{j≤i} 2n_j), or with m_j for β
    pub scaled_contribution: f64,
}

impl ProbeRow {
    pub fn relative_error(&self) -> f64 {
        ((self.ratio - self.target) / self.target).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTrace {
    pub case: ProbeCase,
    pub params: ProbeParams,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTrace {
    pub fn final_relative_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, ProbeRow::relative_error)
    }

    pub fn diagnostic_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].diagnostic < w[0].diagnostic)
    }

    pub fn converged(&self) -> bool {
        self.final_relative_error() < self.params.relative_tol
            && self.diagnostic_decreasing()
            && self
                .rows
                .last()
                .is_some_and(|r| r.diagnostic < self.params.diagnostic_threshold)
    }

    pub fn row(&self, i: usize) -> Option<&ProbeRow> {
        self.rows.iter().find(|r| r.i == i)
    }
}

/// Track `length(γ)/length(γ′)` at times where the focus curves are the
/// dominant contributors, against the ratio of intersections with the focus
/// ergodic measure.
pub fn limit_set_probe(
    ctx: &MeasureContext,
    layout: &TimelineLayout,
    model: &HypModel,
    growth: &GrowthVerdict,
    test: (CurveIndex, CurveIndex),
    indices: RangeInclusive<usize>,
    params: &ProbeParams,
) -> Result<ProbeTrace> {
    let focus = params.focus;
    let weight = match focus {
        Parity::Alpha => layout.c_alpha,
        Parity::Beta => layout.c_beta,
    };
    if !growth.g1_holds() {
        return Err(Error::GrowthConditionFailed("G1"));
    }
    if weight == 0.0 && !growth.g2_holds() {
        return Err(Error::GrowthConditionFailed("G2"));
    }
    let case = if weight > 0.0 {
        ProbeCase::IntervalEnd
    } else {
        ProbeCase::UnitLength
    };
    let nu = |c: CurveIndex| -> Result<f64> {
        let v = ctx.ergodic_intersection(c.gamma_index(), focus)?.value;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonCrossingTestCurve(c.gamma_index()))
        }
    };
    let (nu_g, nu_h) = (nu(test.0)?, nu(test.1)?);
    let seq = ctx.seq();

    let idx: Vec<usize> = indices.collect();
    let rows: Vec<Result<ProbeRow>> = idx
        .par_iter()
        .map(|&i| {
            let (row, next) = (layout.row(i)?, layout.row(i + 1)?);
            let (balance, hi, next_lo, ln_twist) = match focus {
                Parity::Alpha => (row.a, row.a_hi, next.a_lo, ln_bigint(seq.n(i)?)),
                Parity::Beta => (row.b, row.b_hi, next.b_lo, ln_bigint(&seq.m(i)?)),
            };
            let t = match case {
                ProbeCase::IntervalEnd => hi,
                ProbeCase::UnitLength => model.unit_time(balance, ln_twist).clamp(hi, next_lo),
            };
            check_covered(layout, t)?;
            let focus_state = ShortCurveState::at(model, ctx, row, focus, t)?;
            let other_row = select_active(model, ctx, layout, focus.other(), t)?;
            let other_state = ShortCurveState::at(model, ctx, other_row, focus.other(), t)?;
            let (alpha, beta) = match focus {
                Parity::Alpha => (focus_state, other_state),
                Parity::Beta => (other_state, focus_state),
            };
            let rep = report_for(model, ctx, alpha, beta, t, &[test.0, test.1])?;
            let (g, h) = (&rep.curves[0], &rep.curves[1]);
            let (own, other) = match focus {
                Parity::Alpha => (g.contribution_alpha, g.contribution_beta),
                Parity::Beta => (g.contribution_beta, g.contribution_alpha),
            };
            // ln ∏_{j≤i} 2 n_j (or 2 m_j)
            let mut ln_prod = 0.0;
            for j in 1..=i {
                let x = match focus {
                    Parity::Alpha => ln_bigint(seq.n(j)?),
                    Parity::Beta => ln_bigint(&seq.m(j)?),
                };
                ln_prod += std::f64::consts::LN_2 + x;
            }
            Ok(ProbeRow {
                i,
                t,
                ratio: (g.total / h.total).value(),
                target: nu_g / nu_h,
                diagnostic: (other / own).value(),
                scaled_contribution: (own.ln() - nu_g.ln() - ln_prod).exp(),
            })
        })
        .collect();
    Ok(ProbeTrace {
        case,
        params: *params,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{growth_check, RSequence};
    use crate::measures::{blend, limit_measure, MeasureVector};
    use crate::numerics::{int, ratio};
    use crate::timeline::layout;

    #[test]
    fn contribution_examples() {
        assert!((contribution_value(&int(2), 4.0, 0.0, 0.1).value() - 8.0).abs() < 1e-12);
        assert_eq!(contribution_value(&int(0), 4.0, 3.0, 0.1), LogReal::zero());
        let s = ShortCurveState {
            curve: CurveIndex::alpha(3),
            t: 0.0,
            hyp: 0.5,
            width: width(0.5),
            twist: TwistRegime::PostBalance(int(10)),
        };
        let c = contribution(&s, &int(3)).value();
        assert!((c - 3.0 * (2.0 * 2f64.ln() + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn width_law() {
        assert_eq!(width(1.0), 0.0);
        assert!(width(0.5) > width(0.9));
        assert!(width(0.99) > 0.0);
    }

    #[test]
    fn hyp_is_symmetric_and_minimal_at_balance() {
        for kappa in [1.0, 2.0] {
            let m = HypModel {
                exponent: kappa,
                slack: 1.0,
            };
            let ln_n = 1000f64.ln();
            assert!((m.hyp(3.0, 3.0, ln_n) - 1e-3).abs() < 1e-15);
            for d in [0.1, 1.0, 2.5] {
                let (l, r) = (m.hyp(3.0 - d, 3.0, ln_n), m.hyp(3.0 + d, 3.0, ln_n));
                assert!((l - r).abs() < 1e-15 * r.max(1.0));
                assert!(r > 1e-3);
            }
            assert_eq!(m.hyp(100.0, 3.0, ln_n), 1.0);
            let u = m.unit_time(3.0, ln_n);
            assert!((m.ln_hyp(u, 3.0, ln_n)).abs() < 1e-9);
            assert!(m.ln_hyp(u - 1e-3, 3.0, ln_n) < 0.0);
        }
    }

    #[test]
    fn ln_cosh_large_arguments() {
        assert!((ln_cosh(0.0)).abs() < 1e-15);
        assert!((ln_cosh(1.0) - 1f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    struct Fixture {
        ctx: MeasureContext,
        alpha: MeasureVector,
        beta: MeasureVector,
        growth: GrowthVerdict,
    }

    fn fixture() -> Fixture {
        let seq = RSequence::k_family(&ratio(1, 5), 6, 48).unwrap();
        let growth = growth_check(&seq, &ratio(1, 1000));
        let ctx = MeasureContext::new(seq, 1e-5).unwrap();
        let alpha = limit_measure(&ctx, Parity::Alpha, 1e-10).unwrap();
        let beta = limit_measure(&ctx, Parity::Beta, 1e-10).unwrap();
        Fixture {
            ctx,
            alpha,
            beta,
            growth,
        }
    }

    #[test]
    fn active_pair_at_interval_end() {
        let fx = fixture();
        let m = blend(&fx.alpha, &fx.beta, 0.5, 0.5).unwrap();
        let l = layout(&fx.ctx, &m, 2..=12).unwrap();
        let model = HypModel::default();
        for i in 4..=10 {
            let t = l.row(i).unwrap().a_hi;
            let rep = length_report(&fx.ctx, &l, &model, t, &[CurveIndex::alpha(1)]).unwrap();
            assert_eq!(rep.alpha.curve, CurveIndex::alpha(i));
            assert_eq!(rep.beta.curve, CurveIndex::beta(i));
            assert!(matches!(rep.alpha.twist, TwistRegime::PostBalance(_)));
        }
        let far = l.rows.last().unwrap().a_hi + 1.0;
        assert_eq!(
            length_report(&fx.ctx, &l, &model, far, &[]).unwrap_err(),
            Error::TimelineExhausted(far)
        );
    }

    #[test]
    fn same_curve_ratio_is_one() {
        let fx = fixture();
        let m = blend(&fx.alpha, &fx.beta, 0.5, 0.5).unwrap();
        let l = layout(&fx.ctx, &m, 2..=12).unwrap();
        let g = CurveIndex::alpha(1);
        let tr = limit_set_probe(
            &fx.ctx,
            &l,
            &HypModel::default(),
            &fx.growth,
            (g, g),
            4..=10,
            &ProbeParams::default(),
        )
        .unwrap();
        assert!(tr.rows.iter().all(|r| r.ratio == 1.0 && r.target == 1.0));
    }

    #[test]
    fn probe_case_one_converges() {
        let fx = fixture();
        let m = blend(&fx.alpha, &fx.beta, 0.5, 0.5).unwrap();
        let l = layout(&fx.ctx, &m, 2..=13).unwrap();
        let tr = limit_set_probe(
            &fx.ctx,
            &l,
            &HypModel::default(),
            &fx.growth,
            (CurveIndex::alpha(1), CurveIndex::alpha(2)),
            4..=12,
            &ProbeParams::default(),
        )
        .unwrap();
        assert_eq!(tr.case, ProbeCase::IntervalEnd);
        assert!(tr.converged(), "{:#?}", tr.rows);
        // dominant term scales like i(γ, ν̄_α) ∏ 2 n_j
        let s: Vec<f64> = tr.rows.iter().map(|r| r.scaled_contribution).collect();
        let (lo, hi) = s.iter().fold((f64::MAX, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 10.0, "{s:?}");
    }

    #[test]
    fn mirrored_probe() {
        let fx = fixture();
        let m = blend(&fx.alpha, &fx.beta, 0.5, 0.5).unwrap();
        let l = layout(&fx.ctx, &m, 2..=14).unwrap();
        let params = ProbeParams {
            focus: Parity::Beta,
            ..ProbeParams::default()
        };
        let tr = limit_set_probe(
            &fx.ctx,
            &l,
            &HypModel::default(),
            &fx.growth,
            (CurveIndex::beta(1), CurveIndex::beta(2)),
            4..=12,
            &params,
        )
        .unwrap();
        assert!(tr.converged(), "{:#?}", tr.rows);
    }
}
