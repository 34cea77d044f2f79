//! Flat-length model along the geodesic: balance times, active intervals,
//! and the interleaving of the α and β intervals.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::curves::{CurveIndex, RSequence};
use crate::error::{Error, Result};
use crate::measures::{MeasureContext, MeasureVector};
use crate::numerics::{ln_bigint, LogReal};

/// `v_t = e^{−t} v₀` and `h_t = e^{t} h₀` for one curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatLengthModel {
    pub v0: LogReal<f64>,
    pub h0: LogReal<f64>,
}

impl FlatLengthModel {
    pub fn new(v0: LogReal<f64>, h0: LogReal<f64>) -> Self {
        FlatLengthModel { v0, h0 }
    }

    pub fn vertical(&self, t: f64) -> LogReal<f64> {
        self.v0 * LogReal::from_ln(-t)
    }

    pub fn horizontal(&self, t: f64) -> LogReal<f64> {
        self.h0 * LogReal::from_ln(t)
    }
}

/// The unique `t` with `v_t = h_t`, i.e. `½ log(v₀/h₀)`.
pub fn balance_time(model: &FlatLengthModel) -> Result<f64> {
    if !model.h0.is_positive() || !model.v0.is_positive() {
        return Err(Error::NotCrossed);
    }
    Ok(0.5 * (model.v0.ln() - model.h0.ln()))
}

/// One index `i` of the layout: α_i and β_i with their active intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct TimelineRow {
    pub i: usize,
    pub a: f64,
    pub b: f64,
    pub a_lo: f64,
    pub a_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
    /// `½ log n_i`
    pub half_n: f64,
    /// `½ log m_i`
    pub half_m: f64,
    /// Closed-form estimates of `a_i` (additive constant 0), for `c_α > 0`
    /// and for `c_α = 0`.
    pub a_formula_positive: Option<f64>,
    pub a_formula_zero: f64,
    pub b_formula_positive: Option<f64>,
    /// Needs `n_{i+1}`, so it is missing on the last row of a short prefix.
    pub b_formula_zero: Option<f64>,
    /// A distance-three intersection entered `i(γ, μ)` with its candidate value.
    pub provisional: bool,
}

impl TimelineRow {
    pub fn point(&self, p: Point) -> f64 {
        match p {
            Point::A => self.a,
            Point::ALo => self.a_lo,
            Point::AHi => self.a_hi,
            Point::B => self.b,
            Point::BLo => self.b_lo,
            Point::BHi => self.b_hi,
        }
    }

    /// The formula matching the weights the row was built with.
    pub fn a_formula(&self, c_alpha: f64) -> f64 {
        match self.a_formula_positive {
            Some(v) if c_alpha > 0.0 => v,
            _ => self.a_formula_zero,
        }
    }

    pub fn b_formula(&self, c_beta: f64) -> Option<f64> {
        match self.b_formula_positive {
            Some(v) if c_beta > 0.0 => Some(v),
            _ => self.b_formula_zero,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimelineLayout {
    pub c_alpha: f64,
    pub c_beta: f64,
    pub rows: Vec<TimelineRow>,
}

impl TimelineLayout {
    pub fn row(&self, i: usize) -> Result<&TimelineRow> {
        let first = self.rows.first().ok_or(Error::MissingRow(i))?.i;
        i.checked_sub(first)
            .and_then(|k| self.rows.get(k))
            .ok_or(Error::MissingRow(i))
    }

    pub fn indices(&self) -> RangeInclusive<usize> {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => a.i..=b.i,
            _ => RangeInclusive::new(1, 0),
        }
    }

    /// Largest `|model − formula|` over the given indices, for α and β.
    pub fn formula_deviation(&self, indices: RangeInclusive<usize>) -> Result<(f64, f64)> {
        let mut dev = (0.0f64, 0.0f64);
        for i in indices {
            let row = self.row(i)?;
            dev.0 = dev.0.max((row.a - row.a_formula(self.c_alpha)).abs());
            let b = row.b_formula(self.c_beta).ok_or(Error::MissingRow(i + 1))?;
            dev.1 = dev.1.max((row.b - b).abs());
        }
        Ok(dev)
    }
}

/// Model lengths of one curve against a measure.
pub fn flat_model(
    ctx: &MeasureContext,
    curve: CurveIndex,
    measure: &MeasureVector,
) -> Result<(FlatLengthModel, bool)> {
    let (v0, provisional) = ctx.table().marking_provisional(curve.gamma_index())?;
    let h0 = ctx.measure_intersection(curve, measure)?;
    if h0 <= 0.0 {
        return Err(Error::NotCrossed);
    }
    Ok((
        FlatLengthModel::new(LogReal::from_bigint(&v0), LogReal::from_value(h0)),
        provisional,
    ))
}

/// Balance times, intervals and closed-form estimates for `i` in `indices`.
pub fn layout(
    ctx: &MeasureContext,
    measure: &MeasureVector,
    indices: RangeInclusive<usize>,
) -> Result<TimelineLayout> {
    let seq = ctx.seq();
    let formulas = Formulas::new(seq, measure.c_alpha, measure.c_beta)?;
    let idx: Vec<usize> = indices.collect();
    let rows: Vec<Result<TimelineRow>> = idx
        .par_iter()
        .map(|&i| {
            let (ma, pa) = flat_model(ctx, CurveIndex::alpha(i), measure)?;
            let (mb, pb) = flat_model(ctx, CurveIndex::beta(i), measure)?;
            let (a, b) = (balance_time(&ma)?, balance_time(&mb)?);
            let half_n = 0.5 * ln_bigint(seq.n(i)?);
            let half_m = 0.5 * ln_bigint(&seq.m(i)?);
            Ok(TimelineRow {
                i,
                a,
                b,
                a_lo: a - half_n,
                a_hi: a + half_n,
                b_lo: b - half_m,
                b_hi: b + half_m,
                half_n,
                half_m,
                a_formula_positive: formulas.a_positive(i),
                a_formula_zero: formulas.a_zero(i),
                b_formula_positive: formulas.b_positive(i),
                b_formula_zero: formulas.b_zero(i),
                provisional: pa || pb,
            })
        })
        .collect();
    Ok(TimelineLayout {
        c_alpha: measure.c_alpha,
        c_beta: measure.c_beta,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// Logs of `n_i`, `m_i` and the weights, for the closed-form balance times.
struct Formulas {
    ln_n: Vec<f64>,
    ln_m: Vec<f64>,
    c_alpha: f64,
    c_beta: f64,
}

impl Formulas {
    fn new(seq: &RSequence, c_alpha: f64, c_beta: f64) -> Result<Self> {
        let mut ln_n = vec![f64::NAN];
        let mut ln_m = vec![0.0];
        for i in 1..=seq.n_count() {
            ln_n.push(ln_bigint(seq.n(i)?));
        }
        for i in 1..=seq.m_count() {
            ln_m.push(ln_bigint(&seq.m(i)?));
        }
        Ok(Formulas {
            ln_n,
            ln_m,
            c_alpha,
            c_beta,
        })
    }

    fn sum_2n(&self, i: usize) -> f64 {
        (1..i).map(|j| std::f64::consts::LN_2 + self.ln_n[j]).sum()
    }

    fn sum_2m(&self, i: usize) -> f64 {
        (1..i).map(|j| std::f64::consts::LN_2 + self.ln_m[j]).sum()
    }

    fn a_positive(&self, i: usize) -> Option<f64> {
        (self.c_alpha > 0.0)
            .then(|| self.sum_2n(i) + 0.5 * self.ln_n[i] - 0.5 * self.c_alpha.ln())
    }

    fn a_zero(&self, i: usize) -> f64 {
        let drift: f64 = (1..=i).map(|j| self.ln_m[j] - self.ln_n[j]).sum();
        self.sum_2n(i) + 0.5 * self.ln_n[i] + 0.5 * drift
    }

    fn b_positive(&self, i: usize) -> Option<f64> {
        (self.c_beta > 0.0).then(|| self.sum_2m(i) + 0.5 * self.ln_m[i] - 0.5 * self.c_beta.ln())
    }

    fn b_zero(&self, i: usize) -> Option<f64> {
        if i + 1 >= self.ln_n.len() {
            return None;
        }
        let drift: f64 = (1..=i).map(|j| self.ln_n[j + 1] - self.ln_m[j]).sum();
        Some(self.sum_2m(i) + 0.5 * self.ln_m[i] + 0.5 * drift)
    }
}

/// A time attached to row `i + shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    A,
    ALo,
    AHi,
    B,
    BLo,
    BHi,
}

impl Point {
    fn name(self) -> &'static str {
        match self {
            Point::A => "a",
            Point::ALo => "a_lo",
            Point::AHi => "a_hi",
            Point::B => "b",
            Point::BLo => "b_lo",
            Point::BHi => "b_hi",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// strictly before
    Less,
    /// before, with a gap that grows without bound
    MuchLess,
    /// before up to a bounded additive error
    Coarse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub point: Point,
    pub shift: isize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub left: Term,
    pub relation: Relation,
    pub right: Term,
    /// Added to the right-hand side.
    pub offset: f64,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |t: Term| match t.shift {
            0 => format!("{}[i]", t.point.name()),
            s if s > 0 => format!("{}[i+{}]", t.point.name(), s),
            s => format!("{}[i{}]", t.point.name(), s),
        };
        let rel = match self.relation {
            Relation::Less => "<",
            Relation::MuchLess => "<<",
            Relation::Coarse => "<=+",
        };
        write!(f, "{} {} {}", term(self.left), rel, term(self.right))?;
        if self.offset != 0.0 {
            write!(f, " {:+.6}", self.offset)?;
        }
        Ok(())
    }
}

fn link(left: (Point, isize), relation: Relation, right: (Point, isize), offset: f64) -> Link {
    Link {
        left: Term {
            point: left.0,
            shift: left.1,
        },
        relation,
        right: Term {
            point: right.0,
            shift: right.1,
        },
        offset,
    }
}

/// The interleaving chain predicted for the given weights.
pub fn chain(c_alpha: f64, c_beta: f64) -> Vec<Link> {
    use Point::*;
    use Relation::*;
    let path = |points: &[((Point, isize), Relation)], last: (Point, isize)| {
        let mut out = Vec::new();
        for (w, &(p, rel)) in points.iter().enumerate() {
            let next = points.get(w + 1).map_or(last, |q| q.0);
            out.push(link(p, rel, next, 0.0));
        }
        out
    };
    if c_alpha > 0.0 && c_beta > 0.0 {
        let mut links = path(
            &[
                ((ALo, 0), MuchLess),
                ((BHi, -1), Less),
                ((BLo, 0), MuchLess),
                ((AHi, 0), Less),
                ((ALo, 1), MuchLess),
            ],
            (BHi, 0),
        );
        let shift = 0.5 * (c_beta / c_alpha).ln();
        links.push(link((AHi, 0), Coarse, (B, 0), shift));
        links.push(link((BHi, 0), Coarse, (A, 1), -shift));
        links
    } else if c_alpha == 0.0 {
        path(
            &[
                ((ALo, 0), MuchLess),
                ((BHi, -1), Less),
                ((BLo, 0), MuchLess),
                ((A, 0), MuchLess),
                ((B, 0), MuchLess),
                ((AHi, 0), MuchLess),
                ((ALo, 1), MuchLess),
            ],
            (BHi, 0),
        )
    } else {
        path(
            &[
                ((BLo, 0), MuchLess),
                ((AHi, 0), Coarse),
                ((ALo, 1), MuchLess),
                ((B, 0), MuchLess),
                ((A, 1), MuchLess),
                ((BHi, 0), MuchLess),
                ((BLo, 1), MuchLess),
            ],
            (AHi, 1),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingParams {
    /// `≪` needs the last gap to be at least this multiple of the first.
    pub divergence_floor: f64,
    /// Allowed additive error for `⪯+`.
    pub offset_slack: f64,
}

impl Default for OrderingParams {
    fn default() -> Self {
        OrderingParams {
            divergence_floor: 2.0,
            offset_slack: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkVerdict {
    pub link: Link,
    /// `(i, right + offset − left)`
    pub gaps: Vec<(usize, f64)>,
    /// The ordering itself (gap > 0, or ≥ −slack for `⪯+`) at every index.
    pub holds: bool,
    /// First index from which the ordering holds through the window.
    pub onset: Option<usize>,
    /// For `≪`: gaps strictly increase and the last is at least
    /// `divergence_floor` times the first.
    pub diverges: Option<bool>,
}

impl LinkVerdict {
    pub fn passes(&self) -> bool {
        self.holds && self.diverges.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingVerdict {
    pub links: Vec<LinkVerdict>,
}

impl OrderingVerdict {
    /// Every relation holds as an ordering.
    pub fn orderings_hold(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }

    /// Every `≪` gap also diverges.
    pub fn divergence_holds(&self) -> bool {
        self.links.iter().all(|l| l.diverges.unwrap_or(true))
    }

    pub fn passes(&self) -> bool {
        self.links.iter().all(LinkVerdict::passes)
    }
}

pub fn ordering_verdict(
    layout: &TimelineLayout,
    indices: RangeInclusive<usize>,
    params: &OrderingParams,
) -> Result<OrderingVerdict> {
    let at = |t: Term, i: usize| -> Result<f64> {
        let k = i
            .checked_add_signed(t.shift)
            .ok_or(Error::MissingRow(0))?;
        Ok(layout.row(k)?.point(t.point))
    };
    let mut links = Vec::new();
    for l in chain(layout.c_alpha, layout.c_beta) {
        let gaps = indices
            .clone()
            .map(|i| Ok((i, at(l.right, i)? + l.offset - at(l.left, i)?)))
            .collect::<Result<Vec<_>>>()?;
        let ok = |g: f64| match l.relation {
            Relation::Coarse => g >= -params.offset_slack,
            _ => g > 0.0,
        };
        let holds = gaps.iter().all(|&(_, g)| ok(g));
        let onset = match gaps.iter().rposition(|&(_, g)| !ok(g)) {
            None => gaps.first().map(|g| g.0),
            Some(p) => gaps.get(p + 1).map(|g| g.0),
        };
        let diverges = (l.relation == Relation::MuchLess).then(|| {
            let increasing = gaps.windows(2).all(|w| w[1].1 > w[0].1);
            match (gaps.first(), gaps.last()) {
                (Some(f), Some(z)) => {
                    increasing && f.1 > 0.0 && z.1 >= params.divergence_floor * f.1
                }
                _ => false,
            }
        });
        links.push(LinkVerdict {
            link: l,
            gaps,
            holds,
            onset,
            diverges,
        });
    }
    Ok(OrderingVerdict { links })
}

/// The quantities that must tend to zero for the interleaving argument.
#[derive(Clone, Debug, PartialEq)]
pub struct LittleORow {
    pub i: usize,
    /// `log m_i / ∏_{j≤i} n_j/m_{j−1}`
    pub log_m_ratio: f64,
    /// `log n_{i+1} / ∏_{j≤i} m_j/n_j`
    pub log_n_ratio: f64,
    /// `c_α = 0`: `e^{a̲_{i+1} − b_i} / ∏_{j≤i} n_j/m_{j−1}`, from the layout
    /// and from the closed-form balance times.
    pub alpha_gap: Option<(f64, f64)>,
    /// `c_β = 0`: `e^{b̲_{i+1} − a_{i+1}} / ∏_{j≤i} m_j/n_j`, likewise.
    pub beta_gap: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LittleOReport {
    pub rows: Vec<LittleORow>,
    pub threshold: f64,
}

/// Non-increasing over the second half of the window and below `threshold`
/// at the end.
fn decays(values: &[f64], threshold: f64) -> bool {
    let tail = &values[values.len() / 2..];
    tail.windows(2).all(|w| w[1] <= w[0]) && values.last().is_some_and(|&v| v < threshold)
}

impl LittleOReport {
    pub fn log_m_decays(&self) -> bool {
        decays(&self.column(|r| Some(r.log_m_ratio)), self.threshold)
    }

    pub fn log_n_decays(&self) -> bool {
        decays(&self.column(|r| Some(r.log_n_ratio)), self.threshold)
    }

    /// `None` when the clause does not apply to these weights.
    pub fn alpha_gap_decays(&self) -> Option<bool> {
        let v = self.column(|r| r.alpha_gap.map(|g| g.0));
        (!v.is_empty()).then(|| decays(&v, self.threshold))
    }

    pub fn beta_gap_decays(&self) -> Option<bool> {
        let v = self.column(|r| r.beta_gap.map(|g| g.0));
        (!v.is_empty()).then(|| decays(&v, self.threshold))
    }

    fn column(&self, f: impl Fn(&LittleORow) -> Option<f64>) -> Vec<f64> {
        self.rows.iter().filter_map(f).collect()
    }
}

pub fn little_o_diagnostics(
    seq: &RSequence,
    layout: &TimelineLayout,
    indices: RangeInclusive<usize>,
    threshold: f64,
) -> Result<LittleOReport> {
    let f = Formulas::new(seq, layout.c_alpha, layout.c_beta)?;
    // ln ∏_{j≤i} n_j/m_{j−1} and ln ∏_{j≤i} m_j/n_j
    let ln_pnm = |i: usize| (1..=i).map(|j| f.ln_n[j] - f.ln_m[j - 1]).sum::<f64>();
    let ln_pmn = |i: usize| (1..=i).map(|j| f.ln_m[j] - f.ln_n[j]).sum::<f64>();
    let mut rows = Vec::new();
    for i in indices {
        let ln_n_next = *f.ln_n.get(i + 1).ok_or(Error::IndexOutOfRange(2 * i + 1, seq.len()))?;
        let alpha_gap = if layout.c_alpha == 0.0 {
            let (row, next) = (layout.row(i)?, layout.row(i + 1)?);
            let model = (next.a_lo - row.b - ln_pnm(i)).exp();
            let b = row.b_formula(layout.c_beta).ok_or(Error::MissingRow(i + 1))?;
            let a_lo = f.a_zero(i + 1) - 0.5 * f.ln_n[i + 1];
            Some((model, (a_lo - b - ln_pnm(i)).exp()))
        } else {
            None
        };
        let beta_gap = if layout.c_beta == 0.0 {
            let (row, next) = (layout.row(i)?, layout.row(i + 1)?);
            let model = (next.b_lo - next.a - ln_pmn(i)).exp();
            let b_lo = f.b_zero(i + 1).ok_or(Error::MissingRow(i + 2))? - 0.5 * f.ln_m[i + 1];
            let a = next.a_formula(layout.c_alpha);
            let _ = row;
            Some((model, (b_lo - a - ln_pmn(i)).exp()))
        } else {
            None
        };
        rows.push(LittleORow {
            i,
            log_m_ratio: (f.ln_m[i].ln() - ln_pnm(i)).exp(),
            log_n_ratio: (ln_n_next.ln() - ln_pmn(i)).exp(),
            alpha_gap,
            beta_gap,
        });
    }
    Ok(LittleOReport { rows, threshold })
}
