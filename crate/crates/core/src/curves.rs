//! Twist sequences, the curve family γ_i, markings, and exact intersection
//! numbers.
//!
//! Curves are indexed from 0. γ₀, γ₁ cross the train track efficiently;
//! γ_i for i ≥ 2 are carried, with weights `M_{r₁}⋯M_{r_{i−3}} v₃`.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{big_rational_cmp, scan, Matrix5};
use crate::traintrack::{
    apply_twist, pair_vector, twist_matrix, EfficientCurve, IntMatrix, IntVector, TwistMatrix,
    WeightVector,
};

/// Minimum prefix length accepted by [`validate_sequence`].
pub const MIN_LEN: usize = 8;

/// A constraint on the twist sequence that failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EpsilonOutOfRange,
    TooShort { len: usize },
    NonPositive { i: usize },
    FirstTooSmall,
    GrowthViolated { i: usize },
    DecayBound { i: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EpsilonOutOfRange => write!(f, "epsilon out of range"),
            Violation::TooShort { len } => {
                write!(f, "sequence too short (length {len}, need {MIN_LEN})")
            }
            Violation::NonPositive { i } => write!(f, "r_{i} is not positive"),
            Violation::FirstTooSmall => write!(f, "r_1 < 1/epsilon"),
            Violation::GrowthViolated { i } => write!(f, "growth violated at i={i}"),
            Violation::DecayBound { i } => write!(f, "1/r_{i} > epsilon^{i}"),
        }
    }
}

/// Positive twist parameters `r₁, r₂, …` with no growth constraint.
///
/// All curve and intersection computations live here so they can also be
/// run on small hand examples (e.g. `r₁ = 1`) that are not admissible
/// sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    r: Vec<BigInt>,
}

impl Cocycle {
    pub fn new(r: Vec<BigInt>) -> Result<Self> {
        let bad: Vec<Violation> = r
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_positive())
            .map(|(i, _)| Violation::NonPositive { i: i + 1 })
            .collect();
        if bad.is_empty() {
            Ok(Cocycle { r })
        } else {
            Err(Error::InvalidSequence(bad))
        }
    }

    pub fn from_i64(r: &[i64]) -> Result<Self> {
        Self::new(r.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `r_i`, 1-based.
    pub fn r(&self, i: usize) -> Result<&BigInt> {
        if i == 0 || i > self.r.len() {
            return Err(Error::IndexOutOfRange(i, self.r.len()));
        }
        Ok(&self.r[i - 1])
    }

    pub fn values(&self) -> &[BigInt] {
        &self.r
    }

    pub fn twist(&self, i: usize) -> Result<TwistMatrix> {
        twist_matrix(self.r(i)?)
    }

    fn check_range(&self, p: usize, q: usize) -> Result<()> {
        if q >= p {
            self.r(p)?;
            self.r(q)?;
        }
        Ok(())
    }

    /// `M_{r_p} ⋯ M_{r_q}`; the identity when `q < p`.
    pub fn product(&self, p: usize, q: usize) -> Result<IntMatrix> {
        self.check_range(p, q)?;
        let mut acc: IntMatrix = Matrix5::identity();
        for i in p..=q {
            acc = &acc * self.twist(i)?.matrix();
        }
        Ok(acc)
    }

    /// Same as [`Cocycle::product`], reduced in parallel.
    pub fn product_par(&self, p: usize, q: usize) -> Result<IntMatrix> {
        self.check_range(p, q)?;
        let mats = self.twists(p, q)?;
        Ok(scan::product_par(&mats, Matrix5::identity(), |a, b| a * b))
    }

    fn twists(&self, p: usize, q: usize) -> Result<Vec<IntMatrix>> {
        if q < p {
            return Ok(Vec::new());
        }
        (p..=q)
            .map(|i| Ok(self.twist(i)?.matrix().clone()))
            .collect()
    }

    /// `P_n = M_{r₁}⋯M_{r_n}` for `n = 1..=len`.
    pub fn prefix_products(&self, parallel: bool) -> Vec<IntMatrix> {
        let mats = self.twists(1, self.len()).expect("indices in range");
        if parallel {
            scan::prefix_products_par(&mats, |a, b| a * b)
        } else {
            scan::prefix_products(&mats, |a, b| a * b)
        }
    }

    /// `M_{r_p} ⋯ M_{r_q} w`, applied right to left.
    pub fn apply_range(&self, p: usize, q: usize, w: &IntVector) -> Result<IntVector> {
        self.check_range(p, q)?;
        let mut v = w.clone();
        for i in (p..=q).rev() {
            v = apply_twist(self.r(i)?, &v);
        }
        Ok(v)
    }

    /// Largest index `i` for which γ_i's weights are defined.
    pub fn max_curve(&self) -> usize {
        self.len() + 2
    }

    /// Weight vector of γ_i (i ≥ 2). Both product forms are evaluated and
    /// must agree.
    pub fn curve_weights(&self, i: usize) -> Result<WeightVector> {
        if i < 2 {
            return Err(Error::NotCarried);
        }
        if i > self.max_curve() {
            return Err(Error::IndexOutOfRange(i - 2, self.len()));
        }
        let v2 = WeightVector::v2().into_vector();
        let v3 = WeightVector::v3().into_vector();
        let via_v2 = self.apply_range(1, i - 2, &v2)?;
        if i == 2 {
            return Ok(WeightVector::v2());
        }
        let via_v3 = self.apply_range(1, i - 3, &v3)?;
        assert_eq!(via_v2, via_v3, "dual product identity failed at γ_{i}");
        Ok(WeightVector::new(via_v3.0).expect("carried weights are admissible"))
    }

    /// Weights of γ₂, …, γ_{len+2} from a prefix-product scan.
    pub fn all_curve_weights(&self, parallel: bool) -> Vec<WeightVector> {
        let v2 = WeightVector::v2();
        let v3 = WeightVector::v3().into_vector();
        let mut out = vec![v2.clone(), WeightVector::v3()];
        let mut prefix = self.prefix_products(parallel);
        prefix.pop();
        for p in prefix {
            let w = p.mul_vector(&v3);
            out.push(WeightVector::new(w.0).expect("carried weights are admissible"));
        }
        out
    }

    fn ordered(j: usize, k: usize) -> Result<(usize, usize)> {
        match j.cmp(&k) {
            std::cmp::Ordering::Equal => Err(Error::SameCurve(j)),
            std::cmp::Ordering::Less => Ok((j, k)),
            std::cmp::Ordering::Greater => Ok((k, j)),
        }
    }

    fn small_gap(a: usize, k: usize) -> Option<Result<BigInt>> {
        match k - a {
            1 => Some(Ok(BigInt::zero())),
            2 => Some(Ok(BigInt::from(2))),
            3 => Some(Err(Error::SmallCaseUnvalidated(a, k))),
            _ => None,
        }
    }

    /// `i(γ_j, γ_k)`: 0 for neighbours, 2 at distance two, and otherwise
    /// twice the sum of rows {2,3}, columns {3,4} of `M_{r_{a+1}}⋯M_{r_{k−3}}`
    /// with `a = min(j,k)`. Distance three is refused.
    pub fn intersection(&self, j: usize, k: usize) -> Result<BigInt> {
        let (a, k) = Self::ordered(j, k)?;
        if let Some(v) = Self::small_gap(a, k) {
            return v;
        }
        let p = self.product(a + 1, k - 3)?;
        Ok(p.block_sum(&[2, 3], &[3, 4]) * 2)
    }

    /// Same value as [`Cocycle::intersection`] via `2 u₀ · (M_{r_{a+1}}⋯M_{r_{k−3}} v₃)`.
    pub fn intersection_by_pairing(&self, j: usize, k: usize) -> Result<BigInt> {
        let (a, k) = Self::ordered(j, k)?;
        if let Some(v) = Self::small_gap(a, k) {
            return v;
        }
        let w = self.apply_range(a + 1, k - 3, &WeightVector::v3().into_vector())?;
        Ok(pair_vector(EfficientCurve::Gamma0, &w))
    }

    /// Same value via rows {4,5} of the product starting one step earlier,
    /// `M_{r_a}⋯M_{r_{k−3}}`, i.e. `2 u₁ · (M_{r_a}⋯M_{r_{k−3}} v₃)`.
    /// Needs `a ≥ 1`. Unlike the other routes this one also evaluates
    /// distance three, where the product is the single factor `M_{r_a}`.
    pub fn intersection_shifted(&self, j: usize, k: usize) -> Result<BigInt> {
        let (a, k) = Self::ordered(j, k)?;
        if k - a < 3 {
            return Self::small_gap(a, k).expect("distance below three");
        }
        if a == 0 {
            return Err(Error::IndexOutOfRange(0, self.len()));
        }
        let p = self.product(a, k - 3)?;
        Ok(p.block_sum(&[4, 5], &[3, 4]) * 2)
    }

    /// The value the pairing formula would give at distance three
    /// (`2 u₀ · v₃ = 2`). Not asserted anywhere; reported as a diagnostic.
    pub fn small_case_candidate(&self) -> BigInt {
        pair_vector(EfficientCurve::Gamma0, WeightVector::v3().as_vector())
    }

    /// `i(γ_a, γ_k)` for every `a < k` in one backward sweep. Entry `k−3`
    /// is `None` (unvalidated distance).
    pub fn intersections_with(&self, k: usize) -> Result<Vec<Option<BigInt>>> {
        let mut out: Vec<Option<BigInt>> = vec![None; k];
        if k >= 1 {
            out[k - 1] = Some(BigInt::zero());
        }
        if k >= 2 {
            out[k - 2] = Some(BigInt::from(2));
        }
        if k >= 4 {
            self.r(k - 3)?;
            let mut w = WeightVector::v3().into_vector();
            for a in (0..=k - 4).rev() {
                w = apply_twist(self.r(a + 1)?, &w);
                out[a] = Some(pair_vector(EfficientCurve::Gamma0, &w));
            }
        }
        Ok(out)
    }

    /// `i(μ_j, γ_k) = Σ_{b=j}^{j+3} i(γ_b, γ_k)`, with μ_j = {γ_j,…,γ_{j+3}}.
    pub fn marking_intersection(&self, j: usize, k: usize) -> Result<BigInt> {
        if k < j + 7 {
            return Err(Error::MarkingOutOfRange(j, k));
        }
        (j..j + 4).map(|b| self.intersection(b, k)).sum()
    }

    /// Intersection table for all pairs `(a, k)` with `a < k ≤ k_max`.
    pub fn intersection_table(&self, k_max: usize) -> Result<IntersectionTable> {
        let columns: Result<Vec<_>> = (0..=k_max)
            .into_par_iter()
            .map(|k| self.intersections_with(k))
            .collect();
        Ok(IntersectionTable {
            columns: columns?,
            candidate: self.small_case_candidate(),
        })
    }

    /// `∏ 2 r_{i+1}` over `i = j, j+2, …, ≤ k−4` (empty product is 1).
    pub fn comparability_normalizer(&self, j: usize, k: usize) -> Result<BigInt> {
        let mut p = BigInt::one();
        let mut i = j;
        while i + 4 <= k {
            p *= self.r(i + 1)? * 2;
            i += 2;
        }
        Ok(p)
    }

    /// `i(γ_j, γ_k) / ∏ 2 r_{i+1}` for `k ≡ j (mod 2)`, `k ≥ j + 2`.
    pub fn comparability(&self, j: usize, k: usize) -> Result<BigRational> {
        if !(k + j).is_multiple_of(2) || k < j + 2 {
            return Err(Error::ParityMismatch(j, k));
        }
        let num = self.intersection(j, k)?;
        Ok(BigRational::new(num, self.comparability_normalizer(j, k)?))
    }

    /// `i(γ_{j−1}, γ_k) / ∏ 2 r_{i+1}`, the companion ratio with the
    /// preceding curve. Needs `j ≥ 1`.
    pub fn comparability_preceding(&self, j: usize, k: usize) -> Result<BigRational> {
        if !(k + j).is_multiple_of(2) || k < j + 4 || j == 0 {
            return Err(Error::ParityMismatch(j, k));
        }
        let num = self.intersection(j - 1, k)?;
        Ok(BigRational::new(num, self.comparability_normalizer(j, k)?))
    }
}

/// Precomputed `i(γ_a, γ_k)`.
#[derive(Clone, Debug)]
pub struct IntersectionTable {
    columns: Vec<Vec<Option<BigInt>>>,
    candidate: BigInt,
}

impl IntersectionTable {
    pub fn k_max(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn get(&self, a: usize, k: usize) -> Result<&BigInt> {
        let (a, k) = Cocycle::ordered(a, k)?;
        let col = self
            .columns
            .get(k)
            .ok_or(Error::IndexOutOfRange(k, self.k_max()))?;
        col[a].as_ref().ok_or(Error::SmallCaseUnvalidated(a, k))
    }

    /// `i(μ, γ_k)` for `k ≥ 7`.
    pub fn marking(&self, k: usize) -> Result<BigInt> {
        if k < 7 {
            return Err(Error::MarkingOutOfRange(0, k));
        }
        let mut acc = BigInt::zero();
        for b in 0..4 {
            acc += self.get(b, k)?;
        }
        Ok(acc)
    }

    /// `i(μ, γ_k)` for `k ≥ 4`, substituting the distance-three candidate
    /// value where needed. The flag reports whether it was used.
    pub fn marking_provisional(&self, k: usize) -> Result<(BigInt, bool)> {
        if k < 4 {
            return Err(Error::MarkingOutOfRange(0, k));
        }
        let mut acc = BigInt::zero();
        let mut provisional = false;
        for b in 0..4 {
            match self.get(b, k) {
                Ok(v) => acc += v,
                Err(Error::SmallCaseUnvalidated(..)) => {
                    acc += &self.candidate;
                    provisional = true;
                }
                Err(e) => return Err(e),
            }
        }
        Ok((acc, provisional))
    }
}

/// A twist sequence that satisfies `1/ε ≤ r₁` and `r_i ≤ ε r_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSequence {
    epsilon: BigRational,
    cocycle: Cocycle,
}

/// Check the growth constraints, collecting every violation.
pub fn validate_sequence(epsilon: &BigRational, r: Vec<BigInt>) -> Result<RSequence> {
    let mut bad = Vec::new();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !epsilon.is_positive() || epsilon >= &half {
        bad.push(Violation::EpsilonOutOfRange);
    }
    if r.len() < MIN_LEN {
        bad.push(Violation::TooShort { len: r.len() });
    }
    for (i, x) in r.iter().enumerate() {
        if !x.is_positive() {
            bad.push(Violation::NonPositive { i: i + 1 });
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidSequence(bad));
    }
    let ratio = |x: &BigInt| BigRational::from_integer(x.clone());
    // 1/ε ≤ r₁  ⟺  1 ≤ ε r₁
    if epsilon * ratio(&r[0]) < BigRational::one() {
        bad.push(Violation::FirstTooSmall);
    }
    for i in 1..r.len() {
        if ratio(&r[i - 1]) > epsilon * ratio(&r[i]) {
            bad.push(Violation::GrowthViolated { i });
        }
    }
    let mut eps_pow = BigRational::one();
    for (i, x) in r.iter().enumerate() {
        eps_pow *= epsilon;
        // 1/r_i ≤ ε^i  ⟺  1 ≤ ε^i r_i
        if big_rational_cmp(&(&eps_pow * ratio(x)), &BigRational::one()).is_lt() {
            bad.push(Violation::DecayBound { i: i + 1 });
        }
    }
    if bad.is_empty() {
        Ok(RSequence {
            epsilon: epsilon.clone(),
            cocycle: Cocycle { r },
        })
    } else {
        Err(Error::InvalidSequence(bad))
    }
}

impl RSequence {
    /// `r_i = K^i` for `i = 1..=len`.
    pub fn k_family(epsilon: &BigRational, k: u64, len: usize) -> Result<Self> {
        let base = BigInt::from(k);
        let r = (1..=len as u32).map(|i| base.pow(i)).collect();
        validate_sequence(epsilon, r)
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// `n_i = r_{2i−1}` (i ≥ 1).
    pub fn n(&self, i: usize) -> Result<&BigInt> {
        if i == 0 {
            return Err(Error::IndexOutOfRange(0, self.len()));
        }
        self.r(2 * i - 1)
    }

    /// `m_i = r_{2i}`, with `m₀ = 1`.
    pub fn m(&self, i: usize) -> Result<BigInt> {
        if i == 0 {
            return Ok(BigInt::one());
        }
        self.r(2 * i).cloned()
    }

    /// Largest `i` with `n_i` defined.
    pub fn n_count(&self) -> usize {
        self.len().div_ceil(2)
    }

    /// Largest `i` with `m_i` defined.
    pub fn m_count(&self) -> usize {
        self.len() / 2
    }
}

impl Deref for RSequence {
    type Target = Cocycle;
    fn deref(&self) -> &Cocycle {
        &self.cocycle
    }
}

/// Whether a curve belongs to the even (α) or odd (β) subsequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Alpha,
    Beta,
}

impl Parity {
    pub fn of(gamma: usize) -> Self {
        if gamma.is_multiple_of(2) {
            Parity::Alpha
        } else {
            Parity::Beta
        }
    }

    pub fn remainder(self) -> usize {
        match self {
            Parity::Alpha => 0,
            Parity::Beta => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Parity::Alpha => Parity::Beta,
            Parity::Beta => Parity::Alpha,
        }
    }
}

/// γ_i, with α_i = γ_{2i} and β_i = γ_{2i+1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveIndex(usize);

impl CurveIndex {
    pub fn gamma(i: usize) -> Self {
        CurveIndex(i)
    }

    pub fn alpha(i: usize) -> Self {
        CurveIndex(2 * i)
    }

    pub fn beta(i: usize) -> Self {
        CurveIndex(2 * i + 1)
    }

    pub fn gamma_index(self) -> usize {
        self.0
    }

    pub fn parity(self) -> Parity {
        Parity::of(self.0)
    }

    /// `i` in α_i or β_i.
    pub fn family_index(self) -> usize {
        self.0 / 2
    }

    pub fn label(self) -> String {
        match self.parity() {
            Parity::Alpha => format!("alpha_{}", self.family_index()),
            Parity::Beta => format!("beta_{}", self.family_index()),
        }
    }
}

impl fmt::Display for CurveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gamma_{} ({})", self.0, self.label())
    }
}

/// Exact evaluation of the two growth conditions on a finite prefix.
#[derive(Clone, Debug)]
pub struct GrowthVerdict {
    /// `(i, holds)` for the sandwich
    /// `∏_{j≤i} n_j/m_{j−1} ≤ ∏_{j≤i} m_j/n_j ≤ ∏_{j≤i+1} n_j/m_{j−1}`.
    pub g1: Vec<(usize, bool)>,
    /// First index from which the sandwich holds through the end of the prefix.
    pub g1_onset: Option<usize>,
    /// `(i, (m_{i+1}/n_{i+1}) / ∏_{j≤i} n_j/m_{j−1})`.
    pub g2_alpha: Vec<(usize, BigRational)>,
    /// `(i, (n_{i+2}/m_{i+1}) / ∏_{j≤i} m_j/n_j)`.
    pub g2_beta: Vec<(usize, BigRational)>,
    pub g2_alpha_decays: bool,
    pub g2_beta_decays: bool,
    /// First index where each 𝒢₂ ratio is below the threshold.
    pub g2_alpha_onset: Option<usize>,
    pub g2_beta_onset: Option<usize>,
}

impl GrowthVerdict {
    pub fn g1_holds(&self) -> bool {
        self.g1_onset.is_some()
    }

    pub fn g2_holds(&self) -> bool {
        self.g2_alpha_decays && self.g2_beta_decays
    }
}

fn decays(
    ratios: &[(usize, BigRational)],
    threshold: &BigRational,
    last_allowed: impl Fn(usize) -> bool,
) -> (bool, Option<usize>) {
    let monotone = ratios.windows(2).all(|w| w[1].1 <= w[0].1);
    let onset = ratios
        .iter()
        .find(|(i, q)| q < threshold && last_allowed(*i))
        .map(|(i, _)| *i);
    (monotone && onset.is_some(), onset)
}

/// Evaluate 𝒢₁ and 𝒢₂ over the prefix. A 𝒢₂ clause passes when its ratio
/// sequence is non-increasing and falls below `threshold` at an index whose
/// twist parameters end at or before `r_{L−2}`.
pub fn growth_check(seq: &RSequence, threshold: &BigRational) -> GrowthVerdict {
    let q = |x: BigInt| BigRational::from_integer(x);
    let n = |i: usize| q(seq.n(i).expect("in range").clone());
    let m = |i: usize| q(seq.m(i).expect("in range"));
    let len = seq.len();

    // prod_nm[i] = ∏_{j≤i} n_j/m_{j−1}, prod_mn[i] = ∏_{j≤i} m_j/n_j
    let mut prod_nm = vec![BigRational::one()];
    let mut prod_mn = vec![BigRational::one()];
    for i in 1..=seq.n_count() {
        let p = &prod_nm[i - 1] * n(i) / m(i - 1);
        prod_nm.push(p);
        if i <= seq.m_count() {
            let p = &prod_mn[i - 1] * m(i) / n(i);
            prod_mn.push(p);
        }
    }

    let mut g1 = Vec::new();
    for i in 1..prod_nm.len().min(prod_mn.len()) {
        if i + 1 >= prod_nm.len() {
            break;
        }
        let holds = prod_nm[i] <= prod_mn[i] && prod_mn[i] <= prod_nm[i + 1];
        g1.push((i, holds));
    }
    let g1_onset = match g1.iter().rposition(|(_, h)| !h) {
        None => g1.first().map(|(i, _)| *i),
        Some(p) if p + 1 < g1.len() => Some(g1[p + 1].0),
        Some(_) => None,
    };

    let mut g2_alpha = Vec::new();
    let mut i = 1;
    while 2 * (i + 1) <= len {
        g2_alpha.push((i, m(i + 1) / n(i + 1) / &prod_nm[i]));
        i += 1;
    }
    let mut g2_beta = Vec::new();
    let mut i = 1;
    while 2 * (i + 2) - 1 <= len && i < prod_mn.len() {
        g2_beta.push((i, n(i + 2) / m(i + 1) / &prod_mn[i]));
        i += 1;
    }
    let (g2_alpha_decays, g2_alpha_onset) =
        decays(&g2_alpha, threshold, |i| 2 * (i + 1) + 2 <= len);
    let (g2_beta_decays, g2_beta_onset) =
        decays(&g2_beta, threshold, |i| 2 * (i + 2) - 1 + 2 <= len);

    GrowthVerdict {
        g1,
        g1_onset,
        g2_alpha,
        g2_beta,
        g2_alpha_decays,
        g2_beta_decays,
        g2_alpha_onset,
        g2_beta_onset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, ratio};

    fn k6(len: usize) -> RSequence {
        RSequence::k_family(&ratio(1, 5), 6, len).unwrap()
    }

    #[test]
    fn k_family_is_valid() {
        let s = k6(30);
        assert_eq!(s.r(1).unwrap(), &int(6));
        assert_eq!(s.r(4).unwrap(), &int(1296));
        assert_eq!(s.n(2).unwrap(), &int(216));
        assert_eq!(s.m(0).unwrap(), int(1));
        assert_eq!(s.m(2).unwrap(), int(1296));
    }

    #[test]
    fn equality_at_the_boundary_is_valid() {
        let r = (1..=10u32).map(|i| BigInt::from(5).pow(i)).collect();
        assert!(validate_sequence(&ratio(1, 5), r).is_ok());
    }

    #[test]
    fn epsilon_half_rejected() {
        let r = (1..=10u32).map(|i| BigInt::from(6).pow(i)).collect();
        match validate_sequence(&ratio(1, 2), r) {
            Err(Error::InvalidSequence(v)) => assert!(v.contains(&Violation::EpsilonOutOfRange)),
            other => panic!("{other:?}"),
        }
        assert!(RSequence::k_family(&ratio(0, 1), 6, 10).is_err());
    }

    #[test]
    fn violations_are_listed_with_indices() {
        let r = [2, 3, 100, 400, 2000, 10_000, 60_000, 300_000].map(BigInt::from).to_vec();
        match validate_sequence(&ratio(1, 5), r) {
            Err(Error::InvalidSequence(v)) => {
                assert!(v.contains(&Violation::FirstTooSmall));
                assert!(v.contains(&Violation::GrowthViolated { i: 1 }));
                assert!(v.contains(&Violation::GrowthViolated { i: 3 }));
                assert!(!v.contains(&Violation::GrowthViolated { i: 2 }));
                let msg = Error::InvalidSequence(v).to_string();
                assert!(msg.contains("growth violated at i=1"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_sequence_rejected() {
        let r = (1..=5u32).map(|i| BigInt::from(6).pow(i)).collect();
        assert!(matches!(
            validate_sequence(&ratio(1, 5), r),
            Err(Error::InvalidSequence(v)) if v == vec![Violation::TooShort { len: 5 }]
        ));
    }

    #[test]
    fn constant_ratio_input_rejected() {
        // n_i = m_i means r_{2i−1} = r_{2i}
        let r = [6, 6, 36, 36, 216, 216, 1296, 1296].map(BigInt::from).to_vec();
        assert!(validate_sequence(&ratio(1, 5), r).is_err());
    }

    #[test]
    fn first_curve_weights() {
        let c = Cocycle::from_i64(&[1, 1, 1]).unwrap();
        assert_eq!(c.curve_weights(2).unwrap(), WeightVector::v2());
        assert_eq!(c.curve_weights(3).unwrap(), WeightVector::v3());
        assert_eq!(
            c.curve_weights(4).unwrap(),
            WeightVector::from_i64([1, 2, 0, 0, 1]).unwrap()
        );
        assert_eq!(c.curve_weights(1), Err(Error::NotCarried));
        assert_eq!(c.curve_weights(0), Err(Error::NotCarried));
        assert!(c.curve_weights(6).is_err());
    }

    #[test]
    fn scanned_weights_match_direct() {
        let s = k6(12);
        let all = s.all_curve_weights(false);
        assert_eq!(all, s.all_curve_weights(true));
        for (off, w) in all.iter().enumerate() {
            assert_eq!(w, &s.curve_weights(off + 2).unwrap());
        }
    }

    #[test]
    fn small_distances() {
        let s = k6(20);
        for j in 0..15 {
            assert_eq!(s.intersection(j, j + 1).unwrap(), int(0));
            assert_eq!(s.intersection(j, j + 2).unwrap(), int(2));
            assert_eq!(
                s.intersection(j, j + 3),
                Err(Error::SmallCaseUnvalidated(j, j + 3))
            );
        }
        assert_eq!(s.intersection(3, 3), Err(Error::SameCurve(3)));
        assert_eq!(s.small_case_candidate(), int(2));
    }

    #[test]
    fn gamma0_gamma4_at_r1_equal_1() {
        let c = Cocycle::from_i64(&[1, 1, 1, 1]).unwrap();
        assert_eq!(c.intersection(0, 4).unwrap(), int(4));
        assert_eq!(c.intersection_by_pairing(0, 4).unwrap(), int(4));
        // γ₁ meets γ₄ twice: 2 u₁ · (M₁ v₃)
        assert_eq!(c.intersection_shifted(1, 4).unwrap(), int(2));
        assert!(c.intersection(1, 4).is_err());
    }

    #[test]
    fn routes_agree_and_are_positive() {
        let s = k6(20);
        for a in 0..14 {
            for k in a + 4..=23 {
                let v = s.intersection(a, k).unwrap();
                assert!(v.is_positive());
                assert_eq!(v, s.intersection_by_pairing(a, k).unwrap());
                assert_eq!(v, s.intersection(k, a).unwrap());
                if a >= 1 {
                    assert_eq!(v, s.intersection_shifted(a, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn bulk_sweep_matches_pointwise() {
        let s = k6(16);
        let t = s.intersection_table(19).unwrap();
        for k in 0..=19 {
            for a in 0..k {
                match s.intersection(a, k) {
                    Ok(v) => assert_eq!(t.get(a, k).unwrap(), &v),
                    Err(e) => assert_eq!(t.get(a, k).unwrap_err(), e),
                }
            }
        }
    }

    #[test]
    fn marking_sum() {
        let s = k6(16);
        let direct: BigInt = (0..4).map(|b| s.intersection(b, 11).unwrap()).sum();
        assert_eq!(s.marking_intersection(0, 11).unwrap(), direct);
        // recompute each term from the full weight vector of γ₁₁:
        // i(γ₀,γ₁₁) = pair(u₀, w₁₁), i(γ₁,γ₁₁) = pair(u₁, w₁₁)
        let w = s.curve_weights(11).unwrap();
        let via_pair = crate::traintrack::pair(EfficientCurve::Gamma0, &w)
            + crate::traintrack::pair(EfficientCurve::Gamma1, &w)
            + s.intersection_by_pairing(2, 11).unwrap()
            + s.intersection_by_pairing(3, 11).unwrap();
        assert_eq!(s.marking_intersection(0, 11).unwrap(), via_pair);
        assert_eq!(
            s.marking_intersection(0, 6),
            Err(Error::MarkingOutOfRange(0, 6))
        );
        let t = s.intersection_table(12).unwrap();
        assert_eq!(t.marking(11).unwrap(), direct);
        let (v6, flagged) = t.marking_provisional(6).unwrap();
        assert!(flagged);
        assert_eq!(
            v6,
            s.intersection(0, 6).unwrap()
                + s.intersection(1, 6).unwrap()
                + s.intersection(2, 6).unwrap()
                + int(2)
        );
        assert!(!t.marking_provisional(9).unwrap().1);
    }

    #[test]
    fn comparability_at_distance_two_is_two() {
        let s = k6(16);
        for j in 0..10 {
            assert_eq!(s.comparability(j, j + 2).unwrap(), ratio(2, 1));
        }
        assert!(s.comparability(0, 5).is_err());
    }

    #[test]
    fn comparability_is_cauchy() {
        let s = k6(30);
        for j in 0..4 {
            let qs: Vec<f64> = (j + 4..=28)
                .step_by(2)
                .map(|k| crate::numerics::ratio_to_f64(&s.comparability(j, k).unwrap()))
                .collect();
            let diffs: Vec<f64> = qs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            assert!(diffs.windows(2).all(|d| d[1] < d[0]));
        }
    }

    #[test]
    fn growth_for_k_family() {
        let s = k6(30);
        let g = growth_check(&s, &ratio(1, 1000));
        assert_eq!(g.g1_onset, Some(1));
        assert!(g.g1.iter().all(|(_, h)| *h));
        for (i, q) in &g.g2_alpha {
            // K^{1−i}
            assert_eq!(q, &BigRational::new(int(1), BigInt::from(6).pow(*i as u32 - 1)));
        }
        assert!(g.g2_holds());
        assert_eq!(g.g2_alpha_onset, Some(5));
    }

    #[test]
    fn curve_index_labels() {
        assert_eq!(CurveIndex::alpha(3).gamma_index(), 6);
        assert_eq!(CurveIndex::beta(3).gamma_index(), 7);
        assert_eq!(CurveIndex::gamma(7).label(), "beta_3");
        assert_eq!(CurveIndex::gamma(6).parity(), Parity::Alpha);
    }

    #[test]
    fn parallel_products_match() {
        let s = k6(30);
        assert_eq!(s.product(1, 30).unwrap(), s.product_par(1, 30).unwrap());
        let pre = s.prefix_products(true);
        assert_eq!(pre, s.prefix_products(false));
        assert_eq!(pre[9], s.product(1, 10).unwrap());
        assert_eq!(s.product(5, 4).unwrap(), Matrix5::identity());
    }
}
