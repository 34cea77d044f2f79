//! The five-branch train track τ: admissible weights, the twist matrices
//! `M_r`, the normalized pair products `N_i`, and the pairing with the two
//! curves that meet τ efficiently.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{Matrix5, Vector5};

pub type IntVector = Vector5<BigInt>;
pub type IntMatrix = Matrix5<BigInt>;
pub type RatMatrix = Matrix5<BigRational>;

/// `s1 + s4 + s5 = s2 + s3`.
pub fn switch_condition_holds(s: &IntVector) -> bool {
    &s[0] + &s[3] + &s[4] == &s[1] + &s[2]
}

/// Nonnegative, nonzero branch weights satisfying the switch condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(IntVector);

impl WeightVector {
    pub fn new(entries: [BigInt; 5]) -> Result<Self> {
        let v = Vector5::new(entries);
        if !v.is_nonnegative() {
            return Err(Error::InvalidWeights("negative branch weight"));
        }
        if v.iter().all(Zero::is_zero) {
            return Err(Error::InvalidWeights("all weights are zero"));
        }
        if !switch_condition_holds(&v) {
            return Err(Error::InvalidWeights("switch condition violated"));
        }
        Ok(WeightVector(v))
    }

    pub fn from_i64(entries: [i64; 5]) -> Result<Self> {
        Self::new(entries.map(BigInt::from))
    }

    /// Weights of γ₂.
    pub fn v2() -> Self {
        WeightVector(Vector5::new([1, 1, 0, 0, 0].map(BigInt::from)))
    }

    /// Weights of γ₃.
    pub fn v3() -> Self {
        WeightVector(Vector5::new([0, 0, 1, 1, 0].map(BigInt::from)))
    }

    pub fn as_vector(&self) -> &IntVector {
        &self.0
    }

    pub fn into_vector(self) -> IntVector {
        self.0
    }

    pub fn entry(&self, s: usize) -> &BigInt {
        self.0.entry(s)
    }
}

/// The two marking curves that are not carried by τ but cross it efficiently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EfficientCurve {
    Gamma0,
    Gamma1,
}

impl EfficientCurve {
    /// Branch-crossing counts.
    pub fn crossings(self) -> IntVector {
        let u = match self {
            EfficientCurve::Gamma0 => [0, 1, 1, 0, 0],
            EfficientCurve::Gamma1 => [0, 0, 0, 1, 1],
        };
        Vector5::new(u.map(BigInt::from))
    }

    pub fn label(self) -> &'static str {
        match self {
            EfficientCurve::Gamma0 => "γ₀",
            EfficientCurve::Gamma1 => "γ₁",
        }
    }
}

/// Geometric intersection of an efficient curve with a carried measure:
/// twice the crossing/weight dot product.
pub fn pair(u: EfficientCurve, w: &WeightVector) -> BigInt {
    pair_vector(u, w.as_vector())
}

/// [`pair`] on a raw weight vector (e.g. an intermediate product column).
pub fn pair_vector(u: EfficientCurve, w: &IntVector) -> BigInt {
    // u has 0/1 entries, so the dot product is a two-term sum.
    match u {
        EfficientCurve::Gamma0 => (&w[1] + &w[2]) * 2,
        EfficientCurve::Gamma1 => (&w[3] + &w[4]) * 2,
    }
}

/// The matrix of the twist map `φ_r` acting on weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistMatrix {
    r: BigInt,
    matrix: IntMatrix,
}

pub fn twist_matrix(r: &BigInt) -> Result<TwistMatrix> {
    if !r.is_positive() {
        return Err(Error::NonPositiveTwist);
    }
    let two_r: BigInt = r * 2;
    let z = BigInt::zero;
    let o = BigInt::one;
    let matrix = Matrix5::from_rows([
        [z(), z(), z(), &two_r - 1, two_r.clone()],
        [z(), z(), z(), two_r.clone(), &two_r + 1],
        [o(), z(), z(), z(), z()],
        [z(), o(), z(), z(), z()],
        [z(), z(), o(), z(), z()],
    ]);
    Ok(TwistMatrix {
        r: r.clone(),
        matrix,
    })
}

impl TwistMatrix {
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `M_r · w` on a raw column vector, using the sparsity of `M_r`.
    pub fn apply_vector(&self, w: &IntVector) -> IntVector {
        apply_twist(&self.r, w)
    }
}

/// `M_r · w` without materializing the matrix.
pub fn apply_twist(r: &BigInt, w: &IntVector) -> IntVector {
    let two_r: BigInt = r * 2;
    let s45 = &w[3] + &w[4];
    let top = &two_r * &s45;
    Vector5::new([
        &top - &w[3],
        &top + &w[4],
        w[0].clone(),
        w[1].clone(),
        w[2].clone(),
    ])
}

/// `M_r · w`; the result is again admissible.
pub fn apply(m: &TwistMatrix, w: &WeightVector) -> WeightVector {
    let out = m.apply_vector(w.as_vector());
    debug_assert!(switch_condition_holds(&out));
    WeightVector(out)
}

/// `N_i = M_{r_i} M_{r_{i+1}} / (2 r_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedMatrix {
    source: Option<(usize, usize)>,
    matrix: RatMatrix,
}

pub fn normalized_matrix(r_i: &BigInt, r_next: &BigInt) -> Result<NormalizedMatrix> {
    let product = twist_matrix(r_i)?.matrix * twist_matrix(r_next)?.matrix;
    let den: BigInt = r_next * 2;
    Ok(NormalizedMatrix {
        source: None,
        matrix: product.map(|x| BigRational::new(x.clone(), den.clone())),
    })
}

impl NormalizedMatrix {
    pub fn with_source(mut self, i: usize) -> Self {
        self.source = Some((i, i + 1));
        self
    }

    /// Indices `(i, i+1)` of the twist parameters, when known.
    pub fn source(&self) -> Option<(usize, usize)> {
        self.source
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn entry(&self, s: usize, t: usize) -> &BigRational {
        self.matrix.entry(s, t)
    }
}

/// Row vector times `M_r M_{r'}`, written out entrywise.
///
/// Dividing the result by `2r'` gives `x · N`; keeping the division separate
/// lets long products stay in integers with one common denominator.
pub fn row_times_pair(x: &IntVector, r: &BigInt, r_next: &BigInt) -> IntVector {
    let tr: BigInt = r * 2;
    let tn: BigInt = r_next * 2;
    Vector5::new([
        x[4].clone(),
        (&tr - 1) * &x[0] + &tr * &x[1],
        &tr * &x[0] + (&tr + 1) * &x[1],
        (&tn - 1) * &x[2] + &tn * &x[3],
        &tn * &x[2] + (&tn + 1) * &x[3],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, ratio};

    fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
        (1..=5)
            .map(|s| m.row(s).iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    }

    #[test]
    fn m1_matches_display() {
        let m = twist_matrix(&int(1)).unwrap();
        assert_eq!(
            rows(m.matrix()),
            vec![
                vec![0, 0, 0, 1, 2],
                vec![0, 0, 0, 2, 3],
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
            ]
        );
    }

    #[test]
    fn m5_first_row() {
        let m = twist_matrix(&int(5)).unwrap();
        assert_eq!(rows(m.matrix())[0], vec![0, 0, 0, 9, 10]);
    }

    #[test]
    fn lower_block_is_a_shift() {
        for r in [1, 2, 7, 1000] {
            let m = twist_matrix(&int(r)).unwrap();
            for s in 3..=5 {
                for t in 1..=5 {
                    let want = if t == s - 2 { 1 } else { 0 };
                    assert_eq!(m.matrix().entry(s, t), &int(want));
                }
            }
        }
    }

    #[test]
    fn nonpositive_twist_rejected() {
        assert_eq!(twist_matrix(&int(0)), Err(Error::NonPositiveTwist));
        assert_eq!(twist_matrix(&int(-3)), Err(Error::NonPositiveTwist));
        assert_eq!(
            Error::NonPositiveTwist.to_string(),
            "twist power must be positive"
        );
    }

    #[test]
    fn m1_v3() {
        let w = apply(&twist_matrix(&int(1)).unwrap(), &WeightVector::v3());
        assert_eq!(w, WeightVector::from_i64([1, 2, 0, 0, 1]).unwrap());
    }

    #[test]
    fn mr_v3_symbolic() {
        for r in [1i64, 2, 3, 10, 123_456] {
            let w = apply(&twist_matrix(&int(r)).unwrap(), &WeightVector::v3());
            assert_eq!(w, WeightVector::from_i64([2 * r - 1, 2 * r, 0, 0, 1]).unwrap());
        }
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let r = int(17);
        let m = twist_matrix(&r).unwrap();
        let w = Vector5::new([3, 5, 4, 1, 1].map(BigInt::from));
        assert_eq!(m.apply_vector(&w), m.matrix().mul_vector(&w));
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(WeightVector::from_i64([1, 0, 0, 0, 0]).is_err());
        assert!(WeightVector::from_i64([0, 0, 0, 0, 0]).is_err());
        assert!(WeightVector::from_i64([-1, 0, 0, 0, -1]).is_err());
    }

    #[test]
    fn pairing_examples() {
        let w = WeightVector::from_i64([1, 2, 0, 0, 1]).unwrap();
        assert_eq!(pair(EfficientCurve::Gamma0, &w), int(4));
        assert_eq!(pair(EfficientCurve::Gamma1, &w), int(2));
        assert_eq!(pair(EfficientCurve::Gamma0, &WeightVector::v2()), int(2));
        // pair is literally 2·(u·w)
        for u in [EfficientCurve::Gamma0, EfficientCurve::Gamma1] {
            assert_eq!(pair(u, &w), u.crossings().dot(w.as_vector()) * 2);
        }
    }

    #[test]
    fn u1_row_identity() {
        // u₁ᵀ M_r = u₀ᵀ for every r.
        for r in [1, 4, 99] {
            let m = twist_matrix(&int(r)).unwrap();
            assert_eq!(
                EfficientCurve::Gamma1.crossings().mul_matrix(m.matrix()),
                EfficientCurve::Gamma0.crossings()
            );
        }
    }

    #[test]
    fn normalized_examples() {
        let n = normalized_matrix(&int(5), &int(25)).unwrap();
        assert_eq!(n.entry(1, 2), &ratio(9, 50));
        assert_eq!(n.entry(2, 3), &ratio(11, 50));
        assert_eq!(n.entry(5, 1), &ratio(1, 50));
        for (a, b) in [(5, 25), (6, 36), (1, 1), (7, 1000)] {
            let n = normalized_matrix(&int(a), &int(b)).unwrap();
            assert_eq!(n.entry(3, 5), &ratio(1, 1));
            assert_eq!(n.entry(4, 4), &ratio(1, 1));
        }
    }

    #[test]
    fn normalized_matches_display() {
        let (ri, rn) = (int(6), int(36));
        let n = normalized_matrix(&ri, &rn).unwrap();
        let q = |p: i64, d: i64| ratio(p, d);
        let z = || ratio(0, 1);
        let want = Matrix5::from_rows([
            [z(), q(11, 72), q(6, 36), z(), z()],
            [z(), q(6, 36), q(13, 72), z(), z()],
            [z(), z(), z(), q(71, 72), q(1, 1)],
            [z(), z(), z(), q(1, 1), q(73, 72)],
            [q(1, 72), z(), z(), z(), z()],
        ]);
        assert_eq!(n.matrix(), &want);
    }
}
