//! Fixed-size 5×5 linear algebra over any [`Scalar`].
//!
//! The train track has five branches, so every weight vector and every
//! transition matrix in this crate is 5-dimensional. The same code runs over
//! `BigInt` (twist matrices), `BigRational` (normalized products) and `f64`
//! (limit measures).

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_traits::{Num, RefNum, Signed};

pub const DIM: usize = 5;

/// Ring-like scalar usable in matrix products.
pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug {}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + fmt::Debug {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector5<T>(pub [T; DIM]);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix5<T> {
    rows: [[T; DIM]; DIM],
}

impl<T: Scalar> Vector5<T> {
    pub fn new(entries: [T; DIM]) -> Self {
        Vector5(entries)
    }

    pub fn zero() -> Self {
        Vector5(std::array::from_fn(|_| T::zero()))
    }

    pub fn splat(value: T) -> Self {
        Vector5(std::array::from_fn(|_| value.clone()))
    }

    /// 1-based entry, matching the branch labels s₁..s₅.
    pub fn entry(&self, s: usize) -> &T {
        &self.0[s - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> Vector5<U> {
        Vector5(std::array::from_fn(|i| f(&self.0[i])))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| *x >= T::zero())
    }

    pub fn max_entry(&self) -> T {
        let mut best = self.0[0].clone();
        for x in &self.0[1..] {
            if *x > best {
                best = x.clone();
            }
        }
        best
    }

    /// Entrywise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }
}

impl<T: Scalar> Vector5<T>
where
    for<'a> &'a T: RefNum<T>,
{
    pub fn dot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc + a * b;
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        Vector5(std::array::from_fn(|i| &self.0[i] * c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Vector5(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Vector5(std::array::from_fn(|i| &self.0[i] - &other.0[i]))
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    /// Row vector times matrix.
    pub fn mul_matrix(&self, m: &Matrix5<T>) -> Self {
        let mut out = Self::zero();
        for (k, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for c in 0..DIM {
                let e = &m.rows[k][c];
                if !e.is_zero() {
                    out.0[c] = &out.0[c] + &(x * e);
                }
            }
        }
        out
    }
}

impl<T: Scalar + Signed> Vector5<T>
where
    for<'a> &'a T: RefNum<T>,
{
    /// Sup-norm of the difference.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.sub(other).map(|x| x.abs()).max_entry()
    }
}

impl<T> Index<usize> for Vector5<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector5<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: fmt::Debug> fmt::Debug for Vector5<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<T: Scalar> Matrix5<T> {
    pub fn from_rows(rows: [[T; DIM]; DIM]) -> Self {
        Matrix5 { rows }
    }

    pub fn zero() -> Self {
        Matrix5 {
            rows: std::array::from_fn(|_| std::array::from_fn(|_| T::zero())),
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.rows[i][i] = T::one();
        }
        m
    }

    /// 1-based entry `(s, t)`.
    pub fn entry(&self, s: usize, t: usize) -> &T {
        &self.rows[s - 1][t - 1]
    }

    pub fn row(&self, s: usize) -> Vector5<T> {
        Vector5(self.rows[s - 1].clone())
    }

    pub fn column(&self, t: usize) -> Vector5<T> {
        Vector5(std::array::from_fn(|r| self.rows[r][t - 1].clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.rows.iter().flat_map(|r| r.iter())
    }

    pub fn map<U: Scalar, F: FnMut(&T) -> U>(&self, mut f: F) -> Matrix5<U> {
        Matrix5 {
            rows: std::array::from_fn(|r| std::array::from_fn(|c| f(&self.rows[r][c]))),
        }
    }

    pub fn max_entry(&self) -> T {
        let mut it = self.entries();
        let mut best = it.next().cloned().unwrap_or_else(T::zero);
        for x in it {
            if *x > best {
                best = x.clone();
            }
        }
        best
    }

    /// Sum of the entries `(s, t)` over `s ∈ rows`, `t ∈ cols` (1-based).
    pub fn block_sum(&self, rows: &[usize], cols: &[usize]) -> T {
        let mut acc = T::zero();
        for &s in rows {
            for &t in cols {
                acc = acc + self.entry(s, t).clone();
            }
        }
        acc
    }
}

impl<T: Scalar> Matrix5<T>
where
    for<'a> &'a T: RefNum<T>,
{
    pub fn mul_vector(&self, v: &Vector5<T>) -> Vector5<T> {
        Vector5(std::array::from_fn(|r| Vector5(self.rows[r].clone()).dot(v)))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x * c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Matrix5 {
            rows: std::array::from_fn(|r| {
                std::array::from_fn(|c| &self.rows[r][c] - &other.rows[r][c])
            }),
        }
    }

    fn product(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for r in 0..DIM {
            out.rows[r] = Vector5(self.rows[r].clone()).mul_matrix(rhs).0;
        }
        out
    }
}

impl<T: Scalar> Mul for &Matrix5<T>
where
    for<'a> &'a T: RefNum<T>,
{
    type Output = Matrix5<T>;
    fn mul(self, rhs: &Matrix5<T>) -> Matrix5<T> {
        self.product(rhs)
    }
}

impl<T: Scalar> Mul for Matrix5<T>
where
    for<'a> &'a T: RefNum<T>,
{
    type Output = Matrix5<T>;
    fn mul(self, rhs: Matrix5<T>) -> Matrix5<T> {
        self.product(&rhs)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix5<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for r in &self.rows {
            l.entry(r);
        }
        l.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn int(rows: [[i64; 5]; 5]) -> Matrix5<BigInt> {
        Matrix5::from_rows(rows.map(|r| r.map(BigInt::from)))
    }

    #[test]
    fn identity_is_neutral() {
        let a = int([
            [0, 0, 0, 1, 2],
            [0, 0, 0, 2, 3],
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0],
        ]);
        assert_eq!(&a * &Matrix5::identity(), a);
        assert_eq!(&Matrix5::<BigInt>::identity() * &a, a);
    }

    #[test]
    fn row_vector_product_matches_matrix_product() {
        let a = int([
            [1, 2, 0, 0, 3],
            [0, 1, 0, 4, 0],
            [5, 0, 1, 0, 0],
            [0, 0, 0, 1, 7],
            [2, 0, 3, 0, 1],
        ]);
        let x = Vector5([1, 0, 2, 3, 4].map(BigInt::from));
        let via_rows = x.mul_matrix(&a);
        let expect: Vec<BigInt> = (1..=5).map(|t| x.dot(&a.column(t))).collect();
        assert_eq!(via_rows.0.to_vec(), expect);
    }

    #[test]
    fn f64_instantiation() {
        let m = Matrix5::<f64>::identity().scale(&2.0);
        let v = Vector5([1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m.mul_vector(&v).0, [2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(v.sup_distance(&Vector5::zero()), 5.0);
    }
}
