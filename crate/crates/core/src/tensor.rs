//! Dense operators on `V^{⊗n}` with `V = C²`.
//!
//! Basis convention: leg 1 is the most significant tensor index. A basis
//! vector `v_{a_1} ⊗ … ⊗ v_{a_n}` (with `a_l ∈ {1, 2}`) sits at row/column
//! `Σ (a_l − 1)·2^{n−l}`.

use std::fmt;

use crate::algebra::{Rat, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct TensorMat<S> {
    n_legs: usize,
    dim: usize,
    data: Vec<S>,
}

/// Location and value of the first nonzero entry of a residual matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual<S> {
    pub row: usize,
    pub col: usize,
    pub value: S,
}

/// Bit of leg `leg` (1-based) inside a basis index on `n` legs.
#[inline]
pub fn leg_bit(index: usize, n: usize, leg: usize) -> usize {
    (index >> (n - leg)) & 1
}

#[inline]
fn with_leg_bit(index: usize, n: usize, leg: usize, bit: usize) -> usize {
    let shift = n - leg;
    (index & !(1 << shift)) | (bit << shift)
}

impl<S: Scalar> TensorMat<S> {
    pub fn zeros(n_legs: usize) -> Self {
        let dim = 1usize << n_legs;
        TensorMat { n_legs, dim, data: vec![S::zero(); dim * dim] }
    }

    pub fn identity(n_legs: usize) -> Self {
        let mut m = Self::zeros(n_legs);
        for i in 0..m.dim {
            m.data[i * m.dim + i] = S::one();
        }
        m
    }

    pub fn from_fn(n_legs: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let dim = 1usize << n_legs;
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        TensorMat { n_legs, dim, data }
    }

    /// Row-major entries; `rows.len()` must be `2^n_legs`.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if !dim.is_power_of_two() || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!("{dim} rows do not form a 2^n square")));
        }
        let n_legs = dim.trailing_zeros() as usize;
        Ok(TensorMat { n_legs, dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn n_legs(&self) -> usize {
        self.n_legs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: S) {
        self.data[row * self.dim + col] = v;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TensorMat<T> {
        TensorMat { n_legs: self.n_legs, dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.n_legs != rhs.n_legs {
            return Err(Error::DimensionMismatch(format!(
                "operators on {} and {} legs",
                self.n_legs, rhs.n_legs
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        let d = self.dim;
        let mut out = vec![S::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.data[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &rhs.data[k * d + j];
                    if !b.is_zero() {
                        out[i * d + j] = out[i * d + j].add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        Ok(TensorMat { n_legs: self.n_legs, dim: d, data: out })
    }

    /// Matrix product; panics on mismatched leg counts.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("operator product")
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_same_shape(rhs).expect("operator sum");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.add_ref(b)).collect();
        TensorMat { n_legs: self.n_legs, dim: self.dim, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_same_shape(rhs).expect("operator difference");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub_ref(b)).collect();
        TensorMat { n_legs: self.n_legs, dim: self.dim, data }
    }

    pub fn scale(&self, c: &S) -> Self {
        let data = self.data.iter().map(|a| a.mul_ref(c)).collect();
        TensorMat { n_legs: self.n_legs, dim: self.dim, data }
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} on dimension {}", v.len(), self.dim)));
        }
        Ok((0..self.dim)
            .map(|i| {
                (0..self.dim).fold(S::zero(), |acc, j| {
                    let a = &self.data[i * self.dim + j];
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc.add_ref(&a.mul_ref(&v[j]))
                    }
                })
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.first_nonzero_residual(&Self::identity(self.n_legs)).is_none()
    }

    /// First entry (row-major) where `self − rhs` is nonzero.
    pub fn first_nonzero_residual(&self, rhs: &Self) -> Option<Residual<S>> {
        if self.n_legs != rhs.n_legs {
            return Some(Residual { row: 0, col: 0, value: S::one() });
        }
        self.data.iter().zip(&rhs.data).enumerate().find_map(|(k, (a, b))| {
            let d = a.sub_ref(b);
            (!d.is_zero()).then(|| Residual { row: k / self.dim, col: k % self.dim, value: d })
        })
    }

    /// `Some(c)` when the operator equals `c·I`.
    pub fn as_scalar(&self) -> Option<S> {
        let c = self.get(0, 0).clone();
        self.first_nonzero_residual(&Self::identity(self.n_legs).scale(&c)).is_none().then_some(c)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_legs, |r, c| self.get(c, r).clone())
    }

    /// Transpose of the indices of one leg only.
    pub fn partial_transpose(&self, leg: usize) -> Result<Self> {
        let n = self.n_legs;
        if leg == 0 || leg > n {
            return Err(Error::BadLegIndex { leg, n_legs: n });
        }
        Ok(Self::from_fn(n, |r, c| {
            let (rb, cb) = (leg_bit(r, n, leg), leg_bit(c, n, leg));
            self.get(with_leg_bit(r, n, leg, cb), with_leg_bit(c, n, leg, rb)).clone()
        }))
    }

    /// Places a two-leg operator on legs `(i, j)` of `n` legs: the first tensor
    /// slot of `m` acts on leg `i`, the second on leg `j`, identity elsewhere.
    /// Built directly by index arithmetic for either orientation.
    pub fn embed(&self, n: usize, i: usize, j: usize) -> Result<Self> {
        if self.n_legs != 2 {
            return Err(Error::DimensionMismatch(format!("embed expects a 2-leg operator, got {} legs", self.n_legs)));
        }
        for leg in [i, j] {
            if leg == 0 || leg > n {
                return Err(Error::BadLegIndex { leg, n_legs: n });
            }
        }
        if i == j {
            return Err(Error::BadLegIndex { leg: j, n_legs: n });
        }
        let mask = (1usize << (n - i)) | (1usize << (n - j));
        Ok(Self::from_fn(n, |r, c| {
            if (r & !mask) != (c & !mask) {
                return S::zero();
            }
            let lr = 2 * leg_bit(r, n, i) + leg_bit(r, n, j);
            let lc = 2 * leg_bit(c, n, i) + leg_bit(c, n, j);
            self.get(lr, lc).clone()
        }))
    }

    /// Places a one-leg operator on leg `i` of `n` legs.
    pub fn embed_single(&self, n: usize, i: usize) -> Result<Self> {
        if self.n_legs != 1 {
            return Err(Error::DimensionMismatch("embed_single expects a 1-leg operator".into()));
        }
        if i == 0 || i > n {
            return Err(Error::BadLegIndex { leg: i, n_legs: n });
        }
        let mask = 1usize << (n - i);
        Ok(Self::from_fn(n, |r, c| {
            if (r & !mask) != (c & !mask) {
                S::zero()
            } else {
                self.get(leg_bit(r, n, i), leg_bit(c, n, i)).clone()
            }
        }))
    }

    /// Kronecker product `self ⊗ rhs` (legs of `self` first).
    pub fn kron(&self, rhs: &Self) -> Self {
        let n = self.n_legs + rhs.n_legs;
        let d2 = rhs.dim;
        Self::from_fn(n, |r, c| self.get(r / d2, c / d2).mul_ref(rhs.get(r % d2, c % d2)))
    }

    /// The `2^{n-1} × 2^{n-1}` block of leg 1 at `(alpha, beta)` ∈ {0,1}².
    pub fn leg1_block(&self, alpha: usize, beta: usize) -> Self {
        let half = self.dim / 2;
        Self::from_fn(self.n_legs - 1, |r, c| self.get(alpha * half + r, beta * half + c).clone())
    }

    /// Inverse by Gauss–Jordan elimination. A pivot must be a unit of the ring;
    /// for ħ-series this means an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.rows();
        let mut inv = Self::identity(self.n_legs).rows();
        for col in 0..d {
            let (p, pinv) = (col..d)
                .find_map(|r| a[r][col].inverse().map(|x| (r, x)))
                .ok_or_else(|| Error::SingularOperator(format!("no invertible pivot in column {col}")))?;
            a.swap(col, p);
            inv.swap(col, p);
            for k in 0..d {
                a[col][k] = a[col][k].mul_ref(&pinv);
                inv[col][k] = inv[col][k].mul_ref(&pinv);
            }
            for r in 0..d {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for k in 0..d {
                    if !a[col][k].is_zero() {
                        a[r][k] = a[r][k].sub_ref(&f.mul_ref(&a[col][k]));
                    }
                    if !inv[col][k].is_zero() {
                        inv[r][k] = inv[r][k].sub_ref(&f.mul_ref(&inv[col][k]));
                    }
                }
            }
        }
        Ok(TensorMat { n_legs: self.n_legs, dim: d, data: inv.into_iter().flatten().collect() })
    }

    /// Solves `self · x = v`.
    pub fn solve(&self, v: &[S]) -> Result<Vec<S>> {
        self.inverse()?.apply(v)
    }
}

impl TensorMat<Rat> {
    pub fn lift<S: Scalar>(&self) -> TensorMat<S> {
        self.map(S::from_rat)
    }
}

impl<S: Scalar> fmt::Debug for TensorMat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TensorMat({} legs)", self.n_legs)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat_mat(rows: &[&[i64]]) -> TensorMat<Rat> {
        TensorMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn embed_bad_legs() {
        let m = TensorMat::<Rat>::identity(2);
        assert_eq!(m.embed(3, 0, 1).unwrap_err(), Error::BadLegIndex { leg: 0, n_legs: 3 });
        assert_eq!(m.embed(3, 1, 4).unwrap_err(), Error::BadLegIndex { leg: 4, n_legs: 3 });
        assert!(m.embed(3, 2, 2).is_err());
        assert!(m.partial_transpose(3).is_err());
    }

    #[test]
    fn embed_single_and_kron_agree() {
        let x = rat_mat(&[&[1, 2], &[3, 4]]);
        let i1 = TensorMat::<Rat>::identity(1);
        assert_eq!(x.embed_single(2, 1).unwrap(), x.kron(&i1));
        assert_eq!(x.embed_single(2, 2).unwrap(), i1.kron(&x));
    }

    #[test]
    fn inverse_round_trip() {
        let m = rat_mat(&[&[2, 1, 0, 0], &[0, 1, 0, 3], &[1, 0, 1, 0], &[0, 0, 2, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = rat_mat(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(matches!(sing.inverse().unwrap_err(), Error::SingularOperator(_)));
    }

    #[test]
    fn leg_blocks() {
        let m = rat_mat(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 10, 11, 12], &[13, 14, 15, 16]]);
        assert_eq!(m.leg1_block(0, 1), rat_mat(&[&[3, 4], &[7, 8]]));
        assert_eq!(m.leg1_block(1, 0), rat_mat(&[&[9, 10], &[13, 14]]));
    }
}
