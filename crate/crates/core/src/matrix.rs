//! Dense real matrices over [`rug::Float`].

use std::ops::{Index, IndexMut};

use rug::Float;

use crate::hp::zero;

#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    bits: u32,
    data: Vec<Float>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize, bits: u32) -> Self {
        Self { rows, cols, bits, data: vec![zero(bits); rows * cols] }
    }

    pub fn identity(n: usize, bits: u32) -> Self {
        let mut m = Self::zeros(n, n, bits);
        for i in 0..n {
            m[(i, i)] = Float::with_val(bits, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, bits: u32, mut f: impl FnMut(usize, usize) -> Float) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(Float::with_val(bits, f(i, j)));
            }
        }
        Self { rows, cols, bits, data }
    }

    pub fn from_f64(rows: usize, cols: usize, bits: u32, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, bits, |i, j| Float::with_val(bits, values[i * cols + j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Float] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Float> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.bits, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let bits = self.bits.max(rhs.bits);
        Self::from_fn(self.rows, rhs.cols, bits, |i, j| {
            let mut acc = zero(bits);
            for k in 0..self.cols {
                acc += Float::with_val(bits, &self[(i, k)] * &rhs[(k, j)]);
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[Float]) -> Vec<Float> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = zero(self.bits);
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += Float::with_val(self.bits, a * b);
                }
                acc
            })
            .collect()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[Float]) -> Float {
        dot(v, &self.matvec(v))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, self.bits, |i, j| {
            Float::with_val(self.bits, &self[(i, j)] - &rhs[(i, j)])
        })
    }

    pub fn frobenius_norm(&self) -> Float {
        let mut acc = zero(self.bits);
        for x in &self.data {
            acc += Float::with_val(self.bits, x.square_ref());
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Float {
        let mut m = zero(self.bits);
        for x in &self.data {
            let a = Float::with_val(self.bits, x.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Principal submatrix on the given row/column indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), self.bits, |i, j| self[(idx[i], idx[j])].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Float::to_f64).collect()).collect()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = Float;
    fn index(&self, (i, j): (usize, usize)) -> &Float {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[Float], b: &[Float]) -> Float {
    let bits = a.first().map_or(64, Float::prec);
    let mut acc = zero(bits);
    for (x, y) in a.iter().zip(b) {
        acc += Float::with_val(bits, x * y);
    }
    acc
}

pub fn norm2(a: &[Float]) -> Float {
    dot(a, a).sqrt()
}
