//! Exact rational matrices for the small-`y` limit: the Hilbert matrix, the
//! last row of the inverse Vandermonde matrix, and the rank-one limiting pencil.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::hp::{from_rational, pi};
use crate::system::SupportSet;

/// Dense square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| Rational::from(u32::from(i == j)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        &mut self.data[i * self.n + j]
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |i, j| {
            let mut acc = Rational::new();
            for k in 0..self.n {
                acc += Rational::from(self.get(i, k) * rhs.get(k, j));
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                let mut acc = Rational::new();
                for (k, vk) in v.iter().enumerate() {
                    acc += Rational::from(self.get(i, k) * vk);
                }
                acc
            })
            .collect()
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| *a.get(r, col) != 0)
                .ok_or_else(|| Error::Singular(format!("zero pivot in column {col}")))?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                *a.get_mut(col, j) /= &p;
                *inv.get_mut(col, j) /= &p;
            }
            for r in 0..n {
                if r == col || *a.get(r, col) == 0 {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let da = Rational::from(&factor * a.get(col, j));
                    *a.get_mut(r, j) -= da;
                    let di = Rational::from(&factor * inv.get(col, j));
                    *inv.get_mut(r, j) -= di;
                }
            }
        }
        Ok(inv)
    }

    pub fn to_float(&self, bits: u32) -> crate::matrix::RealMatrix {
        crate::matrix::RealMatrix::from_fn(self.n, self.n, bits, |i, j| from_rational(bits, self.get(i, j)))
    }
}

/// `(n+1)×(n+1)` Hilbert matrix `H_{ij} = 1/(i+j+1)`.
pub fn hilbert_matrix(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n + 1, |i, j| Rational::from((1, (i + j + 1) as u32)))
}

/// Last row `m` of the inverse of the Vandermonde matrix `V_{ij} = τ_i^j`, i.e. the
/// solution of `Σ_j m_j τ_j^i = δ_{i,n}` for `i = 0..n`, solved exactly.
pub fn vandermonde_lastrow(taus: &[i64]) -> Result<Vec<Rational>> {
    let n1 = taus.len();
    if n1 == 0 {
        return Err(Error::InvalidSupport("empty support".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    if !taus.iter().all(|t| seen.insert(*t)) {
        return Err(Error::Singular("duplicate offsets in Vandermonde system".into()));
    }
    // Columns of this matrix are the rows of V, so `m` is its last inverse column.
    let vander = RationalMatrix::from_fn(n1, |i, j| Rational::from(Integer::from(taus[j]).pow(i as u32)));
    let inv = vander.inverse()?;
    Ok((0..n1).map(|j| inv.get(j, n1 - 1).clone()).collect())
}

/// `|m_j| = Π_{i≠j} 1/|τ_i − τ_j|` from the Vieta closed form; used only to
/// cross-check magnitudes of [`vandermonde_lastrow`].
pub fn vieta_magnitudes(taus: &[i64]) -> Vec<Rational> {
    (0..taus.len())
        .map(|j| {
            let mut prod = Integer::from(1);
            for (i, t) in taus.iter().enumerate() {
                if i != j {
                    prod *= Integer::from(t - taus[j]).abs();
                }
            }
            Rational::from((Integer::from(1), prod))
        })
        .collect()
}

/// Ingredients and value of the rank-one limiting pencil `H_n − μ c_n m mᵀ`.
#[derive(Clone, Debug)]
pub struct PencilData {
    pub n: usize,
    pub hilbert: RationalMatrix,
    pub hilbert_inverse: RationalMatrix,
    pub m: Vec<Rational>,
    /// `mᵀ H_n⁻¹ m`, exact.
    pub quadratic: Rational,
    /// `(2π)^{2n} / (n!)²`.
    pub c_n: Float,
    /// `1 / (c_n mᵀ H_n⁻¹ m)`.
    pub mu: Float,
}

/// Finite generalized eigenvalue of the limiting pencil for support `T`, `|T| = n + 1 ≥ 2`.
pub fn pencil_mu(support: &SupportSet, bits: u32) -> Result<PencilData> {
    if support.len() < 2 {
        return Err(Error::InvalidSupport("pencil needs at least two offsets".into()));
    }
    let n = support.len() - 1;
    let m = vandermonde_lastrow(support.offsets())?;
    let hilbert = hilbert_matrix(n);
    let hilbert_inverse = hilbert.inverse()?;
    let hm = hilbert_inverse.matvec(&m);
    let mut quadratic = Rational::new();
    for (a, b) in m.iter().zip(&hm) {
        quadratic += Rational::from(a * b);
    }
    let factorial = Integer::from(Integer::factorial(n as u32));
    let two_pi_pow = (pi(bits) * 2u32).pow(2 * n as u32);
    let c_n = two_pi_pow / Float::with_val(bits, Integer::from(&factorial * &factorial));
    let mu = Float::with_val(bits, 1) / (Float::with_val(bits, &c_n) * from_rational(bits, &quadratic));
    Ok(PencilData { n, hilbert, hilbert_inverse, m, quadratic, c_n, mu })
}
