//! High-precision dense symmetric linear algebra: Cholesky, cyclic Jacobi
//! eigendecomposition, and the precision ladder for tiny eigenvalues.

use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{pow2, zero, MAX_PRECISION_BITS};
use crate::matrix::{norm2, RealMatrix};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 40;
/// First rung of the precision ladder.
pub const LADDER_START_BITS: u32 = 128;
/// Relative agreement required between consecutive ladder rungs.
pub const LADDER_RELTOL: f64 = 1e-6;

/// Lower-triangular `L` with `L Lᵀ = M`.
///
/// Fails with the index of the first non-positive pivot. When `M` is a Gram
/// matrix that pivot is where the working precision ran out.
pub fn cholesky(m: &RealMatrix) -> Result<RealMatrix> {
    assert!(m.is_square(), "cholesky of a non-square matrix");
    let n = m.rows();
    let bits = m.bits();
    let mut l = RealMatrix::zeros(n, n, bits);
    for j in 0..n {
        let mut d = m[(j, j)].clone();
        for k in 0..j {
            d -= Float::with_val(bits, l[(j, k)].square_ref());
        }
        if d <= 0 || d.is_nan() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        for i in j + 1..n {
            let mut s = m[(i, j)].clone();
            for k in 0..j {
                s -= Float::with_val(bits, &l[(i, k)] * &l[(j, k)]);
            }
            l[(i, j)] = s / &d;
        }
        l[(j, j)] = d;
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &RealMatrix, b: &[Float]) -> Vec<Float> {
    let n = l.rows();
    let bits = l.bits();
    let mut y: Vec<Float> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = Float::with_val(bits, &b[i]);
        for (k, yk) in y.iter().enumerate() {
            s -= Float::with_val(bits, &l[(i, k)] * yk);
        }
        y.push(s / &l[(i, i)]);
    }
    let mut x = vec![zero(bits); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for k in i + 1..n {
            s -= Float::with_val(bits, &l[(k, i)] * &x[k]);
        }
        x[i] = s / &l[(i, i)];
    }
    x
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &RealMatrix) -> RealMatrix {
    let n = l.rows();
    let bits = l.bits();
    let mut inv = RealMatrix::zeros(n, n, bits);
    for j in 0..n {
        inv[(j, j)] = Float::with_val(bits, 1) / &l[(j, j)];
        for i in j + 1..n {
            let mut s = zero(bits);
            for k in j..i {
                s += Float::with_val(bits, &l[(i, k)] * &inv[(k, j)]);
            }
            inv[(i, j)] = -s / &l[(i, i)];
        }
    }
    inv
}

/// Symmetric eigendecomposition with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<Float>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: RealMatrix,
    pub sweeps: usize,
    /// `max|λ| / min|λ|`; multiplies `2^{-bits/2}` in the relative accuracy estimate.
    pub condition: Float,
    pub bits: u32,
}

impl SymmetricEigen {
    pub fn min_value(&self) -> &Float {
        &self.values[0]
    }

    pub fn min_vector(&self) -> Vec<Float> {
        self.vectors.column(0)
    }

    /// Estimated relative error `2^{-bits/2} κ` of each eigenvalue.
    pub fn relative_error_estimate(&self) -> Float {
        pow2(self.bits, -(self.bits as i32) / 2) * &self.condition
    }
}

/// Cyclic two-sided Jacobi on a real symmetric matrix.
///
/// The off-diagonal test `|a_pq| <= tol * sqrt(|a_pp a_qq|)` is the one that
/// preserves relative accuracy of small eigenvalues of positive definite input.
pub fn symmetric_eigen(m: &RealMatrix) -> Result<SymmetricEigen> {
    assert!(m.is_square(), "eigendecomposition of a non-square matrix");
    let n = m.rows();
    let bits = m.bits();
    let mut a = m.clone();
    let mut v = RealMatrix::identity(n, bits);
    let tol = pow2(bits, -(bits as i32) + 4);
    let floor = m.frobenius_norm() * pow2(bits, -(bits as i32)) / (n.max(1) as u32);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)].clone();
                if apq.is_zero() {
                    continue;
                }
                let scale = Float::with_val(bits, &a[(p, p)] * &a[(q, q)]).abs().sqrt() * &tol;
                let mag = Float::with_val(bits, apq.abs_ref());
                if mag <= scale || mag <= floor {
                    continue;
                }
                rotated = true;
                let theta = Float::with_val(bits, &a[(q, q)] - &a[(p, p)]) / (Float::with_val(bits, &apq) * 2u32);
                let t = if theta.is_zero() {
                    Float::with_val(bits, 1)
                } else {
                    let denom = Float::with_val(bits, theta.abs_ref())
                        + (Float::with_val(bits, theta.square_ref()) + 1u32).sqrt();
                    let t = Float::with_val(bits, 1) / denom;
                    if theta.is_sign_negative() { -t } else { t }
                };
                let c = Float::with_val(bits, 1) / (Float::with_val(bits, t.square_ref()) + 1u32).sqrt();
                let s = Float::with_val(bits, &t * &c);

                let shift = Float::with_val(bits, &t * &apq);
                a[(p, p)] -= &shift;
                a[(q, q)] += &shift;
                a[(p, q)] = zero(bits);
                a[(q, p)] = zero(bits);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[(r, p)].clone();
                    let h = a[(r, q)].clone();
                    let rp = Float::with_val(bits, &c * &g) - Float::with_val(bits, &s * &h);
                    let rq = Float::with_val(bits, &s * &g) + Float::with_val(bits, &c * &h);
                    a[(p, r)] = rp.clone();
                    a[(r, p)] = rp;
                    a[(q, r)] = rq.clone();
                    a[(r, q)] = rq;
                }
                for r in 0..n {
                    let g = v[(r, p)].clone();
                    let h = v[(r, q)].clone();
                    v[(r, p)] = Float::with_val(bits, &c * &g) - Float::with_val(bits, &s * &h);
                    v[(r, q)] = Float::with_val(bits, &s * &g) + Float::with_val(bits, &c * &h);
                }
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values: Vec<Float> = order.iter().map(|&i| a[(i, i)].clone()).collect();
    let vectors = RealMatrix::from_fn(n, n, bits, |r, k| v[(r, order[k])].clone());

    let mut max_abs = zero(bits);
    let mut min_abs: Option<Float> = None;
    for x in &values {
        let ax = Float::with_val(bits, x.abs_ref());
        if ax > max_abs {
            max_abs = ax.clone();
        }
        if min_abs.as_ref().is_none_or(|m| ax < *m) {
            min_abs = Some(ax);
        }
    }
    let condition = match min_abs {
        Some(m) if !m.is_zero() => max_abs / m,
        Some(_) => Float::with_val(bits, rug::float::Special::Infinity),
        None => Float::with_val(bits, 1),
    };

    Ok(SymmetricEigen { values, vectors, sweeps, condition, bits })
}

/// Smallest eigenpair certified by the precision ladder.
#[derive(Clone, Debug)]
pub struct MinEig {
    pub value: Float,
    pub vector: Vec<Float>,
    /// Rung whose result was confirmed by the next rung.
    pub bits_used: u32,
    /// Every rung evaluated, as `(bits, λ_min)`.
    pub history: Vec<(u32, Float)>,
}

/// Smallest eigenvalue of a matrix that can be rebuilt exactly at any
/// precision, starting the ladder at 128 bits.
pub fn min_eig_adaptive<F>(build: F, reltol: f64) -> Result<MinEig>
where
    F: Fn(u32) -> Result<RealMatrix>,
{
    min_eig_adaptive_from(build, reltol, LADDER_START_BITS)
}

/// Precision ladder starting at `start_bits`.
///
/// A rung `b` is accepted when its own error estimate `2^{-b/2} κ` is below
/// `reltol` and the rung `2b` reproduces `λ_min` to relative `reltol`. The
/// returned eigenpair is the one computed at rung `b`.
pub fn min_eig_adaptive_from<F>(build: F, reltol: f64, start_bits: u32) -> Result<MinEig>
where
    F: Fn(u32) -> Result<RealMatrix>,
{
    let mut bits = start_bits.max(64);
    let mut history = Vec::new();
    let mut prev: Option<SymmetricEigen> = None;
    loop {
        let eig = match build(bits).and_then(|m| symmetric_eigen(&m)) {
            Ok(e) => Some(e),
            Err(Error::NoConvergence { .. }) => None,
            Err(e) => return Err(e),
        };
        if let Some(eig) = &eig {
            history.push((bits, eig.min_value().clone()));
        }
        if let (Some(p), Some(cur)) = (&prev, &eig) {
            let trusted = p.relative_error_estimate() <= reltol;
            let diff = crate::hp::rel_diff(p.min_value(), cur.min_value());
            if trusted && diff <= reltol {
                let mut vector = p.min_vector();
                normalize_sign(&mut vector);
                return Ok(MinEig {
                    value: p.min_value().clone(),
                    vector,
                    bits_used: p.bits,
                    history,
                });
            }
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::PrecisionCap { bits });
        }
        prev = eig;
        bits = (bits * 2).min(MAX_PRECISION_BITS);
    }
}

/// Flips the sign so the first entry of largest magnitude is positive.
pub fn normalize_sign(v: &mut [Float]) {
    let Some(bits) = v.first().map(Float::prec) else { return };
    let mut best = 0;
    let mut best_abs = zero(bits);
    for (i, x) in v.iter().enumerate() {
        let a = Float::with_val(bits, x.abs_ref());
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if v[best].is_sign_negative() {
        for x in v.iter_mut() {
            *x = -x.clone();
        }
    }
}

/// Rescales to unit Euclidean norm.
pub fn normalize(v: &mut [Float]) {
    let n = norm2(v);
    if n.is_zero() {
        return;
    }
    for x in v.iter_mut() {
        *x /= &n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::rel_diff;

    fn m(rows: usize, vals: &[f64], bits: u32) -> RealMatrix {
        RealMatrix::from_f64(rows, rows, bits, vals)
    }

    #[test]
    fn cholesky_identity_and_two_by_two() {
        let id = RealMatrix::identity(4, 128);
        assert_eq!(cholesky(&id).unwrap(), id);

        let g = 0.983632;
        let l = cholesky(&m(2, &[1.0, g, g, 1.0], 128)).unwrap();
        assert_eq!(l[(0, 0)], 1);
        assert!((l[(1, 0)].to_f64() - g).abs() < 1e-15);
        assert!((l[(1, 1)].to_f64() - (1.0 - g * g).sqrt()).abs() < 1e-15);
        assert!(l[(0, 1)].is_zero());
    }

    #[test]
    fn cholesky_reports_failing_pivot() {
        let err = cholesky(&m(2, &[1.0, 2.0, 2.0, 1.0], 128)).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { pivot: 1 });
        let err = cholesky(&m(2, &[-1.0, 0.0, 0.0, 1.0], 128)).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { pivot: 0 });
    }

    #[test]
    fn cholesky_solve_recovers_rhs() {
        let a = m(3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0], 128);
        let l = cholesky(&a).unwrap();
        let x_true: Vec<Float> = [1.0, -2.0, 0.5].iter().map(|&v| Float::with_val(128, v)).collect();
        let b = a.matvec(&x_true);
        let x = cholesky_solve(&l, &b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!(Float::with_val(128, u - v).abs() < 1e-35);
        }
        let li = lower_inverse(&l);
        let prod = li.matmul(&l);
        assert!(prod.sub(&RealMatrix::identity(3, 128)).max_abs() < 1e-35);
    }

    #[test]
    fn eigen_of_diagonal_sorts_with_permutation() {
        let e = symmetric_eigen(&m(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0], 128)).unwrap();
        let vals: Vec<f64> = e.values.iter().map(Float::to_f64).collect();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[(1, 0)], 1);
        assert_eq!(e.vectors[(2, 1)], 1);
        assert_eq!(e.vectors[(0, 2)], 1);
    }

    #[test]
    fn eigen_two_by_two_closed_form() {
        let g = 0.983632;
        let e = symmetric_eigen(&m(2, &[1.0, g, g, 1.0], 256)).unwrap();
        assert!((e.values[0].to_f64() - (1.0 - g)).abs() < 1e-15);
        assert!((e.values[1].to_f64() - (1.0 + g)).abs() < 1e-15);
        let v = e.min_vector();
        assert!((v[0].to_f64().abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(v[0].to_f64() * v[1].to_f64() < 0.0);
    }

    #[test]
    fn eigen_reconstruction_and_orthogonality() {
        let bits = 256;
        let a = RealMatrix::from_fn(6, 6, bits, |i, j| {
            Float::with_val(bits, 1) / Float::with_val(bits, i + j + 1)
        });
        let e = symmetric_eigen(&a).unwrap();
        let lam = RealMatrix::from_fn(6, 6, bits, |i, j| if i == j { e.values[i].clone() } else { zero(bits) });
        let rec = e.vectors.matmul(&lam).matmul(&e.vectors.transpose());
        let tol = pow2(bits, -(bits as i32) / 2) * a.frobenius_norm();
        assert!(rec.sub(&a).frobenius_norm() <= tol);
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.sub(&RealMatrix::identity(6, bits)).frobenius_norm() <= pow2(bits, -(bits as i32) / 2));
        // Hilbert 6x6 smallest eigenvalue, 1.0827994845e-7.
        assert!((e.values[0].to_f64() / 1.0827994845e-7 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cholesky_diagonal_product_matches_eigen_product() {
        let bits = 256;
        let a = RealMatrix::from_fn(5, 5, bits, |i, j| {
            Float::with_val(bits, 1) / Float::with_val(bits, i + j + 1)
        });
        let l = cholesky(&a).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        let mut p1 = Float::with_val(bits, 1);
        let mut p2 = Float::with_val(bits, 1);
        for i in 0..5 {
            p1 *= Float::with_val(bits, l[(i, i)].square_ref());
            p2 *= &e.values[i];
        }
        assert!(rel_diff(&p1, &p2) <= pow2(bits, -(bits as i32) / 4));
    }

    #[test]
    fn ladder_trivial_matrix_stops_at_first_rung() {
        let r = min_eig_adaptive(|b| Ok(RealMatrix::identity(1, b)), LADDER_RELTOL).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.vector.len(), 1);
        assert_eq!(r.vector[0], 1);
        assert_eq!(r.bits_used, 128);
    }

    #[test]
    fn ladder_climbs_for_ill_conditioned_input() {
        // Hilbert 12x12 has λ_min ≈ 1.048e-16 and κ ≈ 1.7e16.
        let build = |b: u32| {
            Ok(RealMatrix::from_fn(12, 12, b, |i, j| Float::with_val(b, 1) / Float::with_val(b, i + j + 1)))
        };
        let r = min_eig_adaptive_from(build, LADDER_RELTOL, 64).unwrap();
        assert!(r.bits_used > 64);
        assert!((r.value.to_f64() / 1.0479463979622267e-16 - 1.0).abs() < 1e-6);
    }
}
