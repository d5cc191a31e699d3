use rand::Rng;
use rand_distr::StandardNormal;
use rug::Float;

use super::quadrature::arc_inner_product;
use crate::error::Result;
use crate::hp::{real, HpComplex};
use crate::linalg::{cholesky, lower_inverse};
use crate::matrix::RealMatrix;
use crate::system::{build_gram, complex_quadratic_form, SupportSet, SystemParams};

/// Horner evaluation of `Σ a_k z^k` (ascending coefficients).
pub fn eval_poly(coeffs: &[HpComplex], z: &HpComplex) -> HpComplex {
    let mut acc = HpComplex::zero(z.prec());
    for a in coeffs.iter().rev() {
        acc = &(&acc * z) + a;
    }
    acc
}

/// Orthonormal polynomials for the arc inner product, from the Cholesky
/// factor `G = LLᵀ` of the monomial Gram matrix.
#[derive(Clone, Debug)]
pub struct OrthoPolyTable {
    pub n_max: usize,
    /// Leading coefficients `k_n = 1/L_nn`.
    pub k_values: Vec<Float>,
    pub cholesky_diag: Vec<Float>,
    /// Row `n` holds the ascending coefficients of `p_n`.
    coefficients: RealMatrix,
}

impl OrthoPolyTable {
    /// Ascending coefficients of `p_n`, length `n + 1`.
    pub fn orthonormal(&self, n: usize) -> Vec<Float> {
        self.coefficients.row(n)[..=n].to_vec()
    }

    pub fn orthonormal_complex(&self, n: usize) -> Vec<HpComplex> {
        self.orthonormal(n).into_iter().map(HpComplex::from_real).collect()
    }

    /// `k_n^{−2} = d(zⁿ, P_{n−1})²`.
    pub fn inv_k_sq(&self, n: usize) -> Float {
        let d = &self.cholesky_diag[n];
        Float::with_val(d.prec(), d.square_ref())
    }
}

/// `k_0, …, k_{n_max}`; fails with the pivot index where precision runs out.
pub fn leading_coeffs(params: &SystemParams, n_max: usize, bits: u32) -> Result<OrthoPolyTable> {
    let gram = build_gram(params, &SupportSet::contiguous(n_max + 1), bits).entries;
    let l = cholesky(&gram)?;
    let cholesky_diag: Vec<Float> = (0..=n_max).map(|i| l[(i, i)].clone()).collect();
    let k_values = cholesky_diag.iter().map(|d| Float::with_val(bits, d.recip_ref())).collect();
    Ok(OrthoPolyTable { n_max, k_values, cholesky_diag, coefficients: lower_inverse(&l) })
}

/// `k_0, …, k_{n_max}` by modified Gram–Schmidt on monomials, every inner
/// product evaluated by quadrature on the arc.
pub fn gram_schmidt_leading_coeffs(params: &SystemParams, n_max: usize) -> Result<Vec<Float>> {
    let bits = params.bits();
    let mut basis: Vec<Vec<HpComplex>> = Vec::with_capacity(n_max + 1);
    let mut k_values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut v = vec![HpComplex::zero(bits); n + 1];
        v[n] = HpComplex::one(bits);
        for q in &basis {
            let proj = arc_inner_product(&v, q, params)?.value;
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi = &*vi - &(&proj * qi);
            }
        }
        let norm = arc_inner_product(&v, &v, params)?.value.re.sqrt();
        let inv = Float::with_val(bits, norm.recip_ref());
        for vi in v.iter_mut() {
            *vi = vi.scale(&inv);
        }
        k_values.push(v[n].re.clone());
        basis.push(v);
    }
    Ok(k_values)
}

/// A complex polynomial of the given degree with coefficients drawn from a
/// Gaussian direction and scaled to unit arc norm.
pub fn random_unit_polynomial<R: Rng + ?Sized>(gram: &RealMatrix, degree: usize, rng: &mut R) -> Vec<HpComplex> {
    let bits = gram.bits();
    let raw: Vec<HpComplex> = (0..=degree)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            HpComplex::new(real(bits, re), real(bits, im))
        })
        .collect();
    let sub = gram.principal(&(0..=degree).collect::<Vec<_>>());
    let norm = complex_quadratic_form(&sub, &raw).sqrt();
    let inv = Float::with_val(bits, norm.recip_ref());
    raw.iter().map(|a| a.scale(&inv)).collect()
}
