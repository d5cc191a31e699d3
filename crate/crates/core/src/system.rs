//! The normalized partial Fourier system: atoms `a_j(θ) = e^{ijθ}/√(2πy)` on
//! `θ ∈ [−πy, πy]`, their Gram matrices in closed form, and measurements
//! represented in coefficient space.

use std::fmt;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::hp::{from_rational, one, parse_rational, pi, pow2, rational_from_f64, zero, HpComplex};
use crate::matrix::RealMatrix;

/// Band fraction `y = 1/SRF` with the derived capacity and arc length.
///
/// `y` is held as an exact rational so the same problem can be rebuilt at
/// any precision without drift.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    y_exact: Rational,
    bits: u32,
    pub y: Float,
    pub srf: Float,
    /// Capacity `c = sin(πy/2)`.
    pub c: Float,
    /// `L = 2πy`.
    pub arc_length: Float,
}

impl SystemParams {
    pub fn from_rational(y: Rational, bits: u32) -> Result<Self> {
        if y <= 0 || y >= (1, 2) {
            return Err(Error::Domain(format!("{}", y.to_f64())));
        }
        let yf = from_rational(bits, &y);
        let srf = from_rational(bits, &Rational::from(y.recip_ref()));
        let c = capacity_at(&yf);
        let arc_length = pi(bits) * 2u32 * &yf;
        Ok(Self { y_exact: y, bits, y: yf, srf, c, arc_length })
    }

    /// `y` from an `f64`, read through its shortest decimal form (`0.1` is exactly 1/10).
    pub fn new(y: f64, bits: u32) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::Domain(format!("{y}")));
        }
        Self::from_rational(rational_from_f64(y), bits)
    }

    /// `y` from a decimal or fraction literal such as `0.05` or `1/3`.
    pub fn parse(y: &str, bits: u32) -> Result<Self> {
        let q = parse_rational(y).ok_or_else(|| Error::Domain(y.to_string()))?;
        Self::from_rational(q, bits)
    }

    /// `y = 1/SRF` from a superresolution factor literal.
    pub fn from_srf(srf: &str, bits: u32) -> Result<Self> {
        let s = parse_rational(srf).ok_or_else(|| Error::Domain(format!("1/{srf}")))?;
        if s <= 0 {
            return Err(Error::Domain(format!("1/{srf}")));
        }
        Self::from_rational(s.recip(), bits)
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        Self::from_rational(self.y_exact.clone(), bits).expect("validated on construction")
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn y_rational(&self) -> &Rational {
        &self.y_exact
    }

    pub fn y_f64(&self) -> f64 {
        self.y.to_f64()
    }
}

fn capacity_at(y: &Float) -> Float {
    let bits = y.prec();
    (pi(bits) * y / 2u32).sin()
}

/// Capacity `c = sin(πy/2)` of the arc; `y` must lie in `(0, 1/2)`.
pub fn capacity(y: &Float) -> Result<Float> {
    if *y <= 0 || *y >= 0.5 || y.is_nan() {
        return Err(Error::Domain(format!("{}", y.to_f64())));
    }
    Ok(capacity_at(y))
}

/// Gram entry `⟨a_{j+m}, a_j⟩ = sin(πym)/(πym)`, equal to 1 at `m = 0`.
pub fn gram_entry(params: &SystemParams, m: i64) -> Float {
    let bits = params.bits;
    if m == 0 {
        return one(bits);
    }
    let x = pi(bits) * &params.y * Float::with_val(bits, m);
    let s = Float::with_val(bits, x.sin_ref());
    s / x
}

/// Strictly increasing integer offsets of the atoms in play.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet(Vec<i64>);

impl SupportSet {
    /// Validates that `offsets` is strictly increasing. The empty set is allowed
    /// (it is the support of the zero vector); operations that need atoms check
    /// the size themselves.
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSupport(format!("{offsets:?} is not strictly increasing")));
        }
        Ok(Self(offsets))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut offsets: Vec<i64>) -> Self {
        offsets.sort_unstable();
        offsets.dedup();
        Self(offsets)
    }

    /// `{0, 1, …, len−1}`.
    pub fn contiguous(len: usize) -> Self {
        Self((0..len as i64).collect())
    }

    pub fn range(lo: i64, hi_inclusive: i64) -> Self {
        Self((lo..=hi_inclusive).collect())
    }

    pub fn offsets(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn span(&self) -> i64 {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// Translated so the first offset is 0.
    pub fn canonical(&self) -> Self {
        self.translate(-self.0.first().copied().unwrap_or(0))
    }

    pub fn translate(&self, t: i64) -> Self {
        Self(self.0.iter().map(|x| x + t).collect())
    }

    pub fn reflect(&self) -> Self {
        Self(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn position(&self, offset: i64) -> Option<usize> {
        self.0.binary_search(&offset).ok()
    }

    pub fn contains(&self, offset: i64) -> bool {
        self.position(offset).is_some()
    }

    pub fn is_contiguous(&self) -> bool {
        self.0.windows(2).all(|w| w[1] == w[0] + 1)
    }

    /// Subset picked by positions (which must be increasing).
    pub fn select(&self, positions: &[usize]) -> Self {
        Self(positions.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Complex coefficients on a support.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    pub support: SupportSet,
    pub values: Vec<HpComplex>,
}

impl CoefficientVector {
    pub fn new(support: SupportSet, values: Vec<HpComplex>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a support of size {}",
                values.len(),
                support.len()
            )));
        }
        Ok(Self { support, values })
    }

    pub fn from_real(support: SupportSet, values: Vec<Float>) -> Result<Self> {
        Self::new(support, values.into_iter().map(HpComplex::from_real).collect())
    }

    pub fn zero() -> Self {
        Self { support: SupportSet(Vec::new()), values: Vec::new() }
    }

    /// `‖x‖₀`.
    pub fn sparsity(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn get(&self, offset: i64) -> Option<&HpComplex> {
        self.support.position(offset).map(|i| &self.values[i])
    }

    /// Plain Euclidean norm of the coefficients.
    pub fn norm(&self, bits: u32) -> Float {
        let mut acc = zero(bits);
        for v in &self.values {
            acc += v.norm_sqr();
        }
        acc.sqrt()
    }

    /// Coefficients laid out over `window`, zero elsewhere.
    pub fn embed(&self, window: &SupportSet, bits: u32) -> Result<Vec<HpComplex>> {
        let mut out = vec![HpComplex::zero(bits); window.len()];
        for (t, v) in self.support.offsets().iter().zip(&self.values) {
            let i = window.position(*t).ok_or(Error::SupportNotContained { offset: *t })?;
            out[i] = v.clone();
        }
        Ok(out)
    }

    /// `self − other` as a vector on the union of both supports.
    pub fn difference(&self, other: &Self, bits: u32) -> Self {
        let mut offsets: Vec<i64> = self.support.offsets().to_vec();
        offsets.extend_from_slice(other.support.offsets());
        let union = SupportSet::from_unsorted(offsets);
        let a = self.embed(&union, bits).expect("subset of union");
        let b = other.embed(&union, bits).expect("subset of union");
        let values = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        Self { support: union, values }
    }
}

/// Gram matrix of the atoms on a support.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub support: SupportSet,
    pub entries: RealMatrix,
}

/// `G_{ij} = gram_entry(τ_j − τ_i)`, symmetric with unit diagonal.
pub fn build_gram(params: &SystemParams, support: &SupportSet, bits: u32) -> GramMatrix {
    let p = if bits == params.bits { params.clone() } else { params.with_bits(bits) };
    let taus = support.offsets();
    let n = taus.len();
    // Entries depend only on the offset difference.
    let mut cache = std::collections::HashMap::new();
    let mut entries = RealMatrix::zeros(n, n, bits);
    for i in 0..n {
        entries[(i, i)] = one(bits);
        for j in i + 1..n {
            let d = taus[j] - taus[i];
            let g = cache.entry(d).or_insert_with(|| gram_entry(&p, d)).clone();
            entries[(i, j)] = g.clone();
            entries[(j, i)] = g;
        }
    }
    GramMatrix { support: support.clone(), entries }
}

/// A function in the span of the window atoms plus an orthogonal remainder of norm `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementVector {
    pub window: SupportSet,
    pub coeffs: Vec<HpComplex>,
    pub rho: Float,
}

impl MeasurementVector {
    pub fn new(window: SupportSet, coeffs: Vec<HpComplex>, rho: Float) -> Result<Self> {
        if window.len() != coeffs.len() {
            return Err(Error::InvalidArgument("coefficient count differs from window size".into()));
        }
        if rho < 0 || rho.is_nan() {
            return Err(Error::InvalidArgument("rho must be nonnegative".into()));
        }
        Ok(Self { window, coeffs, rho })
    }
}

/// `f = A x` over `window`, with no orthogonal remainder.
pub fn synthesize(params: &SystemParams, x: &CoefficientVector, window: &SupportSet) -> Result<MeasurementVector> {
    let bits = params.bits;
    let coeffs = x.embed(window, bits)?;
    Ok(MeasurementVector { window: window.clone(), coeffs, rho: zero(bits) })
}

/// `Re(c* G c)` for real symmetric `G` and complex `c`.
pub fn complex_quadratic_form(g: &RealMatrix, c: &[HpComplex]) -> Float {
    let re: Vec<Float> = c.iter().map(|z| z.re.clone()).collect();
    let im: Vec<Float> = c.iter().map(|z| z.im.clone()).collect();
    g.quadratic_form(&re) + g.quadratic_form(&im)
}

/// `‖f‖² = c* G_W c + ρ²`.
pub fn measurement_norm_sqr(params: &SystemParams, f: &MeasurementVector, bits: u32) -> Result<Float> {
    let g = build_gram(params, &f.window, bits);
    let coeffs: Vec<HpComplex> = f
        .coeffs
        .iter()
        .map(|z| HpComplex::new(Float::with_val(bits, &z.re), Float::with_val(bits, &z.im)))
        .collect();
    let q = complex_quadratic_form(&g.entries, &coeffs);
    let mut scale = zero(bits);
    for z in &coeffs {
        scale += z.norm_sqr();
    }
    let rho = Float::with_val(bits, &f.rho);
    let total = q + Float::with_val(bits, rho.square_ref());
    if total < 0 {
        let tol = scale * pow2(bits, -(bits as i32) / 2) * (f.window.len().max(1) as u32);
        if Float::with_val(bits, -&total) > tol {
            return Err(Error::NegativeQuadraticForm { value: format!("{:e}", total.to_f64()) });
        }
        return Ok(zero(bits));
    }
    Ok(total)
}

/// `‖f‖ = sqrt(c* G_W c + ρ²)`.
pub fn measurement_norm(params: &SystemParams, f: &MeasurementVector, bits: u32) -> Result<Float> {
    measurement_norm_sqr(params, f, bits).map(Float::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cholesky, symmetric_eigen};

    #[test]
    fn capacity_values() {
        let c = capacity(&(Float::with_val(256, 1) / 3u32)).unwrap();
        assert!((c.to_f64() - 0.5).abs() < 1e-15);
        let c = SystemParams::new(0.1, 256).unwrap().c;
        assert!((c.to_f64() - 0.156_434_465_040_230_9).abs() < 1e-15);
        for y in [1e-3, 1e-6, 1e-9] {
            let p = SystemParams::new(y, 256).unwrap();
            let ratio = Float::with_val(256, &p.c) / (pi(256) * &p.y / 2u32);
            assert!((ratio.to_f64() - 1.0).abs() < 2.0 * y * y);
        }
    }

    #[test]
    fn capacity_rejects_out_of_domain() {
        assert!(capacity(&Float::with_val(64, 0.5)).is_err());
        assert!(capacity(&Float::with_val(64, 0.0)).is_err());
        assert!(SystemParams::new(0.6, 64).is_err());
        assert!(SystemParams::new(-0.1, 64).is_err());
        assert!(SystemParams::new(0.5, 64).is_err());
        assert!(SystemParams::parse("1/2", 64).is_err());
    }

    #[test]
    fn srf_and_y_agree() {
        let a = SystemParams::from_srf("3", 256).unwrap();
        let b = SystemParams::parse("1/3", 256).unwrap();
        assert_eq!(a, b);
        let prod = Float::with_val(256, &a.srf * &a.y);
        assert_eq!(prod, 1);
    }

    #[test]
    fn gram_entry_values() {
        let p = SystemParams::new(0.1, 256).unwrap();
        assert_eq!(gram_entry(&p, 0), 1);
        assert!((gram_entry(&p, 1).to_f64() - 0.983_631_643_083_466).abs() < 1e-12);
        assert!((gram_entry(&p, 2).to_f64() - 0.935_489_283_788_639).abs() < 1e-12);
        assert_eq!(gram_entry(&p, 7), gram_entry(&p, -7));
        // sinc(1/2) = 2/π exactly.
        let g5 = gram_entry(&p, 5);
        assert!(crate::hp::rel_diff(&g5, &(Float::with_val(256, 2) / pi(256))) < 1e-70);
    }

    #[test]
    fn build_gram_shapes() {
        let p = SystemParams::new(0.1, 256).unwrap();
        let g = build_gram(&p, &SupportSet::new(vec![5]).unwrap(), 256);
        assert_eq!(g.entries.rows(), 1);
        assert_eq!(g.entries[(0, 0)], 1);

        let g = build_gram(&p, &SupportSet::new(vec![0, 1]).unwrap(), 256);
        assert_eq!(g.entries[(0, 1)], gram_entry(&p, 1));
        assert_eq!(g.entries[(1, 0)], gram_entry(&p, 1));

        let a = build_gram(&p, &SupportSet::new(vec![0, 1, 2]).unwrap(), 256);
        let b = build_gram(&p, &SupportSet::new(vec![7, 8, 9]).unwrap(), 256);
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn gram_is_symmetric_unit_diagonal_positive_definite() {
        let p = SystemParams::new(0.2, 256).unwrap();
        let g = build_gram(&p, &SupportSet::new(vec![0, 1, 3, 4, 9]).unwrap(), 256);
        assert!(g.entries.is_symmetric());
        for i in 0..5 {
            assert_eq!(g.entries[(i, i)], 1);
        }
        assert!(cholesky(&g.entries).is_ok());
    }

    #[test]
    fn spectrum_translation_and_reflection_invariant() {
        let p = SystemParams::new(0.15, 256).unwrap();
        let t = SupportSet::new(vec![0, 2, 3, 7]).unwrap();
        let base = symmetric_eigen(&build_gram(&p, &t, 256).entries).unwrap();
        for other in [t.translate(11), t.reflect(), t.translate(-4).reflect()] {
            let e = symmetric_eigen(&build_gram(&p, &other, 256).entries).unwrap();
            for (a, b) in base.values.iter().zip(&e.values) {
                assert!(crate::hp::rel_diff(a, b) < 1e-60);
            }
        }
    }

    #[test]
    fn synthesize_embeds_and_checks_containment() {
        let p = SystemParams::new(0.1, 256).unwrap();
        let x = CoefficientVector::from_real(SupportSet::new(vec![3]).unwrap(), vec![Float::with_val(256, 2)]).unwrap();
        let window = SupportSet::range(0, 5);
        let f = synthesize(&p, &x, &window).unwrap();
        let re: Vec<f64> = f.coeffs.iter().map(|z| z.re.to_f64()).collect();
        assert_eq!(re, vec![0.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(f.rho.is_zero());

        let outside = CoefficientVector::from_real(SupportSet::new(vec![9]).unwrap(), vec![Float::with_val(256, 1)]).unwrap();
        assert_eq!(synthesize(&p, &outside, &window).unwrap_err(), Error::SupportNotContained { offset: 9 });

        let z = synthesize(&p, &CoefficientVector::zero(), &window).unwrap();
        assert!(measurement_norm(&p, &z, 256).unwrap().is_zero());
    }

    #[test]
    fn measurement_norms() {
        let p = SystemParams::new(0.1, 256).unwrap();
        let w = SupportSet::new(vec![0, 1]).unwrap();
        let ones = CoefficientVector::from_real(w.clone(), vec![Float::with_val(256, 1), Float::with_val(256, 1)]).unwrap();
        let f = synthesize(&p, &ones, &w).unwrap();
        let n2 = measurement_norm_sqr(&p, &f, 256).unwrap();
        let g1 = gram_entry(&p, 1).to_f64();
        assert!((n2.to_f64() - (2.0 + 2.0 * g1)).abs() < 1e-14);
        assert!((n2.to_f64() - 3.967_263).abs() < 1e-6);

        let diff = MeasurementVector::new(
            w.clone(),
            vec![HpComplex::from_f64(256, 1.0, 0.0), HpComplex::from_f64(256, -1.0, 0.0)],
            zero(256),
        )
        .unwrap();
        let n = measurement_norm(&p, &diff, 256).unwrap();
        assert!((n.to_f64() - (2.0 - 2.0 * g1).sqrt()).abs() < 1e-14);
        assert!((n.to_f64() - 0.180_932_898_7).abs() < 1e-10);

        let single = MeasurementVector::new(SupportSet::new(vec![4]).unwrap(), vec![HpComplex::one(256)], zero(256)).unwrap();
        assert_eq!(measurement_norm(&p, &single, 256).unwrap(), 1);

        let rho_only = MeasurementVector::new(w, vec![HpComplex::zero(256), HpComplex::zero(256)], Float::with_val(256, 0.3)).unwrap();
        assert!((measurement_norm(&p, &rho_only, 256).unwrap().to_f64() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn complex_coefficients_use_hermitian_form() {
        let p = SystemParams::new(0.1, 256).unwrap();
        let w = SupportSet::new(vec![0, 1]).unwrap();
        let f = MeasurementVector::new(w, vec![HpComplex::from_f64(256, 0.0, 1.0), HpComplex::from_f64(256, 0.0, 1.0)], zero(256)).unwrap();
        let n2 = measurement_norm_sqr(&p, &f, 256).unwrap();
        assert!((n2.to_f64() - (2.0 + 2.0 * gram_entry(&p, 1).to_f64())).abs() < 1e-14);
    }
}
