use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{zero, HpComplex};
use crate::system::SystemParams;

/// Truncated Laurent series `Σ a_d z^d` at infinity.
///
/// Coefficients run from `top_degree` downward and are exact (to working
/// precision) down to [`LaurentSeries::floor_degree`]; everything below is
/// summarized by `tail_bound`, an estimate of the neglected `Σ |a_d|`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub top_degree: i64,
    pub coefficients: Vec<HpComplex>,
    pub tail_bound: Float,
}

impl LaurentSeries {
    pub fn new(top_degree: i64, coefficients: Vec<HpComplex>, tail_bound: Float) -> Self {
        assert!(!coefficients.is_empty());
        Self { top_degree, coefficients, tail_bound }
    }

    pub fn bits(&self) -> u32 {
        self.coefficients[0].prec()
    }

    /// Lowest degree whose coefficient is known.
    pub fn floor_degree(&self) -> i64 {
        self.top_degree - self.coefficients.len() as i64 + 1
    }

    pub fn coefficient(&self, degree: i64) -> Option<&HpComplex> {
        if degree > self.top_degree || degree < self.floor_degree() {
            return None;
        }
        self.coefficients.get((self.top_degree - degree) as usize)
    }

    fn l1(&self) -> Float {
        let mut s = zero(self.bits());
        for a in &self.coefficients {
            s += a.abs();
        }
        s
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let bits = self.bits().max(rhs.bits());
        let top = self.top_degree.max(rhs.top_degree);
        let floor = self.floor_degree().max(rhs.floor_degree());
        let mut tail = Float::with_val(bits, &self.tail_bound + &rhs.tail_bound);
        for s in [self, rhs] {
            for d in s.floor_degree()..floor {
                tail += s.coefficient(d).expect("in range").abs();
            }
        }
        let zero_c = HpComplex::zero(bits);
        let coefficients = (floor..=top)
            .rev()
            .map(|d| self.coefficient(d).unwrap_or(&zero_c) + rhs.coefficient(d).unwrap_or(&zero_c))
            .collect();
        Self::new(top, coefficients, tail)
    }

    /// Product, keeping only coefficients that every neglected term leaves untouched.
    pub fn mul(&self, rhs: &Self) -> Self {
        let bits = self.bits().max(rhs.bits());
        let top = self.top_degree + rhs.top_degree;
        let floor = (self.top_degree + rhs.floor_degree()).max(self.floor_degree() + rhs.top_degree);
        let coefficients = (floor..=top)
            .rev()
            .map(|d| {
                let mut acc = HpComplex::zero(bits);
                for (i, a) in self.coefficients.iter().enumerate() {
                    let da = self.top_degree - i as i64;
                    if let Some(b) = rhs.coefficient(d - da) {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect();
        let tail = Float::with_val(bits, self.l1() * &rhs.tail_bound)
            + Float::with_val(bits, rhs.l1() * &self.tail_bound)
            + Float::with_val(bits, &self.tail_bound * &rhs.tail_bound);
        Self::new(top, coefficients, tail)
    }

    /// `self^n`, `n ≥ 1`, by binary powering.
    pub fn powi(&self, n: u32) -> Self {
        assert!(n >= 1);
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        result.expect("n >= 1")
    }

    /// Coefficients of degrees `0..=top_degree`, ascending; `None` when some are not known exactly.
    pub fn polynomial_part(&self) -> Option<Vec<HpComplex>> {
        if self.floor_degree() > 0 || self.top_degree < 0 {
            return None;
        }
        Some((0..=self.top_degree).map(|d| self.coefficient(d).expect("known").clone()).collect())
    }

    pub fn eval(&self, z: &HpComplex) -> HpComplex {
        let zinv = z.recip();
        let mut acc = HpComplex::zero(self.bits());
        for a in self.coefficients.iter().rev() {
            acc = &(&acc * &zinv) + a;
        }
        &acc * &z.powi(self.top_degree as i32)
    }
}

/// `v_0, …, v_count−1` with `Φ(z) = Σ v_m z^{1−m}`, from `c v² + (u − 1)v − cu = 0`, `u = 1/z`.
fn inverse_map_coefficients(c: &Float, count: usize) -> Vec<Float> {
    let bits = c.prec();
    let mut v: Vec<Float> = Vec::with_capacity(count);
    for m in 0..count {
        let next = if m == 0 {
            Float::with_val(bits, c.recip_ref())
        } else {
            let mut s = zero(bits);
            for i in 1..m {
                s += Float::with_val(bits, &v[i] * &v[m - i]);
            }
            let mut x = -Float::with_val(bits, &v[m - 1]) - s * c;
            if m == 1 {
                x += c;
            }
            x
        };
        v.push(next);
    }
    v
}

/// Laurent series of the inverse exterior map `Φ(z) = z/c + (c² − 1)/c + Σ δ_m z^{−m}`,
/// kept through degree `−truncation`.
pub fn phi_inverse_series(c: &Float, truncation: usize) -> LaurentSeries {
    let bits = c.prec();
    let kept = truncation + 2;
    // The tail is estimated from the next 3·kept coefficients.
    let v = inverse_map_coefficients(c, 4 * kept);
    let mut tail = zero(bits);
    for x in &v[kept..] {
        tail += Float::with_val(bits, x.abs_ref());
    }
    let coefficients = v[..kept].iter().map(|x| HpComplex::from_real(x.clone())).collect();
    LaurentSeries::new(1, coefficients, tail)
}

/// Laurent series of the forward map `φ(w) = cw + (1 − c²) Σ_{k≥0} (−c)^k w^{−k}`.
pub fn phi_series(c: &Float, truncation: usize) -> LaurentSeries {
    let bits = c.prec();
    let one_minus = Float::with_val(bits, 1u32) - Float::with_val(bits, c.square_ref());
    let mut coefficients = vec![HpComplex::from_real(c.clone())];
    let mut power = Float::with_val(bits, 1);
    for _ in 0..=truncation {
        coefficients.push(HpComplex::from_real(Float::with_val(bits, &one_minus * &power)));
        power *= -Float::with_val(bits, c);
    }
    let tail = Float::with_val(bits, &one_minus * Float::with_val(bits, power.abs_ref())) / (Float::with_val(bits, 1u32) - c);
    LaurentSeries::new(1, coefficients, tail)
}

/// Faber polynomial `Φ_n`: the polynomial part of `Φ(z)^n`, ascending coefficients.
pub fn faber_poly(params: &SystemParams, n: usize, truncation: usize) -> Result<Vec<HpComplex>> {
    let bits = params.bits();
    if n == 0 {
        return Ok(vec![HpComplex::one(bits)]);
    }
    let series = phi_inverse_series(&params.c, truncation).powi(n as u32);
    series.polynomial_part().ok_or(Error::TruncationInsufficient { truncation, degree: n })
}
