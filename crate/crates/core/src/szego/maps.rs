use rug::Float;

use crate::error::{Error, Result};
use crate::hp::{pi, pow2, HpComplex};
use crate::system::SystemParams;

/// Minimum `|w| − 1` accepted by [`phi_inverse`] before a point counts as on the arc.
pub const ON_ARC_GAP: f64 = 1e-12;

/// The arc and its boundary data.
#[derive(Clone, Debug)]
pub struct ArcGeometry {
    pub params: SystemParams,
    /// `e^{−iπy}` and `e^{iπy}`.
    pub endpoints: (HpComplex, HpComplex),
    /// Total rotation `2π(1 + 2y)` of the doubly traversed arc.
    pub total_rotation: Float,
}

impl ArcGeometry {
    pub fn new(params: &SystemParams) -> Self {
        let bits = params.bits();
        let half_angle = Float::with_val(bits, pi(bits) * &params.y);
        let upper = HpComplex::cis(&half_angle);
        let lower = upper.conj();
        let total_rotation = pi(bits) * 2u32 * (Float::with_val(bits, &params.y * 2u32) + 1u32);
        Self { params: params.clone(), endpoints: (lower, upper), total_rotation }
    }

    /// True when `z` lies on the arc to relative tolerance `tol`.
    pub fn contains(&self, z: &HpComplex, tol: f64) -> bool {
        let r = z.abs();
        if (r.to_f64() - 1.0).abs() > tol {
            return false;
        }
        let half_angle = self.params.y_f64() * std::f64::consts::PI;
        z.arg().to_f64().abs() <= half_angle + tol
    }

    /// `n` points `e^{iθ}` with `θ` equally spaced over `[−πy, πy]`, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<HpComplex> {
        let bits = self.params.bits();
        let half_angle = Float::with_val(bits, pi(bits) * &self.params.y);
        (0..n)
            .map(|i| {
                let frac = if n == 1 { Float::with_val(bits, 0) } else { Float::with_val(bits, 2 * i as u64) / (n as u64 - 1) - 1u32 };
                HpComplex::cis(&Float::with_val(bits, &half_angle * &frac))
            })
            .collect()
    }
}

fn shifted(w: &HpComplex, c: &Float) -> HpComplex {
    HpComplex::new(Float::with_val(w.prec(), &w.re + c), w.im.clone())
}

fn check_pole(w: &HpComplex, c: &Float) -> Result<HpComplex> {
    let d = shifted(w, c);
    if d.abs() <= pow2(w.prec(), -(w.prec() as i32)) {
        return Err(Error::Pole);
    }
    Ok(d)
}

/// Exterior map `φ(w) = w(cw + 1)/(w + c)` of the unit disk onto the complement of the arc.
pub fn phi_map(c: &Float, w: &HpComplex) -> Result<HpComplex> {
    let d = check_pole(w, c)?;
    let cw1 = HpComplex::new(Float::with_val(w.prec(), &w.re * c) + 1u32, Float::with_val(w.prec(), &w.im * c));
    Ok((w * &cw1).div(&d))
}

/// `φ'(w) = c(w² + 2cw + 1)/(w + c)²`.
pub fn phi_prime(c: &Float, w: &HpComplex) -> Result<HpComplex> {
    let d = check_pole(w, c)?;
    let bits = w.prec();
    let w2 = w * w;
    let two_c = Float::with_val(bits, c * 2u32);
    let num = HpComplex::new(w2.re + Float::with_val(bits, &w.re * &two_c) + 1u32, w2.im + Float::with_val(bits, &w.im * &two_c));
    Ok(num.scale(c).div(&(&d * &d)))
}

/// Zeros `−c ± i√(1 − c²)` of `φ'`, both on the unit circle.
fn critical_points(c: &Float, bits: u32) -> (HpComplex, HpComplex) {
    let s = (Float::with_val(bits, 1) - Float::with_val(bits, c.square_ref())).sqrt();
    let re = -Float::with_val(bits, c);
    (HpComplex::new(re.clone(), s.clone()), HpComplex::new(re, -s))
}

/// Branch of `φ'(w)^{1/2}` analytic on `|w| > 1` and positive at infinity:
/// `√c · w · (1 − r₁/w)^{1/2} (1 − r₂/w)^{1/2} / (w + c)`.
pub fn sqrt_phi_prime(c: &Float, w: &HpComplex) -> Result<HpComplex> {
    let d = check_pole(w, c)?;
    let bits = w.prec();
    let (r1, r2) = critical_points(c, bits);
    let one = HpComplex::one(bits);
    let winv = w.recip();
    let f1 = (&one - &(&r1 * &winv)).sqrt();
    let f2 = (&one - &(&r2 * &winv)).sqrt();
    let sc = Float::with_val(bits, c.sqrt_ref());
    Ok((&(w * &f1) * &f2).scale(&sc).div(&d))
}

/// Inverse exterior map `Φ(z)`: the root of `cw² + (1 − z)w − zc = 0` with `|w| > 1`.
pub fn phi_inverse(c: &Float, z: &HpComplex) -> Result<HpComplex> {
    let bits = z.prec();
    let zm1 = HpComplex::new(Float::with_val(bits, &z.re - 1u32), z.im.clone());
    let four_c2 = Float::with_val(bits, c.square_ref()) * 4u32;
    let disc = &(&zm1 * &zm1) + &z.scale(&four_c2);
    let s = disc.sqrt();
    let plus = &zm1 + &s;
    let minus = &zm1 - &s;
    let q = if plus.norm_sqr() >= minus.norm_sqr() { plus } else { minus };
    if q.is_zero() {
        return Err(Error::OnArc { gap: "0".into() });
    }
    let two_c = Float::with_val(bits, c * 2u32);
    let w = q.scale(&two_c.recip());
    let gap = Float::with_val(bits, w.abs() - 1u32);
    if gap < ON_ARC_GAP {
        return Err(Error::OnArc { gap: format!("{:e}", gap.to_f64()) });
    }
    Ok(w)
}

/// `Φ'(z) = 1/φ'(Φ(z))`.
pub fn phi_inverse_prime(c: &Float, z: &HpComplex) -> Result<HpComplex> {
    Ok(phi_prime(c, &phi_inverse(c, z)?)?.recip())
}

/// Branch of `Φ'(z)^{1/2}` consistent with [`sqrt_phi_prime`], positive at infinity.
pub fn sqrt_phi_inverse_prime(c: &Float, z: &HpComplex) -> Result<HpComplex> {
    Ok(sqrt_phi_prime(c, &phi_inverse(c, z)?)?.recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::real;
    use rand::{Rng, SeedableRng};

    fn c(y: f64, bits: u32) -> Float {
        SystemParams::new(y, bits).unwrap().c
    }

    fn close(a: &HpComplex, b: &HpComplex, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1.0)
    }

    #[test]
    fn phi_fixed_points_and_values() {
        for y in [0.05, 0.2, 0.45] {
            let cc = c(y, 128);
            let z = phi_map(&cc, &HpComplex::one(128)).unwrap();
            assert!(close(&z, &HpComplex::one(128), 1e-35));
        }
        let half = real(128, 0.5);
        let z = phi_map(&half, &HpComplex::from_f64(128, 2.0, 0.0)).unwrap();
        assert!(close(&z, &HpComplex::from_f64(128, 1.6, 0.0), 1e-15));
        assert_eq!(phi_map(&half, &HpComplex::from_f64(128, -0.5, 0.0)).unwrap_err(), Error::Pole);
    }

    #[test]
    fn critical_point_maps_to_arc_endpoint() {
        let p = SystemParams::new(0.2, 128).unwrap();
        let (r1, r2) = critical_points(&p.c, 128);
        let geo = ArcGeometry::new(&p);
        assert!(close(&phi_map(&p.c, &r1).unwrap(), &geo.endpoints.1, 1e-30));
        assert!(close(&phi_map(&p.c, &r2).unwrap(), &geo.endpoints.0, 1e-30));
        assert!(phi_prime(&p.c, &r1).unwrap().abs() < 1e-30);
    }

    #[test]
    fn total_rotation_is_exact() {
        let p = SystemParams::new(0.1, 128).unwrap();
        let geo = ArcGeometry::new(&p);
        let expected = 2.0 * std::f64::consts::PI * 1.2;
        assert!((geo.total_rotation.to_f64() - expected).abs() < 1e-14);
        assert!((geo.endpoints.1.abs().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn unit_circle_covers_arc() {
        let p = SystemParams::new(0.3, 128).unwrap();
        let geo = ArcGeometry::new(&p);
        for i in 0..360 {
            let t = real(128, i as f64 * std::f64::consts::PI / 180.0);
            let z = phi_map(&p.c, &HpComplex::cis(&t)).unwrap();
            assert!(geo.contains(&z, 1e-25), "{z:?}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let p = SystemParams::new(0.15, 128).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let r = rng.random_range(1.0f64..=10.0).max(1.0 + 1e-6);
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let w = HpComplex::from_polar(&real(128, r), &real(128, t));
            let back = phi_inverse(&p.c, &phi_map(&p.c, &w).unwrap()).unwrap();
            assert!((&back - &w).abs().to_f64() < 1e-20 * r);
        }
    }

    #[test]
    fn inverse_at_large_argument() {
        let p = SystemParams::new(0.1, 128).unwrap();
        let w = phi_inverse(&p.c, &HpComplex::from_f64(128, 100.0, 0.0)).unwrap();
        let ratio = w.re.to_f64() / 100.0 * p.c.to_f64();
        assert!((ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn inverse_rejects_arc_points() {
        let p = SystemParams::new(0.1, 128).unwrap();
        let t = real(128, std::f64::consts::PI * 0.05);
        assert!(matches!(phi_inverse(&p.c, &HpComplex::cis(&t)), Err(Error::OnArc { .. })));
    }

    #[test]
    fn sqrt_branch_squares_and_limits() {
        let p = SystemParams::new(0.2, 128).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = rng.random_range(1.0001f64..5.0);
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let w = HpComplex::from_polar(&real(128, r), &real(128, t));
            let s = sqrt_phi_prime(&p.c, &w).unwrap();
            assert!(close(&(&s * &s), &phi_prime(&p.c, &w).unwrap(), 1e-30));
        }
        let far = sqrt_phi_prime(&p.c, &HpComplex::from_f64(128, 1e15, 0.0)).unwrap();
        assert!((far.re.to_f64() - p.c.to_f64().sqrt()).abs() < 1e-12);
        // Continuity across the negative real axis outside the disk.
        let a = sqrt_phi_prime(&p.c, &HpComplex::from_f64(128, -2.0, 1e-20)).unwrap();
        let b = sqrt_phi_prime(&p.c, &HpComplex::from_f64(128, -2.0, -1e-20)).unwrap();
        assert!(close(&a, &b, 1e-15));
    }

    #[test]
    fn laurent_leading_coefficient_of_phi_is_capacity() {
        let p = SystemParams::new(0.3, 256).unwrap();
        let w = HpComplex::from_f64(256, 1e30, 0.0);
        let z = phi_map(&p.c, &w).unwrap();
        let lead = Float::with_val(256, &z.re / &w.re);
        assert!((lead.to_f64() / p.c.to_f64() - 1.0).abs() < 1e-25);
    }
}
