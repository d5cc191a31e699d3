use rug::Float;

use super::maps::{phi_inverse, phi_prime, sqrt_phi_inverse_prime, sqrt_phi_prime};
use super::quadrature::{integrate_smoothed, Quadrature};
use crate::error::{Error, Result};
use crate::hp::{pi, HpComplex};
use crate::system::SystemParams;

/// A point of the exterior domain, including the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtPoint {
    Finite(HpComplex),
    Infinity,
}

/// `Φ` and `(Φ')^{1/2}` at an exterior point; `None` stands for the pole at infinity.
struct Mapped {
    w: Option<HpComplex>,
    sqrt_deriv: HpComplex,
}

fn mapped(params: &SystemParams, z: &ExtPoint) -> Result<Mapped> {
    let bits = params.bits();
    match z {
        ExtPoint::Finite(z) => Ok(Mapped { w: Some(phi_inverse(&params.c, z)?), sqrt_deriv: sqrt_phi_inverse_prime(&params.c, z)? }),
        ExtPoint::Infinity => {
            let inv_sqrt_c = Float::with_val(bits, params.c.sqrt_ref()).recip();
            Ok(Mapped { w: None, sqrt_deriv: HpComplex::from_real(inv_sqrt_c) })
        }
    }
}

/// `W/(W − 1)` with `W = Φ(ζ) conj(Φ(z))`; equals 1 when either point is infinite.
fn cross_ratio(a: &Mapped, b: &Mapped, bits: u32) -> Result<HpComplex> {
    match (&a.w, &b.w) {
        (Some(wa), Some(wb)) => {
            let big_w = wa * &wb.conj();
            let denom = &big_w - &HpComplex::one(bits);
            if denom.abs() < 1e-30 {
                return Err(Error::Degenerate { gap: format!("{:e}", denom.abs().to_f64()) });
            }
            Ok(big_w.div(&denom))
        }
        _ => Ok(HpComplex::one(bits)),
    }
}

fn assemble(params: &SystemParams, a: &Mapped, b: &Mapped) -> Result<HpComplex> {
    let bits = params.bits();
    let scale = Float::with_val(bits, &params.arc_length / pi(bits));
    let ratio = cross_ratio(a, b, bits)?;
    Ok((&(&a.sqrt_deriv * &b.sqrt_deriv.conj()) * &ratio).scale(&scale))
}

/// Szegő kernel `K(ζ, z) = (L/π)(Φ'(ζ) conj Φ'(z))^{1/2} W/(W − 1)`, `W = Φ(ζ) conj Φ(z)`.
pub fn szego_kernel(params: &SystemParams, zeta: &ExtPoint, z: &ExtPoint) -> Result<HpComplex> {
    assemble(params, &mapped(params, zeta)?, &mapped(params, z)?)
}

/// `K(∞, ∞) = L/(πc)`.
pub fn szego_kernel_at_infinity(params: &SystemParams) -> Result<Float> {
    Ok(szego_kernel(params, &ExtPoint::Infinity, &ExtPoint::Infinity)?.re)
}

/// Boundary value of `K(ζ, z)` on the side of the arc reached from `|w| = 1`,
/// with `ζ = φ(w)`.
pub fn boundary_kernel(params: &SystemParams, w: &HpComplex, z: &ExtPoint) -> Result<HpComplex> {
    let a = Mapped { w: Some(w.clone()), sqrt_deriv: sqrt_phi_prime(&params.c, w)?.recip() };
    assemble(params, &a, &mapped(params, z)?)
}

/// `(1/L) ∫_Γ F(ζ) conj K(ζ, z) |dζ|` over both sides of the arc, with `F` given
/// through its boundary values `w ↦ F(φ(w))` on the unit circle.
pub fn reproduce<F>(params: &SystemParams, boundary_value: F, z: &ExtPoint) -> Result<Quadrature>
where
    F: Fn(&HpComplex) -> HpComplex + Sync,
{
    let bits = params.bits();
    // The circle is split where φ' vanishes so each panel has square-root ends only.
    let critical = Float::with_val(bits, -&params.c).acos();
    let two_pi = pi(bits) * 2u32;
    let integrand = |t: &Float| {
        let w = HpComplex::cis(t);
        let k = boundary_kernel(params, &w, z)?;
        let speed = phi_prime(&params.c, &w)?.abs();
        Ok((&boundary_value(&w) * &k.conj()).scale(&speed))
    };
    let front = integrate_smoothed(integrand, &Float::with_val(bits, -&critical), &critical, bits)?;
    let back_end = Float::with_val(bits, &two_pi - &critical);
    let back = integrate_smoothed(integrand, &critical, &back_end, bits)?;
    // |dζ| = |φ'(w)| dt counts the arc twice.
    let norm = Float::with_val(bits, &params.arc_length * 2u32).recip();
    Ok(Quadrature {
        value: (&front.value + &back.value).scale(&norm),
        nodes: front.nodes + back.nodes,
        abs_scale: Float::with_val(bits, &front.abs_scale + &back.abs_scale) * &norm,
    })
}
