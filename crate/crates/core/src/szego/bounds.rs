use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use super::laurent::faber_poly;
use super::maps::{phi_inverse, phi_inverse_prime, phi_map, ArcGeometry};
use super::polys::{eval_poly, leading_coeffs, random_unit_polynomial};
use crate::check::BoundCheck;
use crate::error::{Error, Result};
use crate::hp::{pi, real, zero, HpComplex};
use crate::system::{build_gram, SupportSet, SystemParams};

/// Sampling sizes for [`bound_suite`].
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n_max: usize,
    /// Random unit-norm polynomials per degree.
    pub samples: usize,
    /// Exterior evaluation points shared by all polynomials.
    pub exterior_points: usize,
    /// Points on the arc for the Faber maximum.
    pub arc_points: usize,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(n_max: usize) -> Self {
        Self { n_max, samples: 100, exterior_points: 64, arc_points: 10_000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct BoundSuite {
    pub checks: Vec<BoundCheck>,
    /// `(n, k_n^{−2} / ((c/y) c^{2n}))`.
    pub asymptotic_ratios: Vec<(usize, Float)>,
    /// Checks that could not be evaluated, with the reason.
    pub errors: Vec<(String, Error)>,
}

impl BoundSuite {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.satisfied)
    }

    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a BoundCheck> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}

/// Exterior sample `z = φ(w)` with `Φ(z)` and `|Φ'(z)|` recomputed from `z`.
struct Sample {
    z: HpComplex,
    phi_abs: Float,
    deriv_abs: Float,
}

fn exterior_samples(params: &SystemParams, rng: &mut ChaCha8Rng, count: usize, r_lo: f64, r_hi: f64) -> Result<Vec<Sample>> {
    let bits = params.bits();
    (0..count)
        .map(|_| {
            let r = rng.random_range(r_lo..=r_hi);
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let w = HpComplex::from_polar(&real(bits, r), &real(bits, t));
            let z = phi_map(&params.c, &w)?;
            let phi_abs = phi_inverse(&params.c, &z)?.abs();
            let deriv_abs = phi_inverse_prime(&params.c, &z)?.abs();
            Ok(Sample { z, phi_abs, deriv_abs })
        })
        .collect()
}

fn max_of(values: impl ParallelIterator<Item = Float>, bits: u32) -> Float {
    values.reduce(|| zero(bits), |a, b| if b > a { b } else { a })
}

/// Evaluates the explicit two-sided and growth inequalities for degrees up to `n_max`.
pub fn bound_suite(params: &SystemParams, config: &SuiteConfig) -> Result<BoundSuite> {
    if config.n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if config.samples < 100 {
        return Err(Error::InvalidArgument("samples must be at least 100".into()));
    }
    let bits = params.bits();
    let n_max = config.n_max;
    let c = &params.c;
    let y = &params.y;
    let geo = ArcGeometry::new(params);
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    let mut asymptotic_ratios = Vec::new();
    let c2 = Float::with_val(bits, c.square_ref());
    let c2n = |n: usize| Float::with_val(bits, c2.clone().pow(n as u32));

    // (a) two-sided bracket on k_n^{-2}, and (f) the asymptotic ratio.
    match leading_coeffs(params, n_max, bits) {
        Ok(table) => {
            let lower_factor = Float::with_val(bits, c / Float::with_val(bits, y * 2u32));
            let one_2y = Float::with_val(bits, y * 2u32) + 1u32;
            let upper_factor = Float::with_val(bits, one_2y.square_ref()) * 4u32;
            let asym_factor = Float::with_val(bits, c / y);
            for n in 0..=n_max {
                let v = table.inv_k_sq(n);
                let cn = c2n(n);
                checks.push(BoundCheck::strict(format!("bracket_lower_{n}"), Float::with_val(bits, &lower_factor * &cn), v.clone()));
                checks.push(BoundCheck::strict(format!("bracket_upper_{n}"), v.clone(), Float::with_val(bits, &upper_factor * &cn)));
                let ratio = v / Float::with_val(bits, &asym_factor * &cn);
                checks.push(BoundCheck::new(format!("asymptotic_ratio_{n}"), real(bits, 0.5), ratio.clone()));
                asymptotic_ratios.push((n, ratio));
            }
        }
        Err(e) => errors.push(("bracket".into(), e)),
    }

    // (b) Faber polynomials on the arc against V/π.
    let arc = geo.sample(config.arc_points);
    let faber_cap = Float::with_val(bits, &geo.total_rotation / pi(bits));
    for n in 0..=n_max {
        match faber_poly(params, n, n + 10) {
            Ok(f) => {
                let m = max_of(arc.par_iter().map(|z| eval_poly(&f, z).abs()), bits);
                checks.push(BoundCheck::new(format!("faber_on_arc_{n}"), m, faber_cap.clone()));
            }
            Err(e) => errors.push((format!("faber_on_arc_{n}"), e)),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let outer = exterior_samples(params, &mut rng, config.exterior_points, 1.1, 3.0);
    let inner = exterior_samples(params, &mut rng, config.exterior_points, 1.0 + 1e-9, 2.0);
    let near = exterior_samples(params, &mut rng, config.exterior_points, 1.0 + 1e-6, 1.1);
    let (outer, inner, near) = match (outer, inner, near) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            errors.push(("exterior_samples".into(), e));
            return Ok(BoundSuite { checks, asymptotic_ratios, errors });
        }
    };
    let arc_subset: Vec<HpComplex> = arc.iter().step_by((arc.len() / config.exterior_points.max(1)).max(1)).cloned().collect();

    // (c), (d): random unit-norm polynomials.
    let gram = build_gram(params, &SupportSet::contiguous(n_max + 1), bits).entries;
    let kernel_scale = Float::with_val(bits, &params.arc_length / pi(bits));
    let sqrt_1mc2 = (Float::with_val(bits, 1u32) - &c2).sqrt();
    let c_sqrt = Float::with_val(bits, c * &sqrt_1mc2);
    let inner_const = Float::with_val(bits, &kernel_scale * 4u32) / &c_sqrt;
    for n in 0..=n_max {
        let polys: Vec<Vec<HpComplex>> = (0..config.samples).map(|_| random_unit_polynomial(&gram, n, &mut rng)).collect();
        let outer_rhs: Vec<Float> = outer
            .iter()
            .map(|s| {
                let p2 = Float::with_val(bits, s.phi_abs.square_ref());
                let frac = Float::with_val(bits, &p2 / Float::with_val(bits, &p2 - 1u32));
                Float::with_val(bits, &kernel_scale * &s.deriv_abs) * frac * p2.pow(n as u32)
            })
            .collect();
        let worst_outer = max_of(
            polys.par_iter().map(|p| {
                let mut m = zero(bits);
                for (s, rhs) in outer.iter().zip(&outer_rhs) {
                    let r = eval_poly(p, &s.z).norm_sqr() / rhs;
                    if r > m {
                        m = r;
                    }
                }
                m
            }),
            bits,
        );
        checks.push(BoundCheck::new(format!("growth_exterior_{n}"), worst_outer, real(bits, 1.0)));

        let inner_rhs = Float::with_val(bits, &inner_const * Float::with_val(bits, 4u32).pow(n as u32));
        let worst_inner = max_of(
            polys.par_iter().map(|p| {
                let mut m = zero(bits);
                for z in inner.iter().map(|s| &s.z).chain(arc_subset.iter()) {
                    let v = eval_poly(p, z).norm_sqr();
                    if v > m {
                        m = v;
                    }
                }
                m
            }),
            bits,
        );
        checks.push(BoundCheck::new(format!("growth_inner_{n}"), worst_inner, inner_rhs));
    }

    // (e) derivative of the inverse map.
    let inv_c_sqrt = Float::with_val(bits, c_sqrt.recip_ref());
    let worst_deriv = max_of(
        outer.par_iter().chain(inner.par_iter()).chain(near.par_iter()).map(|s| {
            let p2 = Float::with_val(bits, s.phi_abs.square_ref());
            let plus_c = Float::with_val(bits, &s.phi_abs + c);
            let rhs = Float::with_val(bits, &inv_c_sqrt * Float::with_val(bits, plus_c.square_ref())) / (p2 - 1u32);
            Float::with_val(bits, &s.deriv_abs / &rhs)
        }),
        bits,
    );
    checks.push(BoundCheck::new("derivative_bound", worst_deriv, real(bits, 1.0)));

    Ok(BoundSuite { checks, asymptotic_ratios, errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_moderate_degree() {
        let p = SystemParams::new(0.1, 128).unwrap();
        let mut cfg = SuiteConfig::new(3);
        cfg.arc_points = 500;
        cfg.exterior_points = 16;
        let s = bound_suite(&p, &cfg).unwrap();
        assert!(s.errors.is_empty(), "{:?}", s.errors);
        for c in &s.checks {
            assert!(c.satisfied, "{} {} {}", c.name, c.lhs.to_f64(), c.rhs.to_f64());
        }
        let b0 = s.checks.iter().find(|c| c.name == "faber_on_arc_0").unwrap();
        assert!((b0.lhs.to_f64() - 1.0).abs() < 1e-30);
        assert!((b0.rhs.to_f64() - 2.4).abs() < 1e-14);
        let a1 = s.checks.iter().find(|c| c.name == "bracket_lower_1").unwrap();
        assert!((a1.lhs.to_f64() - 0.019_141_119_2).abs() < 1e-10);
        assert!((a1.rhs.to_f64() - 0.032_468).abs() < 1e-6);
    }

    #[test]
    fn constant_polynomial_growth_at_two() {
        // P ≡ 1: 1 ≤ (L/π)|Φ'(2)| |Φ|²/(|Φ|² − 1).
        let p = SystemParams::new(0.1, 128).unwrap();
        let z = HpComplex::from_f64(128, 2.0, 0.0);
        let phi = phi_inverse(&p.c, &z).unwrap().abs();
        let d = phi_inverse_prime(&p.c, &z).unwrap().abs();
        let p2 = phi.to_f64().powi(2);
        let rhs = 0.2 * d.to_f64() * p2 / (p2 - 1.0);
        assert!(rhs >= 1.0, "{rhs}");
    }

    #[test]
    fn suite_validates_config() {
        let p = SystemParams::new(0.1, 128).unwrap();
        assert!(bound_suite(&p, &SuiteConfig::new(0)).is_err());
        let mut cfg = SuiteConfig::new(2);
        cfg.samples = 10;
        assert!(bound_suite(&p, &cfg).is_err());
    }
}
