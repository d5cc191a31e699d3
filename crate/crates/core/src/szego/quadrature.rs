use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::Float;

use super::polys::eval_poly;
use crate::error::{Error, Result};
use crate::hp::{pi, pow2, zero, HpComplex};
use crate::system::SystemParams;

/// Two successive node counts must agree to this fraction of `∫|f|`.
pub const QUAD_RELTOL: f64 = 1e-13;
pub const QUAD_MAX_NODES: usize = 1 << 16;
const QUAD_START_NODES: usize = 16;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<GaussRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `(P_n(x), P_{n−1}(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 1..n {
        let k = k as u32;
        let t = Float::with_val(bits, x * &p1) * (2 * k + 1);
        let p2 = (t - Float::with_val(bits, &p0 * k)) / (k + 1);
        p0 = std::mem::replace(&mut p1, p2);
    }
    (p1, p0)
}

fn legendre_root(n: usize, i: usize, bits: u32) -> (Float, Float) {
    // f64 Newton first, then a few high-precision steps; each roughly doubles the digits.
    let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
    for _ in 0..100 {
        let (mut p0, mut p1) = (1.0, x);
        for k in 1..n {
            let k = k as f64;
            let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let dx = p1 / dp;
        x -= dx;
        if dx.abs() < 1e-15 {
            break;
        }
    }
    let mut x = Float::with_val(bits, x);
    let tol = pow2(bits, 8 - bits as i32);
    let derivative = |x: &Float, pn: &Float, pn1: &Float| {
        let num = (Float::with_val(bits, x * pn) - pn1) * n as u32;
        num / (Float::with_val(bits, x.square_ref()) - 1u32)
    };
    for _ in 0..(bits.ilog2() + 4) {
        let (pn, pn1) = legendre(n, &x);
        let dp = derivative(&x, &pn, &pn1);
        let dx = pn / dp;
        x -= &dx;
        if dx.abs() < tol {
            break;
        }
    }
    let (pn, pn1) = legendre(n, &x);
    let dp = derivative(&x, &pn, &pn1);
    let one_minus = Float::with_val(bits, 1u32) - Float::with_val(bits, x.square_ref());
    let w = Float::with_val(bits, 2u32) / (one_minus * Float::with_val(bits, dp.square_ref()));
    (x, w)
}

/// The `n`-point rule at `bits` precision, computed once and cached.
pub fn gauss_legendre(n: usize, bits: u32) -> Arc<GaussRule> {
    assert!(n >= 1);
    if let Some(rule) = cache().lock().expect("rule cache").get(&(n, bits)) {
        return rule.clone();
    }
    let half: Vec<(Float, Float)> = (0..n.div_ceil(2)).into_par_iter().map(|i| legendre_root(n, i, bits)).collect();
    let mut pairs: Vec<(Float, Float)> = Vec::with_capacity(n);
    for (x, w) in &half {
        pairs.push((-x.clone(), w.clone()));
    }
    for (i, (x, w)) in half.iter().enumerate().rev() {
        if n % 2 == 1 && i == half.len() - 1 {
            continue;
        }
        pairs.push((x.clone(), w.clone()));
    }
    if n % 2 == 1 {
        // The middle root is exactly zero.
        let mid = n / 2;
        pairs[mid].0 = zero(bits);
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let rule = Arc::new(GaussRule {
        nodes: pairs.iter().map(|p| p.0.clone()).collect(),
        weights: pairs.into_iter().map(|p| p.1).collect(),
    });
    cache().lock().expect("rule cache").insert((n, bits), rule.clone());
    rule
}

/// Converged quadrature value with the node count that achieved it.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: HpComplex,
    pub nodes: usize,
    /// `∫|f|`, the scale against which convergence is judged.
    pub abs_scale: Float,
}

fn apply_rule<F>(f: &F, a: &Float, b: &Float, n: usize, bits: u32) -> Result<(HpComplex, Float)>
where
    F: Fn(&Float) -> Result<HpComplex> + Sync,
{
    let rule = gauss_legendre(n, bits);
    let mid = Float::with_val(bits, a + b) / 2u32;
    let half = Float::with_val(bits, b - a) / 2u32;
    let terms: Vec<(HpComplex, Float)> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            let t = Float::with_val(bits, x * &half) + &mid;
            let v = f(&t)?;
            let wv = v.scale(w);
            let a = Float::with_val(bits, v.abs() * w);
            Ok((wv, a))
        })
        .collect::<Result<_>>()?;
    let mut sum = HpComplex::zero(bits);
    let mut abs = zero(bits);
    for (v, a) in &terms {
        sum = &sum + v;
        abs += a;
    }
    Ok((sum.scale(&half), abs * Float::with_val(bits, half.abs_ref())))
}

/// `∫_a^b f(t) dt` by Gauss–Legendre with node doubling until two successive
/// values agree to [`QUAD_RELTOL`] of `∫|f|`.
pub fn integrate<F>(f: F, a: &Float, b: &Float, bits: u32) -> Result<Quadrature>
where
    F: Fn(&Float) -> Result<HpComplex> + Sync,
{
    let (mut prev, _) = apply_rule(&f, a, b, QUAD_START_NODES, bits)?;
    let mut n = QUAD_START_NODES * 2;
    while n <= QUAD_MAX_NODES {
        let (cur, abs_scale) = apply_rule(&f, a, b, n, bits)?;
        let diff = (&cur - &prev).abs();
        if diff <= Float::with_val(bits, &abs_scale * QUAD_RELTOL) {
            return Ok(Quadrature { value: cur, nodes: n, abs_scale });
        }
        prev = cur;
        n *= 2;
    }
    Err(Error::QuadratureNonConvergence { nodes: QUAD_MAX_NODES })
}

/// [`integrate`] after `t = a + (b − a)(1 − cos πu)/2`, which smooths
/// square-root behaviour at both endpoints.
pub fn integrate_smoothed<F>(f: F, a: &Float, b: &Float, bits: u32) -> Result<Quadrature>
where
    F: Fn(&Float) -> Result<HpComplex> + Sync,
{
    let len = Float::with_val(bits, b - a);
    let p = pi(bits);
    let g = |u: &Float| {
        let pu = Float::with_val(bits, &p * u);
        let (s, c) = pu.sin_cos(Float::new(bits));
        let t = Float::with_val(bits, Float::with_val(bits, 1u32 - c) * &len) / 2u32 + a;
        let jac = Float::with_val(bits, &len * &p) * s / 2u32;
        Ok(f(&t)?.scale(&jac))
    };
    integrate(g, &zero(bits), &Float::with_val(bits, 1), bits)
}

/// `⟨f, g⟩ = (1/L) ∫_{−πy}^{πy} f(e^{iθ}) conj(g(e^{iθ})) dθ` for polynomials in
/// ascending coefficient order.
pub fn arc_inner_product(f: &[HpComplex], g: &[HpComplex], params: &SystemParams) -> Result<Quadrature> {
    let bits = params.bits();
    let half_angle = Float::with_val(bits, pi(bits) * &params.y);
    let integrand = |theta: &Float| {
        let z = HpComplex::cis(theta);
        Ok(&eval_poly(f, &z) * &eval_poly(g, &z).conj())
    };
    let mut q = integrate(integrand, &Float::with_val(bits, -&half_angle), &half_angle, bits)?;
    q.value = q.value.scale(&(Float::with_val(bits, 1) / &params.arc_length));
    q.abs_scale /= &params.arc_length;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use crate::system::gram_entry;

    fn monomial(k: usize, bits: u32) -> Vec<HpComplex> {
        let mut v = vec![HpComplex::zero(bits); k + 1];
        v[k] = HpComplex::one(bits);
        v
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let bits = 128;
        let rule = gauss_legendre(5, bits);
        // Exact for degree ≤ 9: ∫ x^8 = 2/9.
        let mut s = zero(bits);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += Float::with_val(bits, x.clone().pow(8u32) * w);
        }
        assert!((s.to_f64() - 2.0 / 9.0).abs() < 1e-30);
        let total: f64 = rule.weights.iter().map(Float::to_f64).sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert_eq!(rule.nodes[2], 0);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rule_nodes_match_known_values() {
        let rule = gauss_legendre(2, 128);
        let x = (1.0f64 / 3.0).sqrt();
        assert!((rule.nodes[1].to_f64() - x).abs() < 1e-16);
        assert!((rule.weights[0].to_f64() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn integrate_smooth_and_endpoint_singular() {
        let bits = 128;
        let q = integrate(|t: &Float| Ok(HpComplex::from_real(t.clone().exp())), &zero(bits), &Float::with_val(bits, 1), bits).unwrap();
        assert!((q.value.re.to_f64() - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        // ∫_0^1 √t dt = 2/3 with a square-root endpoint.
        let q = integrate_smoothed(|t: &Float| Ok(HpComplex::from_real(t.clone().sqrt())), &zero(bits), &Float::with_val(bits, 1), bits).unwrap();
        assert!((q.value.re.to_f64() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn arc_inner_products_match_gram() {
        let p = SystemParams::new(0.1, 128).unwrap();
        let one = monomial(0, 128);
        let q = arc_inner_product(&one, &one, &p).unwrap();
        assert!((q.value.re.to_f64() - 1.0).abs() < 1e-13);
        let q = arc_inner_product(&monomial(1, 128), &one, &p).unwrap();
        assert!((q.value.re.to_f64() - gram_entry(&p, 1).to_f64()).abs() < 1e-13);
        assert!(q.value.im.to_f64().abs() < 1e-13);
        let q = arc_inner_product(&monomial(2, 128), &monomial(5, 128), &p).unwrap();
        assert!((q.value.re.to_f64() - gram_entry(&p, 3).to_f64()).abs() < 1e-13);
    }
}
