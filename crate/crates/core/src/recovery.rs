//! Brute-force `ℓ0` recovery, the adversarial pair that realizes the minimax
//! lower bound, the minimax sandwich experiment and the SRF scaling fit.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rug::Float;

use crate::check::BoundCheck;
use crate::error::{Error, Result};
use crate::hp::{pow2, HpComplex, MAX_PRECISION_BITS};
use crate::linalg::{cholesky, cholesky_solve, normalize, normalize_sign};
use crate::matrix::{dot, RealMatrix};
use crate::spectral::{epsilon, fit_line, lambda_min, EpsilonMode};
use crate::system::{
    build_gram, complex_quadratic_form, measurement_norm_sqr, synthesize, CoefficientVector, MeasurementVector,
    SupportSet, SystemParams,
};

/// Largest window `l0_solve` will enumerate by default.
pub const DEFAULT_WINDOW_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub estimate: CoefficientVector,
    pub support: SupportSet,
    pub sparsity: usize,
    /// `‖f − A x̂‖`.
    pub residual: Float,
    pub supports_examined: u128,
    /// Precision at which the returned fit was certified.
    pub bits_used: u32,
}

/// Least-squares fit of `f` on one support.
struct SupportFit {
    x: Vec<HpComplex>,
    residual_sqr: Float,
    bits: u32,
}

/// Window data rebuilt at a given precision.
struct WindowData {
    gram: RealMatrix,
    coeffs: Vec<HpComplex>,
    norm_sqr: Float,
}

impl WindowData {
    fn new(params: &SystemParams, f: &MeasurementVector, bits: u32) -> Result<Self> {
        let gram = build_gram(params, &f.window, bits).entries;
        let coeffs = f
            .coeffs
            .iter()
            .map(|z| HpComplex::new(Float::with_val(bits, &z.re), Float::with_val(bits, &z.im)))
            .collect();
        let norm_sqr = measurement_norm_sqr(params, f, bits)?;
        Ok(Self { gram, coeffs, norm_sqr })
    }
}

/// `None` when the precision is insufficient for a trustworthy residual.
fn fit_support(data: &WindowData, idx: &[usize], slack: &Float) -> Option<SupportFit> {
    let bits = data.gram.bits();
    if idx.is_empty() {
        return Some(SupportFit { x: Vec::new(), residual_sqr: data.norm_sqr.clone(), bits });
    }
    let n = data.coeffs.len();
    let column = |j: usize, part: fn(&HpComplex) -> &Float| {
        let mut acc = Float::with_val(bits, 0);
        for i in 0..n {
            acc += Float::with_val(bits, &data.gram[(i, j)] * part(&data.coeffs[i]));
        }
        acc
    };
    let b_re: Vec<Float> = idx.iter().map(|&j| column(j, |z| &z.re)).collect();
    let b_im: Vec<Float> = idx.iter().map(|&j| column(j, |z| &z.im)).collect();
    let l = cholesky(&data.gram.principal(idx)).ok()?;
    let x_re = cholesky_solve(&l, &b_re);
    let x_im = cholesky_solve(&l, &b_im);
    let explained = dot(&b_re, &x_re) + dot(&b_im, &x_im);
    let residual_sqr = Float::with_val(bits, &data.norm_sqr - &explained);

    // Forward error of the Schur complement grows like κ(G_T) u.
    let (mut lo, mut hi) = (l[(0, 0)].clone(), l[(0, 0)].clone());
    for i in 1..idx.len() {
        let d = &l[(i, i)];
        if *d < lo {
            lo = d.clone();
        }
        if *d > hi {
            hi = d.clone();
        }
    }
    let kappa = Float::with_val(bits, (hi / lo).square_ref());
    let estimate = Float::with_val(bits, &data.norm_sqr * &kappa) * (16 * (idx.len() as u32 + 1)) * pow2(bits, -(bits as i32));
    if estimate > Float::with_val(bits, slack / 2u32) {
        return None;
    }
    let x = x_re.into_iter().zip(x_im).map(|(re, im)| HpComplex::new(re, im)).collect();
    Some(SupportFit { x, residual_sqr, bits })
}

/// `ℓ0` minimizer over subsets of the window, smallest cardinality first and
/// lexicographic within a cardinality.
pub fn l0_solve(params: &SystemParams, f: &MeasurementVector, sigma: &Float, k_cap: usize) -> Result<RecoveryResult> {
    l0_solve_capped(params, f, sigma, k_cap, DEFAULT_WINDOW_CAP)
}

pub fn l0_solve_capped(
    params: &SystemParams,
    f: &MeasurementVector,
    sigma: &Float,
    k_cap: usize,
    window_cap: usize,
) -> Result<RecoveryResult> {
    let base_bits = params.bits();
    if *sigma < 0 || sigma.is_nan() {
        return Err(Error::InvalidArgument("sigma must be nonnegative".into()));
    }
    let n = f.window.len();
    if n > window_cap {
        return Err(Error::InvalidArgument(format!("window of size {n} exceeds the cap {window_cap}")));
    }
    if k_cap > n {
        return Err(Error::InvalidArgument(format!("k_cap {k_cap} exceeds the window size {n}")));
    }
    let infeasible = || Error::Infeasible { k_cap, sigma: format!("{:e}", sigma.to_f64()) };
    if f.rho > *sigma {
        return Err(infeasible());
    }

    let base = WindowData::new(params, f, base_bits)?;
    // Decisions are made to within ‖f‖² 2^{-bits/2}; escalation only tightens the solves.
    let slack = Float::with_val(base_bits, &base.norm_sqr * pow2(base_bits, -(base_bits as i32) / 2));
    let threshold = Float::with_val(base_bits, sigma.square_ref()) + &slack;

    let solve = |idx: &[usize]| -> Result<SupportFit> {
        if let Some(fit) = fit_support(&base, idx, &slack) {
            return Ok(fit);
        }
        let mut bits = base_bits * 2;
        while bits <= MAX_PRECISION_BITS {
            let data = WindowData::new(params, f, bits)?;
            if let Some(fit) = fit_support(&data, idx, &slack) {
                return Ok(fit);
            }
            bits *= 2;
        }
        Err(Error::PrecisionCap { bits: MAX_PRECISION_BITS })
    };

    let mut examined: u128 = 0;
    for s in 0..=k_cap {
        let combos: Vec<Vec<usize>> = (0..n).combinations(s).collect();
        let found = combos.par_iter().enumerate().find_map_first(|(pos, idx)| match solve(idx) {
            Ok(fit) if fit.residual_sqr <= threshold => Some(Ok((pos, idx.clone(), fit))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        });
        match found {
            None => examined += combos.len() as u128,
            Some(Err(e)) => return Err(e),
            Some(Ok((pos, idx, fit))) => {
                examined += pos as u128 + 1;
                let support = SupportSet::new(idx.iter().map(|&i| f.window.offsets()[i]).collect())?;
                let values = fit
                    .x
                    .iter()
                    .map(|z| HpComplex::new(Float::with_val(base_bits, &z.re), Float::with_val(base_bits, &z.im)))
                    .collect();
                let residual_sqr = Float::with_val(base_bits, &fit.residual_sqr);
                let residual = if residual_sqr < 0 { Float::with_val(base_bits, 0) } else { residual_sqr.sqrt() };
                return Ok(RecoveryResult {
                    estimate: CoefficientVector::new(support.clone(), values)?,
                    sparsity: support.len(),
                    support,
                    residual,
                    supports_examined: examined,
                    bits_used: fit.bits,
                });
            }
        }
    }
    Err(infeasible())
}

/// `‖f − A x‖²` evaluated directly as `(c − x)* G_W (c − x) + ρ²`.
pub fn direct_residual_sqr(params: &SystemParams, f: &MeasurementVector, x: &CoefficientVector, bits: u32) -> Result<Float> {
    let embedded = x.embed(&f.window, bits)?;
    let diff: Vec<HpComplex> = f.coeffs.iter().zip(&embedded).map(|(a, b)| a - b).collect();
    let g = build_gram(params, &f.window, bits).entries;
    let rho = Float::with_val(bits, &f.rho);
    Ok(complex_quadratic_form(&g, &diff) + Float::with_val(bits, rho.square_ref()))
}

/// A seeded `k`-sparse signal on a contiguous window with its measurement,
/// perturbed inside the window by noise of norm exactly `σ/2`.
#[derive(Clone, Debug)]
pub struct RecoveryInstance {
    pub x0: CoefficientVector,
    pub f: MeasurementVector,
    /// `‖A e‖` of the added perturbation.
    pub noise_norm: Float,
}

pub fn random_instance(params: &SystemParams, window: usize, k: usize, sigma: &Float, seed: u64) -> Result<RecoveryInstance> {
    let bits = params.bits();
    if k == 0 || k > window {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= window, got k = {k}, window = {window}")));
    }
    if *sigma <= 0 {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let window_set = SupportSet::contiguous(window);
    let mut positions = rand::seq::index::sample(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed), window, k).into_vec();
    positions.sort_unstable();
    let values = positions.iter().map(|_| HpComplex::from_f64(bits, normal(), normal())).collect();
    let x0 = CoefficientVector::new(SupportSet::new(positions.iter().map(|&i| i as i64).collect())?, values)?;

    let raw: Vec<HpComplex> = (0..window).map(|_| HpComplex::from_f64(bits, normal(), normal())).collect();
    let noise = MeasurementVector::new(window_set.clone(), raw, Float::with_val(bits, 0))?;
    let scale = Float::with_val(bits, sigma / 2u32) / measurement_norm_sqr(params, &noise, bits)?.sqrt();
    let clean = x0.embed(&window_set, bits)?;
    let coeffs = clean.iter().zip(&noise.coeffs).map(|(a, e)| a + &e.scale(&scale)).collect();
    let f = MeasurementVector::new(window_set, coeffs, Float::with_val(bits, 0))?;
    Ok(RecoveryInstance { x0, f, noise_norm: Float::with_val(bits, sigma / 2u32) })
}

/// How `adversarial_pair` handles equal magnitudes at the `k`/`k+1` threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TiePolicy {
    /// Fail with [`Error::ThresholdTie`].
    Error,
    /// Give the tied entry with the lower index to `x1` and report the tie.
    #[default]
    LowestIndex,
}

/// Two `k`-sparse vectors that no `σ`-accurate measurement can tell apart.
#[derive(Clone, Debug)]
pub struct AdversarialPair {
    pub k: usize,
    pub x0: CoefficientVector,
    pub x1: CoefficientVector,
    pub t_star: SupportSet,
    pub eps2k: Float,
    pub sigma: Float,
    /// True when the threshold split had to break a magnitude tie.
    pub tie_broken: bool,
}

/// Splits the least singular vector on the minimizing `2k`-support into its
/// `k` largest entries (`x1`) and the rest (`−x0`), scaled by `σ/ε_{2k}`.
pub fn adversarial_pair(
    params: &SystemParams,
    k: usize,
    sigma: &Float,
    mode: EpsilonMode,
    span_max: i64,
    tie_policy: TiePolicy,
) -> Result<AdversarialPair> {
    let bits = params.bits();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if *sigma <= 0 {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let t_star = epsilon(params, 2 * k, mode, span_max)?.attaining_support;
    let eig = lambda_min(params, &t_star)?;
    let eps2k = Float::with_val(bits, &eig.value).sqrt();
    let mut v: Vec<Float> = eig.vector.iter().map(|x| Float::with_val(bits, x)).collect();
    normalize(&mut v);
    normalize_sign(&mut v);

    let mags: Vec<Float> = v.iter().map(|x| Float::with_val(bits, x.abs_ref())).collect();
    let mut order: Vec<usize> = (0..v.len()).collect();
    // Stable sort keeps lower indices first among equal magnitudes.
    order.sort_by(|&a, &b| mags[b].partial_cmp(&mags[a]).expect("finite"));
    let gap = Float::with_val(bits, &mags[order[k - 1]] - &mags[order[k]]);
    let tie_tol = pow2(bits, -(bits as i32) / 2) * &mags[order[0]];
    let tied = gap <= tie_tol;
    if tied {
        if tie_policy == TiePolicy::Error {
            return Err(Error::ThresholdTie { k });
        }
        // Within the tied band, prefer lower indices for x1.
        let pivot = mags[order[k - 1]].clone();
        let band = |i: usize| Float::with_val(bits, &mags[i] - &pivot).abs() <= tie_tol;
        let strict_top: Vec<usize> = order.iter().copied().filter(|&i| mags[i] > pivot && !band(i)).collect();
        let mut tied_idx: Vec<usize> = order.iter().copied().filter(|&i| band(i)).collect();
        tied_idx.sort_unstable();
        let rest: Vec<usize> = order.iter().copied().filter(|&i| mags[i] < pivot && !band(i)).collect();
        order = strict_top.into_iter().chain(tied_idx).chain(rest).collect();
    }
    let mut top: Vec<usize> = order[..k].to_vec();
    let mut bottom: Vec<usize> = order[k..].to_vec();
    top.sort_unstable();
    bottom.sort_unstable();

    let scale = Float::with_val(bits, sigma / &eps2k);
    let offsets = t_star.offsets();
    let x1 = CoefficientVector::from_real(
        SupportSet::new(top.iter().map(|&i| offsets[i]).collect())?,
        top.iter().map(|&i| Float::with_val(bits, &v[i] * &scale)).collect(),
    )?;
    let x0 = CoefficientVector::from_real(
        SupportSet::new(bottom.iter().map(|&i| offsets[i]).collect())?,
        bottom.iter().map(|&i| -Float::with_val(bits, &v[i] * &scale)).collect(),
    )?;

    let pair = AdversarialPair { k, x0, x1, t_star, eps2k, sigma: sigma.clone(), tie_broken: tied };
    verify_pair(params, &pair)?;
    Ok(pair)
}

/// `(‖x0 − x1‖, ‖A(x0 − x1)‖)` recomputed from the Gram matrix on `T*`.
pub fn pair_norms(params: &SystemParams, pair: &AdversarialPair, bits: u32) -> Result<(Float, Float)> {
    let d = pair.x0.difference(&pair.x1, bits);
    let on_t = d.embed(&pair.t_star, bits)?;
    let g = build_gram(params, &pair.t_star, bits).entries;
    Ok((d.norm(bits), complex_quadratic_form(&g, &on_t).sqrt()))
}

fn verify_pair(params: &SystemParams, pair: &AdversarialPair) -> Result<()> {
    let bits = params.bits();
    let disjoint = pair.x0.support.offsets().iter().all(|t| !pair.x1.support.contains(*t));
    if !disjoint || pair.x0.support.len() + pair.x1.support.len() != pair.t_star.len() {
        return Err(Error::Postcondition("x0 and x1 must partition T*".into()));
    }
    let (dist, image) = pair_norms(params, pair, bits)?;
    let target = Float::with_val(bits, &pair.sigma / &pair.eps2k);
    let tol = 1e-10;
    if crate::hp::rel_diff(&dist, &target) > tol {
        return Err(Error::Postcondition(format!("‖x0 − x1‖ = {:e}, expected {:e}", dist.to_f64(), target.to_f64())));
    }
    if image > Float::with_val(bits, &pair.sigma * (1.0 + tol)) {
        return Err(Error::Postcondition(format!("‖A(x0 − x1)‖ = {:e} exceeds sigma", image.to_f64())));
    }
    Ok(())
}

/// Measured errors of the `ℓ0` estimate against the minimax bounds.
#[derive(Clone, Debug)]
pub struct MinimaxReport {
    pub k: usize,
    pub sigma: Float,
    pub eps2k: Float,
    pub pair: AdversarialPair,
    pub recovery: RecoveryResult,
    /// `‖x̂ − x0‖`.
    pub error_x0: Float,
    /// `‖x̂ − x1‖`.
    pub error_x1: Float,
    /// `σ/(2ε_{2k})`.
    pub lower_bound: Float,
    /// `2σ/ε_{2k}`.
    pub upper_bound: Float,
    pub checks: Vec<BoundCheck>,
}

impl MinimaxReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }
}

/// Runs `ℓ0` recovery on `f = A x0` and checks `‖x̂ − x0‖ ≤ 2σ/ε_{2k}` and
/// `max(‖x̂ − x0‖, ‖x̂ − x1‖) ≥ σ/(2ε_{2k})`.
pub fn minimax_experiment(params: &SystemParams, k: usize, sigma: &Float, mode: EpsilonMode, span_max: i64) -> Result<MinimaxReport> {
    let bits = params.bits();
    let pair = adversarial_pair(params, k, sigma, mode, span_max, TiePolicy::LowestIndex)?;
    let f = synthesize(params, &pair.x0, &pair.t_star)?;
    let recovery = l0_solve(params, &f, sigma, k)?;

    // ε_{2k} is recomputed on T* from its Gram matrix rather than reused.
    let eps2k = crate::spectral::sigma_min(params, &pair.t_star)?;
    let error_x0 = recovery.estimate.difference(&pair.x0, bits).norm(bits);
    let error_x1 = recovery.estimate.difference(&pair.x1, bits).norm(bits);
    let ratio = Float::with_val(bits, sigma / &eps2k);
    let upper_bound = Float::with_val(bits, &ratio * 2u32);
    let lower_bound = Float::with_val(bits, &ratio / 2u32);
    let worst = if error_x0 > error_x1 { error_x0.clone() } else { error_x1.clone() };
    let (_, image) = pair_norms(params, &pair, bits)?;
    let checks = vec![
        BoundCheck::new("upper_error_x0", error_x0.clone(), upper_bound.clone()),
        BoundCheck::new("lower_worst_error", lower_bound.clone(), worst),
        BoundCheck::new("pair_indistinguishable", image, Float::with_val(bits, sigma * (1.0 + 1e-10))),
        BoundCheck::new("estimate_feasible", recovery.residual.clone(), Float::with_val(bits, sigma * (1.0 + 1e-10))),
    ];
    Ok(MinimaxReport { k, sigma: sigma.clone(), eps2k, pair, recovery, error_x0, error_x1, lower_bound, upper_bound, checks })
}

/// Log–log fit of `ε_{2k}` against the superresolution factor.
#[derive(Clone, Debug)]
pub struct ScalingFit {
    pub k: usize,
    pub slope: f64,
    pub intercept: f64,
    pub expected_slope: f64,
    /// `(SRF, ε_{2k})`.
    pub table: Vec<(f64, Float)>,
}

/// `ε_{2k}(1/SRF)` on contiguous supports and its least-squares slope in log–log scale.
pub fn srf_scaling(k: usize, srf_grid: &[f64], bits: u32) -> Result<ScalingFit> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if srf_grid.len() < 4 {
        return Err(Error::InvalidArgument("need at least 4 SRF values".into()));
    }
    if srf_grid.iter().any(|&s| !(s > 2.0 && s.is_finite())) {
        return Err(Error::InvalidArgument("every SRF must exceed 2".into()));
    }
    let table: Vec<(f64, Float)> = srf_grid
        .par_iter()
        .map(|&srf| {
            let params = SystemParams::from_srf(&format!("{srf}"), bits)?;
            Ok((srf, epsilon(&params, 2 * k, EpsilonMode::Contiguous, 0)?.value))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = table.iter().map(|(s, _)| s.ln()).collect();
    let ys: Vec<f64> = table.iter().map(|(_, e)| Float::with_val(bits, e.ln_ref()).to_f64()).collect();
    let (slope, intercept) = fit_line(&xs, &ys)?;
    Ok(ScalingFit { k, slope, intercept, expected_slope: -(2.0 * k as f64 - 1.0), table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{real, rel_diff, zero};

    fn params(y: f64) -> SystemParams {
        SystemParams::new(y, 256).unwrap()
    }

    fn spike(offset: i64, value: f64) -> CoefficientVector {
        CoefficientVector::from_real(SupportSet::new(vec![offset]).unwrap(), vec![real(256, value)]).unwrap()
    }

    #[test]
    fn exact_single_spike() {
        let p = params(0.1);
        let f = synthesize(&p, &spike(3, 2.0), &SupportSet::contiguous(6)).unwrap();
        let r = l0_solve(&p, &f, &zero(256), 3).unwrap();
        assert_eq!(r.sparsity, 1);
        assert_eq!(r.support.offsets(), &[3]);
        assert!((r.estimate.values[0].re.to_f64() - 2.0).abs() < 1e-30);
        assert!(r.residual < 1e-30);
        assert_eq!(r.supports_examined, 1 + 4);
    }

    #[test]
    fn zero_measurement_is_zero_sparse() {
        let p = params(0.1);
        let f = synthesize(&p, &CoefficientVector::zero(), &SupportSet::contiguous(4)).unwrap();
        let r = l0_solve(&p, &f, &zero(256), 2).unwrap();
        assert_eq!(r.sparsity, 0);
        assert!(r.support.is_empty());
    }

    #[test]
    fn orthogonal_remainder_beyond_sigma_is_infeasible() {
        let p = params(0.1);
        let f = MeasurementVector::new(SupportSet::contiguous(3), vec![HpComplex::zero(256); 3], real(256, 0.5)).unwrap();
        assert!(matches!(l0_solve(&p, &f, &real(256, 0.1), 3), Err(Error::Infeasible { .. })));
        assert!(l0_solve(&p, &f, &real(256, 0.1), 4).is_err());
        assert!(l0_solve(&p, &f, &real(256, -1.0), 1).is_err());
    }

    #[test]
    fn schur_residual_matches_direct_residual() {
        let p = params(0.15);
        let window = SupportSet::contiguous(6);
        let coeffs: Vec<HpComplex> =
            [0.3, -1.2, 0.8, 0.05, 2.0, -0.4].iter().enumerate().map(|(i, v)| HpComplex::from_f64(256, *v, 0.1 * i as f64)).collect();
        let f = MeasurementVector::new(window, coeffs, real(256, 0.01)).unwrap();
        let norm = measurement_norm_sqr(&p, &f, 256).unwrap().sqrt();
        let r = l0_solve(&p, &f, &Float::with_val(256, &norm * 0.3), 6).unwrap();
        let direct = direct_residual_sqr(&p, &f, &r.estimate, 256).unwrap().sqrt();
        assert!(rel_diff(&direct, &r.residual) < 1e-12);
    }

    #[test]
    fn two_atom_pair_breaks_the_symmetric_tie() {
        let p = params(0.1);
        let sigma = real(256, 1e-3);
        let pair = adversarial_pair(&p, 1, &sigma, EpsilonMode::Contiguous, 0, TiePolicy::LowestIndex).unwrap();
        assert!(pair.tie_broken);
        assert_eq!(pair.t_star.offsets(), &[0, 1]);
        assert_eq!(pair.x1.support.offsets(), &[0]);
        assert_eq!(pair.x0.support.offsets(), &[1]);
        let expected = 1e-3 / (pair.eps2k.to_f64() * 2f64.sqrt());
        assert!((pair.x1.values[0].re.to_f64().abs() / expected - 1.0).abs() < 1e-12);
        assert!((pair.x0.values[0].re.to_f64().abs() / expected - 1.0).abs() < 1e-12);
        let strict = adversarial_pair(&p, 1, &sigma, EpsilonMode::Contiguous, 0, TiePolicy::Error);
        assert_eq!(strict.unwrap_err(), Error::ThresholdTie { k: 1 });
    }

    #[test]
    fn four_atom_pair_distance_at_512_bits() {
        let p = SystemParams::new(0.2, 512).unwrap();
        let sigma = real(512, 1e-6);
        let pair = adversarial_pair(&p, 2, &sigma, EpsilonMode::Contiguous, 0, TiePolicy::LowestIndex).unwrap();
        let (dist, image) = pair_norms(&p, &pair, 512).unwrap();
        let scaled = Float::with_val(512, &dist * &pair.eps2k) / &sigma;
        assert!((scaled.to_f64() - 1.0).abs() < 1e-10);
        assert!((image.to_f64() / 1e-6 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn minimax_small_case_and_homogeneity() {
        let p = params(0.2);
        let r = minimax_experiment(&p, 1, &real(256, 1e-4), EpsilonMode::Contiguous, 0).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        let r2 = minimax_experiment(&p, 1, &real(256, 2e-4), EpsilonMode::Contiguous, 0).unwrap();
        assert!(rel_diff(&r2.upper_bound, &Float::with_val(256, &r.upper_bound * 2u32)) < 1e-30);
        assert!(rel_diff(&r2.lower_bound, &Float::with_val(256, &r.lower_bound * 2u32)) < 1e-30);
        assert!(minimax_experiment(&p, 1, &zero(256), EpsilonMode::Contiguous, 0).is_err());
    }

    #[test]
    fn scaling_slope_for_single_atoms() {
        let fit = srf_scaling(1, &[8.0, 12.0, 16.0, 24.0, 32.0], 256).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.05, "{}", fit.slope);
        assert_eq!(fit.expected_slope, -1.0);
        assert!(srf_scaling(1, &[8.0, 12.0, 16.0], 256).is_err());
        assert!(srf_scaling(1, &[2.0, 12.0, 16.0, 20.0], 256).is_err());
    }

    #[test]
    fn random_instance_is_recovered_within_the_upper_bound() {
        let p = params(0.2);
        let sigma = real(256, 1e-3);
        let inst = random_instance(&p, 6, 2, &sigma, 3).unwrap();
        let noise = synthesize(&p, &inst.x0, &inst.f.window).unwrap();
        let diff: Vec<HpComplex> = inst.f.coeffs.iter().zip(&noise.coeffs).map(|(a, b)| a - b).collect();
        let g = build_gram(&p, &inst.f.window, 256).entries;
        assert!(rel_diff(&complex_quadratic_form(&g, &diff).sqrt(), &real(256, 5e-4)) < 1e-30);
        let r = l0_solve(&p, &inst.f, &sigma, 2).unwrap();
        assert!(r.sparsity <= 2 && r.residual <= sigma);
        let eps4 = epsilon(&p, 4, EpsilonMode::Contiguous, 0).unwrap().value;
        let err = r.estimate.difference(&inst.x0, 256).norm(256);
        assert!(err <= Float::with_val(256, &sigma * 2u32) / eps4);
        let again = random_instance(&p, 6, 2, &sigma, 3).unwrap();
        assert_eq!(again.x0, inst.x0);
    }

    #[test]
    fn slope_ignores_constant_rescaling() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        let ys = [0.5f64, -1.0, -2.2, -3.9];
        let shifted: Vec<f64> = ys.iter().map(|y| y + 7.3).collect();
        let (a, b) = fit_line(&xs, &ys).unwrap();
        let (a2, b2) = fit_line(&xs, &shifted).unwrap();
        assert!((a - a2).abs() < 1e-12);
        assert!((b2 - b - 7.3).abs() < 1e-12);
    }
}
