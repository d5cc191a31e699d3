//! Smallest singular values of restricted Fourier matrices: `σ_min(A_T)`, the
//! lower restricted isometry constants `ε_k`, the `ε`-spark, the contiguity
//! scan, and the small-`y` exponent of `λ_min(G)`.

use itertools::Itertools;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::check::BoundCheck;
use crate::error::{Error, Result};
use crate::exact::{pencil_mu, PencilData};
use crate::hp::{pow2, real, zero};
use crate::linalg::{min_eig_adaptive_from, MinEig, LADDER_RELTOL};
use crate::system::{build_gram, SupportSet, SystemParams};
use crate::szego::leading_coeffs;

/// Default cap on the number of supports a single enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1_000_000;

/// `λ_min` of the Gram matrix on `T`, certified by the precision ladder
/// starting at the parameters' precision.
pub fn lambda_min(params: &SystemParams, support: &SupportSet) -> Result<MinEig> {
    if support.is_empty() {
        return Err(Error::InvalidSupport("empty support".into()));
    }
    let build = |bits: u32| Ok(build_gram(params, support, bits).entries);
    min_eig_adaptive_from(build, LADDER_RELTOL, params.bits())
}

/// `σ_min(A_T) = sqrt(λ_min(G_T))`, in `(0, 1]`.
pub fn sigma_min(params: &SystemParams, support: &SupportSet) -> Result<Float> {
    let eig = lambda_min(params, support)?;
    Ok(Float::with_val(params.bits(), &eig.value).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EpsilonMode {
    /// Evaluate only `{0, …, k−1}`, relying on contiguous supports being worst.
    Contiguous,
    /// Minimize over all canonical supports with bounded span.
    Exhaustive,
}

impl EpsilonMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EpsilonMode::Contiguous => "contiguous",
            EpsilonMode::Exhaustive => "exhaustive",
        }
    }
}

impl std::str::FromStr for EpsilonMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contiguous" => Ok(EpsilonMode::Contiguous),
            "exhaustive" => Ok(EpsilonMode::Exhaustive),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// `ε_k` together with where it was attained and how it was searched.
#[derive(Clone, Debug)]
pub struct EpsilonResult {
    pub k: usize,
    pub value: Float,
    pub attaining_support: SupportSet,
    pub mode: EpsilonMode,
    /// Largest last offset searched (equal to `k − 1` in contiguous mode).
    pub span_searched: i64,
    pub supports_examined: usize,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Canonical supports (`τ_0 = 0`, `τ_{k−1} ≤ span`) of size `k`, in lexicographic order.
pub fn canonical_supports(size: usize, span: i64, budget: u128) -> Result<Vec<SupportSet>> {
    if size == 0 {
        return Err(Error::InvalidArgument("support size must be at least 1".into()));
    }
    if span < size as i64 - 1 {
        return Err(Error::SpanTooSmall { span, size });
    }
    let count = binomial(span as u64, size as u64 - 1);
    if count > budget {
        return Err(Error::Budget { count, budget });
    }
    Ok((1..=span)
        .combinations(size - 1)
        .map(|rest| SupportSet::new(std::iter::once(0).chain(rest).collect()).expect("increasing by construction"))
        .collect())
}

/// `σ_min` for every support, evaluated in parallel, returned in input order.
pub fn sigma_min_table(params: &SystemParams, supports: &[SupportSet]) -> Result<Vec<Float>> {
    supports.par_iter().map(|t| sigma_min(params, t)).collect()
}

/// Index of the minimum; values within relative `2^{-bits/2}` count as ties
/// and resolve to the earliest (lexicographically smallest) support.
fn argmin_with_ties(values: &[Float], bits: u32) -> usize {
    let tol = pow2(bits, -(bits as i32) / 2);
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        let threshold = Float::with_val(bits, &values[best]) * (Float::with_val(bits, 1) - &tol);
        if *v < threshold {
            best = i;
        }
    }
    best
}

/// Lower restricted isometry constant `ε_k = min_{|T|=k} σ_min(A_T)`.
pub fn epsilon(params: &SystemParams, k: usize, mode: EpsilonMode, span_max: i64) -> Result<EpsilonResult> {
    epsilon_with_budget(params, k, mode, span_max, DEFAULT_ENUMERATION_BUDGET)
}

pub fn epsilon_with_budget(
    params: &SystemParams,
    k: usize,
    mode: EpsilonMode,
    span_max: i64,
    budget: u128,
) -> Result<EpsilonResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    match mode {
        EpsilonMode::Contiguous => {
            let t = SupportSet::contiguous(k);
            Ok(EpsilonResult {
                k,
                value: sigma_min(params, &t)?,
                attaining_support: t,
                mode,
                span_searched: k as i64 - 1,
                supports_examined: 1,
            })
        }
        EpsilonMode::Exhaustive => {
            let supports = canonical_supports(k, span_max, budget)?;
            let values = sigma_min_table(params, &supports)?;
            let best = argmin_with_ties(&values, params.bits());
            Ok(EpsilonResult {
                k,
                value: values[best].clone(),
                attaining_support: supports[best].clone(),
                mode,
                span_searched: span_max,
                supports_examined: supports.len(),
            })
        }
    }
}

/// Outcome of an `ε`-spark computation.
#[derive(Clone, Debug, PartialEq)]
pub enum SparkValue {
    Exact(usize),
    /// Every size up to the cap passed; the spark is at least this value.
    AtLeast(usize),
}

#[derive(Clone, Debug)]
pub struct SparkResult {
    pub value: SparkValue,
    /// `ε_1, ε_2, …` as far as they were evaluated.
    pub epsilons: Vec<EpsilonResult>,
}

/// Largest `s ≤ k_max` with `ε_s ≥ eps` (0 when `ε_1 < eps`).
pub fn eps_spark(
    params: &SystemParams,
    eps: &Float,
    k_max: usize,
    mode: EpsilonMode,
    span_max: i64,
) -> Result<SparkResult> {
    if *eps <= 0 {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let mut epsilons = Vec::new();
    for k in 1..=k_max {
        let e = epsilon(params, k, mode, span_max.max(k as i64 - 1))?;
        let below = e.value < *eps;
        epsilons.push(e);
        if below {
            return Ok(SparkResult { value: SparkValue::Exact(k - 1), epsilons });
        }
    }
    Ok(SparkResult { value: SparkValue::AtLeast(k_max), epsilons })
}

/// Upper-bound chain and lower-bound ratios for `ε_{n+1}` on contiguous supports.
#[derive(Clone, Debug)]
pub struct SrfBounds {
    pub checks: Vec<BoundCheck>,
    /// `(n, ε_{n+1}, r_n = ε_{n+1} / (c/4)^n)`.
    pub ratios: Vec<(usize, Float, Float)>,
    pub min_ratio: Float,
}

/// For `n = 1..=n_max`: `ε_{n+1} ≤ 1/k_n ≤ 4cⁿ`, and `ε_{n+1}/(c/4)ⁿ > 0` recorded.
pub fn verify_srf_bounds(params: &SystemParams, n_max: usize) -> Result<SrfBounds> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let bits = params.bits();
    let table = leading_coeffs(params, n_max, bits)?;
    let four = real(bits, 4.0);
    let quarter_c = Float::with_val(bits, &params.c / 4u32);
    let mut checks = Vec::new();
    let mut ratios = Vec::new();
    let mut min_ratio: Option<Float> = None;
    let rows: Vec<(usize, Result<Float>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| (n, sigma_min(params, &SupportSet::contiguous(n + 1))))
        .collect();
    for (n, eps) in rows {
        let eps = eps?;
        let inv_kn = Float::with_val(bits, 1) / &table.k_values[n];
        let cn = Float::with_val(bits, params.c.clone().pow(n as u32));
        let four_cn = Float::with_val(bits, &four * &cn);
        checks.push(BoundCheck::new(format!("eps_{}_le_inv_k_{n}", n + 1), eps.clone(), inv_kn.clone()));
        checks.push(BoundCheck::new(format!("inv_k_{n}_le_4c^{n}"), inv_kn, four_cn.clone()));
        checks.push(BoundCheck::new(format!("eps_{}_le_4c^{n}", n + 1), eps.clone(), four_cn));
        let ratio = Float::with_val(bits, &eps / Float::with_val(bits, quarter_c.clone().pow(n as u32)));
        checks.push(BoundCheck::strict(format!("ratio_{n}_positive"), zero(bits), ratio.clone()));
        if min_ratio.as_ref().is_none_or(|m| ratio < *m) {
            min_ratio = Some(ratio.clone());
        }
        ratios.push((n, eps, ratio));
    }
    Ok(SrfBounds { checks, ratios, min_ratio: min_ratio.expect("n_max >= 1") })
}

/// Pair `(T, T')` where every pairwise difference of `T'` dominates that of `T`.
#[derive(Clone, Debug)]
pub struct MonotonicityViolation {
    pub smaller: SupportSet,
    pub larger: SupportSet,
}

#[derive(Clone, Debug)]
pub struct ContiguityReport {
    pub size: usize,
    /// True iff `{0, …, size−1}` is the strict minimizer of `σ_min`.
    pub holds: bool,
    /// `(T, σ_min(A_T))` sorted ascending by `σ_min`.
    pub table: Vec<(SupportSet, Float)>,
    pub dominated_pairs: usize,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
}

/// True when `larger` has every pairwise difference ≥ that of `smaller`, one strictly.
pub fn dominates(larger: &SupportSet, smaller: &SupportSet) -> bool {
    let (a, b) = (larger.offsets(), smaller.offsets());
    if a.len() != b.len() {
        return false;
    }
    let mut strict = false;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (da, db) = (a[j] - a[i], b[j] - b[i]);
            if da < db {
                return false;
            }
            strict |= da > db;
        }
    }
    strict
}

/// Exhaustive check that the contiguous support minimizes `σ_min`, plus the
/// pairwise monotonicity of `λ_min` under domination of offset differences.
pub fn contiguity_scan(params: &SystemParams, size: usize, span_max: i64, budget: u128) -> Result<ContiguityReport> {
    if size < 2 {
        return Err(Error::InvalidArgument("contiguity scan needs size >= 2".into()));
    }
    let supports = canonical_supports(size, span_max, budget)?;
    let values = sigma_min_table(params, &supports)?;

    let violations: Vec<MonotonicityViolation> = (0..supports.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let supports = &supports;
            let values = &values;
            (0..supports.len()).filter_map(move |j| {
                if dominates(&supports[j], &supports[i]) && values[j] <= values[i] {
                    Some(MonotonicityViolation { smaller: supports[i].clone(), larger: supports[j].clone() })
                } else {
                    None
                }
            })
        })
        .collect();
    let dominated_pairs = (0..supports.len())
        .into_par_iter()
        .map(|i| (0..supports.len()).filter(|&j| dominates(&supports[j], &supports[i])).count())
        .sum();

    let mut table: Vec<(SupportSet, Float)> = supports.into_iter().zip(values).collect();
    table.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite").then_with(|| a.0.cmp(&b.0)));
    let contiguous = SupportSet::contiguous(size);
    let holds = table[0].0 == contiguous && table.get(1).is_none_or(|second| second.1 > table[0].1);
    Ok(ContiguityReport { size, holds, table, dominated_pairs, monotonicity_violations: violations })
}

/// Least-squares fit `log λ_min(G_T(y)) ≈ log μ + α log y`.
#[derive(Clone, Debug)]
pub struct SmallYFit {
    pub support: SupportSet,
    pub alpha: f64,
    pub mu_fit: f64,
    /// `(y, λ_min)` at each grid point.
    pub points: Vec<(f64, Float)>,
    /// The rank-one limiting pencil, reported alongside for comparison.
    pub pencil: PencilData,
    /// Exponent `2n` expected from the contiguous two-sided bounds.
    pub expected_alpha: f64,
    /// Exponent `2n + 1` of the Rayleigh-quotient argument, kept for the record.
    pub stated_alpha: f64,
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::FitDegenerate("need at least two points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 || !sxx.is_finite() || !sxy.is_finite() {
        return Err(Error::FitDegenerate("abscissae do not vary".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits the small-`y` exponent of `λ_min(G_T(y))` over `y_grid ⊂ (0, 0.02]`.
pub fn smally_exponent(support: &SupportSet, y_grid: &[f64], bits: u32) -> Result<SmallYFit> {
    if y_grid.len() < 4 {
        return Err(Error::InvalidArgument("need at least 4 grid points".into()));
    }
    if y_grid.iter().any(|&y| !(y > 0.0 && y <= 0.02)) {
        return Err(Error::InvalidArgument("grid values must lie in (0, 0.02]".into()));
    }
    if support.len() < 2 {
        return Err(Error::InvalidSupport("small-y fit needs at least two atoms".into()));
    }
    let points: Vec<(f64, Float)> = y_grid
        .par_iter()
        .map(|&y| {
            let p = SystemParams::new(y, bits)?;
            Ok((y, lambda_min(&p, support)?.value))
        })
        .collect::<Result<_>>()?;
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (y, lam) in &points {
        if *lam <= 0 {
            return Err(Error::FitDegenerate(format!("λ_min underflowed at y = {y}")));
        }
        xs.push(y.ln());
        ys.push(Float::with_val(bits, lam.ln_ref()).to_f64());
    }
    let (alpha, intercept) = fit_line(&xs, &ys)?;
    let n = (support.len() - 1) as f64;
    Ok(SmallYFit {
        support: support.clone(),
        alpha,
        mu_fit: intercept.exp(),
        points,
        pencil: pencil_mu(support, bits)?,
        expected_alpha: 2.0 * n,
        stated_alpha: 2.0 * n + 1.0,
    })
}
