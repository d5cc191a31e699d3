use rug::Float;
use serde_json::{json, Value};
use srf_core::acceptance::run_all;
use srf_core::hp::{pi, real};
use srf_core::recovery::{adversarial_pair, l0_solve, minimax_experiment, pair_norms, random_instance, srf_scaling, TiePolicy};
use srf_core::spectral::{
    contiguity_scan, eps_spark, epsilon, lambda_min, smally_exponent, verify_srf_bounds, EpsilonResult, SparkValue,
    DEFAULT_ENUMERATION_BUDGET,
};
use srf_core::szego::{
    bound_suite, faber_poly, leading_coeffs, phi_inverse, phi_inverse_prime, szego_kernel, szego_kernel_at_infinity,
    ArcGeometry, ExtPoint, SuiteConfig,
};
use srf_core::{build_gram, BoundCheck, HpComplex, SupportSet};

use crate::args::{Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{coefficients, complex, num, support, Outcome, Table};

/// Tolerance on the fitted slope of the scaling experiment.
pub const SLOPE_TOL: f64 = 0.15;
/// Tolerance on the fitted small-`y` exponent.
pub const EXPONENT_TOL: f64 = 0.05;

pub fn execute(config: &RunConfig) -> CliResult<Outcome> {
    match config.subcommand {
        Command::Gram => gram(config),
        Command::Smin => smin(config),
        Command::Epsilon => epsilon_cmd(config),
        Command::Spark => spark(config),
        Command::Contiguity => contiguity(config),
        Command::Asymptote => asymptote(config),
        Command::Szego => szego(config),
        Command::Bounds => bounds(config),
        Command::Recover => recover(config),
        Command::Adversary => adversary(config),
        Command::Minimax => minimax(config),
        Command::Scaling => scaling(config),
        Command::Selftest => selftest(),
    }
}

fn epsilon_json(e: &EpsilonResult) -> Value {
    json!({
        "k": e.k,
        "value": num(&e.value),
        "attaining_support": support(&e.attaining_support),
        "mode": e.mode.as_str(),
        "span_searched": e.span_searched,
        "supports_examined": e.supports_examined,
    })
}

fn gram(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let t = config.support_or_contiguous()?;
    let g = build_gram(&params, &t, params.bits()).entries;
    let matrix: Vec<Vec<Value>> = (0..t.len()).map(|i| g.row(i).iter().map(num).collect()).collect();
    Ok(Outcome::new(json!({ "support": support(&t), "bits": params.bits(), "matrix": matrix })))
}

fn smin(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let t = config.support_or_contiguous()?;
    let eig = lambda_min(&params, &t)?;
    let sigma = Float::with_val(eig.value.prec(), eig.value.sqrt_ref());
    let ladder: Vec<Value> = eig.history.iter().map(|(b, v)| json!({ "bits": b, "lambda_min": num(v) })).collect();
    Ok(Outcome::new(json!({
        "support": support(&t),
        "sigma_min": num(&sigma),
        "lambda_min": num(&eig.value),
        "bits_used": eig.bits_used,
        "ladder": ladder,
        "vector": eig.vector.iter().map(num).collect::<Vec<_>>(),
    })))
}

fn epsilon_cmd(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let e = epsilon(&params, config.k, config.mode.into(), config.span)?;
    Ok(Outcome::new(epsilon_json(&e)))
}

fn spark(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let s = eps_spark(&params, &config.eps()?, config.k, config.mode.into(), config.span)?;
    let value = match s.value {
        SparkValue::Exact(v) => json!({ "exact": v }),
        SparkValue::AtLeast(v) => json!({ "at_least": v }),
    };
    Ok(Outcome::new(json!({
        "eps": num(&config.eps()?),
        "k_max": config.k,
        "spark": value,
        "epsilons": s.epsilons.iter().map(epsilon_json).collect::<Vec<_>>(),
    })))
}

fn contiguity(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let bits = params.bits();
    let r = contiguity_scan(&params, config.k, config.span, DEFAULT_ENUMERATION_BUDGET)?;
    let contiguous = SupportSet::contiguous(config.k);
    let own = r.table.iter().find(|(t, _)| *t == contiguous).map(|(_, v)| v.clone()).expect("contiguous support enumerated");
    let runner_up = r.table.iter().find(|(t, _)| *t != contiguous).map(|(_, v)| v.clone());
    let mut checks = Vec::new();
    if let Some(next) = runner_up {
        checks.push(BoundCheck::strict("contiguous_strict_minimizer", own, next));
    }
    checks.push(BoundCheck::new(
        "monotonicity_violations",
        real(bits, r.monotonicity_violations.len() as f64),
        real(bits, 0.0),
    ));
    let table = Table {
        columns: vec!["support".into(), "sigma_min".into()],
        rows: r.table.iter().map(|(t, v)| vec![format!("{:?}", t.offsets()), num_str(v)]).collect(),
    };
    let mut out = Outcome::new(json!({
        "size": r.size,
        "span": config.span,
        "holds": r.holds,
        "dominated_pairs": r.dominated_pairs,
        "monotonicity_violations": r.monotonicity_violations.iter()
            .map(|v| json!({ "smaller": support(&v.smaller), "larger": support(&v.larger) }))
            .collect::<Vec<_>>(),
        "table": r.table.iter().map(|(t, v)| json!({ "support": support(t), "sigma_min": num(v) })).collect::<Vec<_>>(),
    }))
    .with_checks(&checks);
    out.table = Some(table);
    Ok(out)
}

fn num_str(x: &Float) -> String {
    srf_core::hp::to_decimal(x)
}

fn asymptote(config: &RunConfig) -> CliResult<Outcome> {
    let bits = config.precision_bits;
    let t = config.support_or_contiguous()?;
    let fit = smally_exponent(&t, &config.y_grid, bits)?;
    let deviation = real(bits, (fit.alpha - fit.expected_alpha).abs());
    let checks = [BoundCheck::new("exponent_within_tolerance", deviation, real(bits, EXPONENT_TOL))];
    let mut out = Outcome::new(json!({
        "support": support(&t),
        "alpha": fit.alpha,
        "mu_fit": fit.mu_fit,
        "mu_pencil": num(&fit.pencil.mu),
        "expected_alpha": fit.expected_alpha,
        "stated_alpha": fit.stated_alpha,
        "points": fit.points.iter().map(|(y, l)| json!({ "y": y, "lambda_min": num(l) })).collect::<Vec<_>>(),
    }))
    .with_checks(&checks);
    out.table = Some(Table {
        columns: vec!["y".into(), "lambda_min".into()],
        rows: fit.points.iter().map(|(y, l)| vec![y.to_string(), num_str(l)]).collect(),
    });
    Ok(out)
}

fn szego(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let bits = params.bits();
    let geo = ArcGeometry::new(&params);
    let table = leading_coeffs(&params, config.n, bits)?;
    let faber = faber_poly(&params, config.n, config.n + 10)?;
    let mut results = json!({
        "capacity": num(&params.c),
        "arc_length": num(&params.arc_length),
        "total_rotation": num(&geo.total_rotation),
        "faber_cap": num(&Float::with_val(bits, &geo.total_rotation / pi(bits))),
        "endpoints": [complex(&geo.endpoints.0), complex(&geo.endpoints.1)],
        "kernel_at_infinity": num(&szego_kernel_at_infinity(&params)?),
        "leading_coeffs": table.k_values.iter().map(num).collect::<Vec<_>>(),
        "faber_coefficients": faber.iter().map(complex).collect::<Vec<_>>(),
    });
    if let Some((re, im)) = config.point()? {
        let z = HpComplex::from_f64(bits, re, im);
        let at = ExtPoint::Finite(z.clone());
        results["point"] = json!({
            "z": complex(&z),
            "phi_inverse": complex(&phi_inverse(&params.c, &z)?),
            "phi_inverse_prime": complex(&phi_inverse_prime(&params.c, &z)?),
            "kernel_diagonal": complex(&szego_kernel(&params, &at, &at)?),
            "kernel_to_infinity": complex(&szego_kernel(&params, &at, &ExtPoint::Infinity)?),
        });
    }
    Ok(Outcome::new(results))
}

fn bounds(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let mut suite_config = SuiteConfig::new(config.n);
    suite_config.seed = config.seed;
    let suite = bound_suite(&params, &suite_config)?;
    let srf = verify_srf_bounds(&params, config.n)?;
    let mut out = Outcome::new(json!({
        "asymptotic_ratios": suite.asymptotic_ratios.iter().map(|(n, r)| json!({ "n": n, "ratio": num(r) })).collect::<Vec<_>>(),
        "lower_ratios": srf.ratios.iter().map(|(n, e, r)| json!({ "n": n, "eps": num(e), "ratio": num(r) })).collect::<Vec<_>>(),
        "min_lower_ratio": num(&srf.min_ratio),
        "errors": suite.errors.iter().map(|(name, e)| json!({ "check": name, "error": e.to_string() })).collect::<Vec<_>>(),
    }))
    .with_checks(suite.checks.iter().chain(&srf.checks));
    out.incomplete = suite.errors.iter().map(|(name, e)| format!("{name}: {e}")).collect();
    Ok(out)
}

fn recover(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let bits = params.bits();
    let sigma = config.sigma()?;
    let inst = random_instance(&params, config.n, config.k, &sigma, config.seed)?;
    let r = l0_solve(&params, &inst.f, &sigma, config.k)?;
    let eps2k = epsilon(&params, 2 * config.k, config.mode.into(), config.span)?.value;
    let error = r.estimate.difference(&inst.x0, bits).norm(bits);
    let bound = Float::with_val(bits, &sigma * 2u32) / &eps2k;
    let checks = [
        BoundCheck::new("residual_le_sigma", r.residual.clone(), sigma.clone()),
        BoundCheck::new("sparsity_le_k", real(bits, r.sparsity as f64), real(bits, config.k as f64)),
        BoundCheck::new("error_le_2sigma_over_eps2k", error.clone(), bound.clone()),
    ];
    Ok(Outcome::new(json!({
        "window": support(&inst.f.window),
        "x0": coefficients(&inst.x0),
        "noise_norm": num(&inst.noise_norm),
        "estimate": coefficients(&r.estimate),
        "sparsity": r.sparsity,
        "residual": num(&r.residual),
        "supports_examined": r.supports_examined.to_string(),
        "bits_used": r.bits_used,
        "error": num(&error),
        "eps2k": num(&eps2k),
        "upper_bound": num(&bound),
    }))
    .with_checks(&checks))
}

fn adversary(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let bits = params.bits();
    let sigma = config.sigma()?;
    let pair = adversarial_pair(&params, config.k, &sigma, config.mode.into(), config.span, TiePolicy::LowestIndex)?;
    let (dist, image) = pair_norms(&params, &pair, bits)?;
    let target = Float::with_val(bits, &sigma / &pair.eps2k);
    let checks = [
        BoundCheck::new("measurement_gap_le_sigma", image.clone(), Float::with_val(bits, &sigma * (1.0 + 1e-10))),
        BoundCheck::new(
            "distance_matches_sigma_over_eps2k",
            Float::with_val(bits, &dist - &target).abs(),
            Float::with_val(bits, &target * 1e-10),
        ),
    ];
    Ok(Outcome::new(json!({
        "k": pair.k,
        "t_star": support(&pair.t_star),
        "eps2k": num(&pair.eps2k),
        "x0": coefficients(&pair.x0),
        "x1": coefficients(&pair.x1),
        "distance": num(&dist),
        "measurement_gap": num(&image),
        "tie_broken": pair.tie_broken,
    }))
    .with_checks(&checks))
}

fn minimax(config: &RunConfig) -> CliResult<Outcome> {
    let params = config.params()?;
    let r = minimax_experiment(&params, config.k, &config.sigma()?, config.mode.into(), config.span)?;
    Ok(Outcome::new(json!({
        "k": r.k,
        "sigma": num(&r.sigma),
        "eps2k": num(&r.eps2k),
        "t_star": support(&r.pair.t_star),
        "x0": coefficients(&r.pair.x0),
        "x1": coefficients(&r.pair.x1),
        "estimate": coefficients(&r.recovery.estimate),
        "error_x0": num(&r.error_x0),
        "error_x1": num(&r.error_x1),
        "lower_bound": num(&r.lower_bound),
        "upper_bound": num(&r.upper_bound),
    }))
    .with_checks(&r.checks))
}

fn scaling(config: &RunConfig) -> CliResult<Outcome> {
    let bits = config.precision_bits;
    let fit = srf_scaling(config.k, &config.srf_grid, bits)?;
    let deviation = real(bits, (fit.slope - fit.expected_slope).abs());
    let checks = [BoundCheck::new("slope_within_tolerance", deviation, real(bits, SLOPE_TOL))];
    let mut out = Outcome::new(json!({
        "k": fit.k,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "expected_slope": fit.expected_slope,
        "table": fit.table.iter().map(|(s, e)| json!({ "srf": s, "eps2k": num(e) })).collect::<Vec<_>>(),
    }))
    .with_checks(&checks);
    out.table = Some(Table {
        columns: vec!["srf".into(), "eps2k".into()],
        rows: fit.table.iter().map(|(s, e)| vec![s.to_string(), num_str(e)]).collect(),
    });
    Ok(out)
}

fn selftest() -> CliResult<Outcome> {
    let outcomes = run_all();
    for o in &outcomes {
        eprintln!("{o}");
    }
    let mut out = Outcome::new(json!({
        "criteria": outcomes.iter()
            .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
            .collect::<Vec<_>>(),
    }));
    out.verdicts = outcomes.iter().map(|o| o.passed).collect();
    out.table = Some(Table {
        columns: vec!["id".into(), "name".into(), "passed".into(), "detail".into()],
        rows: outcomes.iter().map(|o| vec![o.id.to_string(), o.name.into(), o.passed.to_string(), o.detail.clone()]).collect(),
    });
    Ok(out)
}

/// Rejects inputs that are syntactically valid but outside a subcommand's domain.
pub fn validate(config: &RunConfig) -> CliResult<()> {
    if config.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if config.subcommand == Command::Bounds && config.n == 0 {
        return Err(CliError::Usage("--n must be at least 1 for bounds".into()));
    }
    Ok(())
}
