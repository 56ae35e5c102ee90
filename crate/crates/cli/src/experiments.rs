//! One runner per subcommand. Each turns a resolved config into checks, a
//! JSON result and CSV tables; nothing here touches the filesystem.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use diskfield::basis::{gram_deviation, gram_matrix, DiskBasis, EigenIndex};
use diskfield::ginibre::{
    derive_seed, gaussian_moment, pair_variance, sample_spectra, HessenbergQr, PlaneQuadrature,
};
use diskfield::limit_field::{
    covariance_kernel, covariance_mc, covariance_truncated, cutoff_indices, expected_norm_sq, tightness_report,
    LimitField,
};
use diskfield::log_kernel::{log_abs_reconstruct, Cutoff};
use diskfield::quadrature::{gauss_legendre_on, DiskQuadrature};
use diskfield::specfun::{bessel_j, bessel_j_prime, build_root_table, mcmahon, RootTable};
use diskfield::statistics::{
    clt_experiment, decay_check, exact_gamma_variance, limit_covariance, variance_bound_check, Check, CltConfig,
    Estimate, GammaEvaluator, GammaSample,
};

use crate::cells;
use crate::config::{Experiment, ExperimentConfig};
use crate::output::{Csv, Outcome};
use crate::CliError;

type Run = Result<Outcome, CliError>;

pub fn run(cfg: &ExperimentConfig) -> Run {
    match cfg.experiment {
        Experiment::Roots => roots(cfg),
        Experiment::VerifyBasis => verify_basis(cfg),
        Experiment::ReconstructLog => reconstruct_log(cfg),
        Experiment::GinibreSample => ginibre_sample(cfg),
        Experiment::PairVariance => pair_variance_exp(cfg),
        Experiment::Clt => clt(cfg),
        Experiment::FieldCovariance => field_covariance(cfg),
        Experiment::SobolevTightness => sobolev_tightness(cfg),
        Experiment::DecayCheck => decay(cfg),
    }
}

fn table(n_max: u32, k_max: u32) -> Result<RootTable, CliError> {
    Ok(build_root_table(n_max.max(1), k_max.max(1))?)
}

fn roots(cfg: &ExperimentConfig) -> Run {
    let table = table(cfg.n_max, cfg.k_max)?;
    let mut csv = Csv::new("roots", &["n", "k", "root", "mcmahon", "lower_bound_margin", "dJ_plus_Jnext", "J_at_root"]);
    let (mut worst_prime, mut worst_value, mut worst_margin) = (0.0f64, 0.0f64, f64::INFINITY);
    for (n, k, j) in table.iter() {
        let prime = bessel_j_prime(n as i32, j)? + bessel_j(n as i32 + 1, j)?;
        let value = bessel_j(n as i32, j)?;
        let margin = j * j - (n * n) as f64 - ((k as f64 - 0.25) * PI).powi(2);
        worst_prime = worst_prime.max(prime.abs());
        worst_value = worst_value.max(value.abs());
        worst_margin = worst_margin.min(margin);
        csv.row(cells![n, k, j, mcmahon(n, k), margin, prime, value]);
    }
    let checks = vec![
        Check::at_most("max |J'_n(j) + J_{n+1}(j)|", worst_prime, 1e-10),
        Check::at_most("max |J_n(j)|", worst_value, 1e-12),
        Check::at_least("min j² - n² - (k-1/4)²π² (strict)", worst_margin, f64::MIN_POSITIVE),
    ];
    let result = json!({ "count": csv.len(), "max_prime_residual": worst_prime,
        "max_value_residual": worst_value, "min_lower_bound_margin": worst_margin });
    Ok(Outcome { result, checks, tables: vec![csv] })
}

fn verify_basis(cfg: &ExperimentConfig) -> Run {
    let basis = DiskBasis::new(cfg.n_max, cfg.k_max)?;
    let idx: Vec<EigenIndex> = basis.indices().collect();
    let quad = DiskQuadrature::new(cfg.radial_order, cfg.angular_order);
    let gram = gram_matrix(&basis, &idx, &quad)?;
    let dev = gram_deviation(&gram);
    let mut csv = Csv::new("gram", &["n", "k", "diagonal_error", "max_offdiagonal"]);
    for (a, i) in idx.iter().enumerate() {
        let off = gram[a].iter().enumerate().filter(|(b, _)| *b != a).map(|(_, g)| g.norm()).fold(0.0, f64::max);
        csv.row(cells![i.n, i.k, (gram[a][a] - 1.0).norm(), off]);
    }
    let checks = vec![Check::at_most(format!("max |G - I| over {} functions", idx.len()), dev, 1e-8)];
    Ok(Outcome { result: json!({ "functions": idx.len(), "max_deviation": dev }), checks, tables: vec![csv] })
}

/// Interior pair `(0, 0.5)` at square cutoffs `10, 20, ..., n_max`; exterior
/// pair `(0.3, 2)` at `(16, k_max)`.
fn reconstruct_log(cfg: &ExperimentConfig) -> Run {
    let (z, w) = (Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0));
    let exact = 0.5f64.ln();
    let mut cutoffs: Vec<u32> = (1..).map(|i| 10 * i).take_while(|&c| c <= cfg.n_max).collect();
    if cutoffs.last() != Some(&cfg.n_max) {
        cutoffs.push(cfg.n_max.max(1));
    }
    let mut csv = Csv::new("interior", &["cutoff", "value", "abs_error"]);
    let mut errors = Vec::new();
    for &c in &cutoffs {
        let v = log_abs_reconstruct(z, w, Cutoff::square(c))?;
        errors.push((v - exact).abs());
        csv.row(cells![c, v, (v - exact).abs()]);
    }
    let last = *cutoffs.last().unwrap_or(&0);
    let mut checks = vec![Check::at_most(format!("interior |error| at cutoff {last}"), *errors.last().unwrap(), 2e-2)];
    for (p, e) in errors.windows(2).enumerate() {
        checks.push(Check::at_most(format!("error decreases {} -> {}", cutoffs[p], cutoffs[p + 1]), e[1], e[0]));
    }
    let ext = log_abs_reconstruct(Complex64::new(0.3, 0.0), Complex64::new(2.0, 0.0), Cutoff::new(16, cfg.k_max))?;
    checks.push(Check::within(format!("exterior (0.3, 2), cutoff (16, {})", cfg.k_max), ext, 1.7f64.ln(), 1e-6));
    let result = json!({ "interior": { "z": 0.0, "w": 0.5, "cutoffs": cutoffs, "abs_errors": errors },
        "exterior": { "z": 0.3, "w": 2.0, "value": ext, "exact": 1.7f64.ln() } });
    Ok(Outcome { result, checks, tables: vec![csv] })
}

/// Draws spectra and checks `E|tr G|² = 1` (the `f(z) = z` variance).
fn ginibre_sample(cfg: &ExperimentConfig) -> Run {
    let backend = HessenbergQr::default();
    let mut eig = Csv::new("eigenvalues", &["N", "draw", "re", "im"]);
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for &n in &cfg.n_size {
        let spectra = sample_spectra(n, derive_seed(cfg.seed, n as u64), cfg.draws, &backend)?;
        let mut trace_sq = Vec::with_capacity(spectra.len());
        let mut outside = 0usize;
        for (d, s) in spectra.iter().enumerate() {
            for z in &s.eigenvalues {
                eig.row(cells![n, d, z.re, z.im]);
                outside += usize::from(z.norm() > 1.0);
            }
            trace_sq.push(s.eigenvalues.iter().sum::<Complex64>().norm_sqr());
        }
        let est = Estimate::from_samples(&trace_sq);
        if cfg.draws >= 2 {
            checks.push(Check::within(format!("E|Σ z_i|² = 1, N = {n}"), est.value, 1.0, 4.0 * est.se));
        }
        summary.push(json!({ "N": n, "trace_sq": est,
            "fraction_outside_disk": outside as f64 / (n * cfg.draws) as f64 }));
    }
    Ok(Outcome { result: json!({ "sizes": summary }), checks, tables: vec![eig] })
}

/// Exact determinantal variances: `f(z) = z` and `γ_{n,k}` over the cutoff.
fn pair_variance_exp(cfg: &ExperimentConfig) -> Run {
    let table = table(cfg.n_max, cfg.k_max)?;
    let indices = cutoff_indices(Cutoff::new(cfg.n_max, cfg.k_max));
    let mut csv = Csv::new("gamma_variance", &["N", "n", "k", "variance", "limit"]);
    let mut checks = Vec::new();
    let mut identity = Vec::new();
    for &n in &cfg.n_size {
        let quad = PlaneQuadrature::new(n)?;
        let v = pair_variance(|z| z, &quad);
        identity.push(json!({ "N": n, "variance": v }));
        checks.push(Check::within(format!("pair_variance(z), N = {n}"), v, 1.0, 1e-6));
        for &idx in &indices {
            let limit = limit_covariance(idx, idx, &table)?.hermitian.re;
            csv.row(cells![n, idx.n, idx.k, exact_gamma_variance(&table, idx, &quad)?, limit]);
        }
    }
    let n_top = *cfg.n_size.iter().max().unwrap_or(&1);
    let mut moments = Vec::new();
    for m in [0u32, 1, 4, 8] {
        let v = gaussian_moment(m, n_top)?;
        let q = radial_moment(m, n_top);
        moments.push(json!({ "m": m, "N": n_top, "value": v, "quadrature": q }));
        checks.push(Check::within(format!("gaussian_moment({m}, {n_top}) / quadrature"), v / q, 1.0, 1e-10));
    }
    Ok(Outcome { result: json!({ "identity": identity, "moments": moments }), checks, tables: vec![csv] })
}

/// `2π ∫ r^{2m+1} e^{-N r²} dr` by Gauss–Legendre panels.
fn radial_moment(m: u32, n: usize) -> f64 {
    let reach = ((4.0 * m as f64 + 80.0) / n as f64).sqrt();
    let panels = 40;
    let mut acc = 0.0;
    for p in 0..panels {
        let (a, b) = (reach * p as f64 / panels as f64, reach * (p + 1) as f64 / panels as f64);
        for (r, w) in gauss_legendre_on(20, a, b) {
            acc += w * 2.0 * PI * r.powi(2 * m as i32 + 1) * (-(n as f64) * r * r).exp();
        }
    }
    acc
}

fn clt(cfg: &ExperimentConfig) -> Run {
    let table = table(cfg.n_max, cfg.k_max)?;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut marg = Csv::new("marginals", &["N", "n", "k", "part", "limit_sd", "ks_distance", "ks_p_value"]);
    let mut second = Csv::new("second_moments", &["N", "a", "b", "re", "re_se", "im", "im_se", "limit_re", "limit_im"]);
    for &n in &cfg.n_size {
        let config = CltConfig {
            n,
            draws: cfg.draws,
            indices: cutoff_indices(Cutoff::new(cfg.n_max, cfg.k_max)),
            seed: derive_seed(cfg.seed, n as u64),
        };
        let report = clt_experiment(&config, &table, &HessenbergQr::default())?;
        checks.extend(report.checks().into_iter().map(|mut c| {
            c.name = format!("{}, N = {n}", c.name);
            c
        }));
        for m in &report.marginals {
            marg.row(cells![n, m.index.n, m.index.k, m.part, m.limit_sd, m.ks.distance, m.ks.p_value]);
        }
        let idx = &config.indices;
        for (a, row) in report.hermitian.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                let l = report.hermitian_limit[a][b];
                second.row(cells![n, idx[a].to_string(), idx[b].to_string(), e[0].value, e[0].se, e[1].value, e[1].se, l.re, l.im]);
            }
        }
        reports.push(report);
    }
    Ok(Outcome { result: json!({ "reports": reports }), checks, tables: vec![marg, second] })
}

/// Covariance of the limit field at `(0.3, -0.4)` and `E‖h‖²_{-s}`.
fn field_covariance(cfg: &ExperimentConfig) -> Run {
    let cut = Cutoff::new(cfg.n_max, cfg.k_max);
    let (z, w) = (Complex64::new(0.3, 0.0), Complex64::new(-0.4, 0.0));
    let kernel = covariance_kernel(z, w);
    let cov = covariance_mc(z, w, cut, cfg.draws, derive_seed(cfg.seed, 0))?;
    let mut checks =
        vec![Check::within("covariance_mc(0.3, -0.4) vs -½ log 0.7", cov.value, kernel, 4.0 * cov.se + 2e-2)];

    let mut trunc = Csv::new("truncated_covariance", &["n_max", "k_max", "covariance", "kernel"]);
    let mut steps: Vec<u32> = (1..).map(|i| 8 * i).take_while(|&c| c < cfg.n_max.max(cfg.k_max)).collect();
    steps.push(cfg.n_max.max(cfg.k_max));
    for c in steps {
        let sub = Cutoff::new(c.min(cfg.n_max), c.min(cfg.k_max));
        trunc.row(cells![sub.n_max, sub.k_max, covariance_truncated(z, w, sub)?, kernel]);
    }

    let field = LimitField::new(cut)?;
    let draws = cfg.draws.min(10_000);
    let mut norms = Csv::new("norms", &["s", "mc", "mc_se", "analytic", "tail_bound"]);
    let mut norm_json = Vec::new();
    for (i, &s) in cfg.sobolev_s.iter().enumerate() {
        let analytic = expected_norm_sq(s, cut)?;
        let mc = field.norm_sq_mc(s, draws, derive_seed(cfg.seed, 1 + i as u64));
        checks.push(Check::within(format!("E‖h‖²_(-{s}) MC vs sum"), mc.value, analytic.truncated, 4.0 * mc.se));
        norms.row(cells![s, mc.value, mc.se, analytic.truncated, analytic.tail_bound]);
        norm_json.push(json!({ "s": s, "draws": draws, "mc": mc, "analytic": analytic }));
    }
    let result = json!({ "z": [z.re, z.im], "w": [w.re, w.im], "covariance": cov, "kernel": kernel,
        "truncated": covariance_truncated(z, w, cut)?, "norms": norm_json });
    Ok(Outcome { result, checks, tables: vec![trunc, norms] })
}

/// `E‖h_N‖²_{-s'}` over the cutoff for each `N`, against the exact finite-`N`
/// value, the limit and the variance-bound envelope.
fn sobolev_tightness(cfg: &ExperimentConfig) -> Run {
    let table = table(cfg.n_max, cfg.k_max)?;
    let indices = cutoff_indices(Cutoff::new(cfg.n_max, cfg.k_max));
    let constant = variance_bound_check(&table, cfg.n_max, cfg.k_max, &cfg.n_size)?.constant;
    let backend = HessenbergQr::default();
    let mut runs: Vec<(usize, Vec<GammaSample>)> = Vec::new();
    for &n in &cfg.n_size {
        let quad = PlaneQuadrature::new(n)?;
        let eval = GammaEvaluator::new(&table, &indices, &quad)?;
        let spectra = sample_spectra(n, derive_seed(cfg.seed, n as u64), cfg.draws, &backend)?;
        runs.push((n, spectra.iter().map(|s| eval.evaluate(s)).collect::<Result<_, _>>()?));
    }
    let grouped: Vec<(usize, &[GammaSample])> = runs.iter().map(|(n, g)| (*n, g.as_slice())).collect();
    let mut csv = Csv::new("tightness", &["s_prime", "N", "draws", "statistic", "se", "exact", "limit", "bound"]);
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &s in &cfg.sobolev_s {
        let report = tightness_report(&grouped, s, constant, &table)?;
        for e in &report.entries {
            csv.row(cells![s, e.matrix_size, e.draws, e.statistic.value, e.statistic.se, e.exact, report.limit, report.bound]);
        }
        checks.extend(report.checks().into_iter().map(|mut c| {
            c.name = format!("{}, s' = {s}", c.name);
            c
        }));
        reports.push(report);
    }
    Ok(Outcome { result: json!({ "constant": constant, "reports": reports }), checks, tables: vec![csv] })
}

/// Variance bound over the cutoff at each `N`, then the `|n| >= N` decay at
/// `(n, N) = (2N, N)` for every `N` in the list.
fn decay(cfg: &ExperimentConfig) -> Run {
    let top = cfg.n_size.iter().map(|&n| 2 * n as u32).max().unwrap_or(1);
    let table = table(cfg.n_max.max(top), cfg.k_max.max(3))?;
    let vb = variance_bound_check(&table, cfg.n_max, cfg.k_max, &cfg.n_size)?;
    let targets: Vec<(i32, usize)> = cfg.n_size.iter().map(|&n| (2 * n as i32, n)).collect();
    let dc = decay_check(&table, &targets, &[], 3)?;
    let mut vb_csv = Csv::new("variance_bound", &["N", "n", "k", "root", "variance", "ratio", "gradient_bound"]);
    for e in &vb.entries {
        vb_csv.row(cells![e.matrix_size, e.index.n, e.index.k, e.root, e.variance, e.ratio, e.gradient_bound]);
    }
    let mut dc_csv = Csv::new("decay", &["N", "n", "k", "root", "variance", "scaled", "two_region_bound"]);
    for e in &dc.targets {
        dc_csv.row(cells![e.matrix_size, e.index.n, e.index.k, e.root, e.variance, e.scaled, e.two_region_bound]);
    }
    let mut checks = vb.checks();
    checks.extend(dc.checks());
    let result = json!({ "variance_bound": vb, "decay": dc });
    Ok(Outcome { result, checks, tables: vec![vb_csv, dc_csv] })
}
