use std::f64::consts::PI;

use resmetro::{
    cayley_klein, cayley_klein_jet, classical_fisher_single_closed, fisher_from_jet, fisher_report,
    fwhm, integrate_pulse, integrate_sequence, run_experiment, sequence_probabilities,
    sequence_propagator_chebyshev, sequence_propagator_direct, transition_probabilities,
    AnalyticPhase, Error, EstimationReport, FisherMethod, ProbabilityProfile, PulseParams,
    ScanProtocol, SequenceSpec,
};
use serde_json::json;

use crate::config::{BackendChoice, RunConfig};
use crate::output::{provenance, render, Cell, Table};

#[derive(Debug)]
pub enum Failure {
    /// Exit code 2.
    Config(String),
    /// Exit code 1; the report has already been written.
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

pub type Outcome = Result<String, Failure>;

fn backend_model(backend: BackendChoice) -> &'static str {
    match backend {
        BackendChoice::Analytic => {
            "sech pulse train; gamma-function propagator with Chebyshev closed forms"
        }
        BackendChoice::Direct => {
            "sech pulse train; gamma-function propagator, direct matrix product"
        }
        BackendChoice::Ode => {
            "sech pulse train; adaptive Dormand-Prince integration of the Schrodinger equation"
        }
    }
}

fn train_probabilities(config: &RunConfig, seq: &SequenceSpec) -> Result<(f64, f64), Error> {
    match config.backend {
        BackendChoice::Analytic => sequence_probabilities(seq),
        BackendChoice::Direct => {
            let u = sequence_propagator_direct(seq)?;
            Ok((u.ground_probability(), u.excited_probability()))
        }
        BackendChoice::Ode => {
            let u = integrate_sequence(seq, &config.integration)?;
            Ok((u.ground_probability(), u.excited_probability()))
        }
    }
}

pub fn profile(config: &RunConfig) -> Outcome {
    let seq = config.sequence();
    let mut table = Table::new(&["omega", "detuning", "tau_detuning", "tau_rabi", "p0", "p1"]);
    for w in config.grid.values() {
        let (p0, p1) = train_probabilities(config, &seq.with_drive(w))?;
        let d = w - config.omega0;
        table.push(vec![
            w.into(),
            d.into(),
            (config.tau * d).into(),
            config.tau_rabi.into(),
            p0.into(),
            p1.into(),
        ]);
    }
    Ok(render(
        config,
        &table,
        provenance(config, backend_model(config.backend), json!({})),
    ))
}

fn fisher_method(backend: BackendChoice) -> FisherMethod {
    match backend {
        BackendChoice::Analytic => FisherMethod::ClosedForm,
        BackendChoice::Direct => FisherMethod::AnalyticDerivative,
        BackendChoice::Ode => FisherMethod::FiniteDifference,
    }
}

pub fn fisher(config: &RunConfig) -> Outcome {
    let seq = config.sequence();
    let method = fisher_method(config.backend);
    let mut table = Table::new(&[
        "omega",
        "detuning",
        "tau_detuning",
        "cfi",
        "qfi",
        "crb",
        "method",
    ]);
    for w in config.grid.values() {
        let report =
            fisher_report(&seq.with_drive(w), method, config.shots).map_err(|e| match e {
                Error::UnsupportedPhase(_) => Failure::Config(format!(
                    "{e}; use --backend direct or ode for general phases"
                )),
                other => other.into(),
            })?;
        let d = w - config.omega0;
        table.push(vec![
            w.into(),
            d.into(),
            (config.tau * d).into(),
            report.cfi.into(),
            report.qfi.into(),
            report.crb_variance.into(),
            method.as_str().into(),
        ]);
    }
    let extra = json!({
        "fisher": "classical: ground/excited projective measurement; quantum: pure-state formula",
        "crb": "1 / (shots * cfi) per grid frequency",
    });
    Ok(render(
        config,
        &table,
        provenance(config, backend_model(config.backend), extra),
    ))
}

/// Reference width and its label for the configured train.
fn reference_width(config: &RunConfig) -> (f64, &'static str) {
    let n = config.n_half;
    if n == 0 {
        return (
            4.0 * 1f64.asinh() / (PI * config.tau),
            "4 asinh(1) / (pi tau)",
        );
    }
    match AnalyticPhase::classify(config.phase) {
        Some(AnalyticPhase::Pi) => (1.0 / config.tau, "1 / tau"),
        Some(AnalyticPhase::Zero) => (
            ((2 * n + 1) as f64).sqrt() / (2f64.ln().sqrt() * config.tau),
            "sqrt(2N+1) / (sqrt(ln 2) tau)",
        ),
        None => (f64::NAN, "none"),
    }
}

pub fn width(config: &RunConfig) -> Outcome {
    let profile = ProbabilityProfile::sample(config.sequence(), config.grid.values())?;
    let measured = fwhm(&profile).map_err(|e| match e {
        Error::NoMinimum | Error::NoCrossing => {
            Failure::Config(format!("{e}; widen the grid with --grid-min/--grid-max"))
        }
        other => other.into(),
    })?;
    let (reference, label) = reference_width(config);
    let mut table = Table::new(&[
        "n_half",
        "phase",
        "fwhm",
        "tau_fwhm",
        "reference",
        "tau_reference",
        "relative_deviation",
        "reference_formula",
    ]);
    table.push(vec![
        config.n_half.into(),
        config.phase.into(),
        measured.into(),
        (config.tau * measured).into(),
        reference.into(),
        (config.tau * reference).into(),
        ((measured - reference) / reference).into(),
        label.into(),
    ]);
    let extra = json!({ "fwhm": "full width of the ground-population dip at (1 + P0_min) / 2" });
    Ok(render(
        config,
        &table,
        provenance(config, backend_model(BackendChoice::Analytic), extra),
    ))
}

fn estimator_row(r: &EstimationReport, total_fisher: f64, degenerate: usize) -> Vec<Cell> {
    vec![
        r.estimator.as_str().into(),
        r.trials.into(),
        r.mean.into(),
        r.bias.into(),
        r.variance.into(),
        r.crb.into(),
        r.ratio.into(),
        r.ratio_ci_low.into(),
        r.ratio_ci_high.into(),
        total_fisher.into(),
        degenerate.into(),
    ]
}

pub fn montecarlo(config: &RunConfig) -> Outcome {
    if config.trials < resmetro::estimation::MIN_TRIALS {
        return Err(Failure::Config(format!(
            "--trials must be at least {}, got {}",
            resmetro::estimation::MIN_TRIALS,
            config.trials
        )));
    }
    let protocol = ScanProtocol::new(
        config.sequence(),
        config.omega0,
        config.grid.values(),
        config.shots,
        config.seed,
    )?;
    let report = run_experiment(&protocol, config.trials)?;
    let mut table = Table::new(&[
        "estimator",
        "trials",
        "mean",
        "bias",
        "variance",
        "crb",
        "ratio",
        "ratio_ci_low",
        "ratio_ci_high",
        "total_fisher_per_shot",
        "degenerate_trials",
    ]);
    table.push(estimator_row(
        &report.argmin,
        report.total_fisher_per_shot,
        0,
    ));
    table.push(estimator_row(
        &report.mle,
        report.total_fisher_per_shot,
        report.degenerate_trials,
    ));
    let extra = json!({
        "estimators": {
            "argmin": "grid frequency with the fewest ground-state outcomes, ties toward the grid median",
            "mle": "binomial maximum likelihood over the grid span, clamp 1e-12",
        },
        "crb": "1 / (shots * sum of classical Fisher information over the grid)",
        "interval": "bootstrap 95% percentile interval on the ratio, 1000 resamples",
        "random_streams": "ChaCha8 per (seed, trial, grid index)",
    });
    Ok(render(
        config,
        &table,
        provenance(config, backend_model(BackendChoice::Analytic), extra),
    ))
}

struct Check {
    name: &'static str,
    deviation: f64,
    limit: f64,
    note: String,
}

impl Check {
    fn passed(&self) -> bool {
        self.deviation <= self.limit
    }
}

fn check<F>(name: &'static str, limit: f64, override_limit: Option<f64>, run: F) -> Check
where
    F: FnOnce() -> Result<(f64, String), Error>,
{
    let limit = override_limit.unwrap_or(limit);
    match run() {
        Ok((deviation, note)) => Check {
            name,
            deviation,
            limit,
            note,
        },
        Err(e) => Check {
            name,
            deviation: f64::INFINITY,
            limit,
            note: e.to_string(),
        },
    }
}

fn max_over<I, F>(points: I, f: F) -> Result<f64, Error>
where
    I: IntoIterator<Item = f64>,
    F: Fn(f64) -> Result<f64, Error>,
{
    points
        .into_iter()
        .try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
}

fn run_checks(config: &RunConfig) -> Vec<Check> {
    let grid = config.grid.values();
    let pulse = config.pulse();
    let seq = config.sequence();
    let at = |w: f64| -> PulseParams { PulseParams { drive: w, ..pulse } };
    let train_n = config.n_half.max(1);
    let over = config.tolerance;
    vec![
        check("propagator_vs_ode", 1e-7, over, || {
            let d = max_over(grid.iter().copied(), |w| {
                Ok(cayley_klein(&at(w))?
                    .max_elementwise_diff(&integrate_pulse(&at(w), &config.integration)?))
            })?;
            Ok((d, format!("single pulse, {} detunings", grid.len())))
        }),
        check("populations_vs_closed_form", 1e-10, over, || {
            let d = max_over(grid.iter().copied(), |w| {
                let u = cayley_klein(&at(w))?;
                Ok((u.ground_probability() - transition_probabilities(&at(w)).0).abs())
            })?;
            Ok((d, "|a|^2 against sech^2 sin^2 form".into()))
        }),
        check("derivative_vs_finite_difference", 1e-6, over, || {
            let d = max_over(grid.iter().copied(), |w| {
                let p = at(w);
                let analytic = cayley_klein_jet(&p)?.derivative;
                let numeric = resmetro::propagator::finite_difference_detuning_derivative(&p)?;
                Ok(analytic.max_elementwise_diff(&numeric) / (1.0 + config.tau))
            })?;
            Ok((
                d,
                "digamma derivative against Richardson differences".into(),
            ))
        }),
        check("fisher_closed_form_vs_derivative", 1e-8, over, || {
            let d = max_over(grid.iter().copied(), |w| {
                let p = at(w);
                let closed = classical_fisher_single_closed(&p);
                let (cfi, _) = fisher_from_jet(&cayley_klein_jet(&p)?)?;
                Ok((cfi - closed).abs() / closed.max(1e-3 * config.tau * config.tau))
            })?;
            Ok((d, "single-pulse classical Fisher information".into()))
        }),
        check("chebyshev_vs_direct", 1e-10, over, || {
            let mut d: f64 = 0.0;
            for phase in [0.0, PI] {
                let train = SequenceSpec {
                    half_count: train_n,
                    phase,
                    ..seq
                };
                d = d.max(max_over(grid.iter().copied(), |w| {
                    let s = train.with_drive(w);
                    Ok(sequence_propagator_chebyshev(&s)?
                        .max_elementwise_diff(&sequence_propagator_direct(&s)?))
                })?);
            }
            Ok((d, format!("N = {train_n}, phases 0 and pi")))
        }),
        check("train_vs_ode", 1e-7, over, || {
            let train = SequenceSpec {
                half_count: train_n,
                ..seq
            };
            let d = max_over(grid.iter().copied(), |w| {
                let s = train.with_drive(w);
                Ok(sequence_propagator_direct(&s)?
                    .max_elementwise_diff(&integrate_sequence(&s, &config.integration)?))
            })?;
            Ok((d, format!("N = {train_n}, phase {:.6}", config.phase)))
        }),
    ]
}

fn check_table(checks: &[Check]) -> Table {
    let mut table = Table::new(&["check", "max_deviation", "limit", "status", "note"]);
    for c in checks {
        table.push(vec![
            c.name.into(),
            c.deviation.into(),
            c.limit.into(),
            (if c.passed() { "pass" } else { "fail" }).into(),
            c.note.replace(',', ";").as_str().into(),
        ]);
    }
    table
}

/// Human-readable summary for standard output.
pub fn summary(checks_table: &Table) -> String {
    let mut out = format!(
        "{:<34} {:>12} {:>10}  {:<6} {}\n",
        "check", "deviation", "limit", "status", "note"
    );
    for row in &checks_table.rows {
        let text = |c: &Cell| match c {
            Cell::Num(x) => format!("{x:.2e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        };
        out.push_str(&format!(
            "{:<34} {:>12} {:>10}  {:<6} {}\n",
            text(&row[0]),
            text(&row[1]),
            text(&row[2]),
            text(&row[3]),
            text(&row[4])
        ));
    }
    out
}

/// Returns `(stdout summary, machine-readable report, all passed)`.
pub fn verify(config: &RunConfig) -> (String, String, bool) {
    let checks = run_checks(config);
    let all = checks.iter().all(Check::passed);
    let table = check_table(&checks);
    let extra = json!({
        "checks": "analytic propagator vs ODE oracle, closed forms vs direct products, analytic vs finite-difference derivatives",
        "passed": all,
    });
    let report = render(
        config,
        &table,
        provenance(
            config,
            "cross-checks between independent evaluations",
            extra,
        ),
    );
    (summary(&table), report, all)
}
