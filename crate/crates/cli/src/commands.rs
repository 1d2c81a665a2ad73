use std::path::Path;

use qudit_epp::algebra::Dimension;
use qudit_epp::hashing::{
    binomial_sigma, effective_fidelity, finite_size_report, isotropic_entropy, lemma1_montecarlo,
    noisy_asymptotic_yield, noisy_hashing_works, noisy_thresholds, universal_threshold,
};
use qudit_epp::multipartite::{ghz_isotropic, index_entropies, multipartite_yield, parse_ghz_json, GhzCoeffs};
use qudit_epp::oracle::run_suite;
use qudit_epp::recurrence::{
    bbpssw_fixed_points, bbpssw_threshold, numeric_threshold, regime_scan, run_protocol, RegimeOptions,
    YIELD_MAX_ITERS,
};
use qudit_epp::states::{depolarize_channel, make_preset, parse_state_json, StatePreset, DEFAULT_X_WEIGHT};
use qudit_epp::{CoeffMatrix, NoiseParams, PresetKind, Protocol};
use rayon::prelude::*;
use serde_json::Value;

use crate::output::{pretty, Cell, Format, Table};
use crate::ranges::{parse_dims, parse_grid, parse_n_sweep};
use crate::{
    Cli, CliError, Command, GhzArgs, HashingArgs, OracleArgs, RecurrenceArgs, StateArgs, ThresholdArgs, YieldArgs,
};

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn dims(spec: &str) -> Result<Vec<Dimension>, CliError> {
    parse_dims(spec)
        .map_err(invalid)?
        .into_iter()
        .map(|d| Dimension::new(d).map_err(CliError::from))
        .collect()
}

fn prime_dims(spec: &str) -> Result<Vec<Dimension>, CliError> {
    let ds = dims(spec)?;
    for d in &ds {
        d.require_prime()?;
    }
    Ok(ds)
}

fn grid(spec: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(spec).map_err(invalid)
}

pub(crate) fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let (table, default_format) = match &cli.command {
        Command::RecurrenceRun(a) => (recurrence_run(a)?, Format::Csv),
        Command::Yields(a) => (yields(a)?, Format::Csv),
        Command::Thresholds(a) => (thresholds(a)?, Format::Csv),
        Command::Hashing(a) => (hashing(a, cli.seed)?, Format::Csv),
        Command::Ghz(a) => (ghz(a)?, Format::Csv),
        Command::OracleCheck(a) => return oracle_check(a, cli.seed, cli.format.unwrap_or(Format::Json)),
    };
    table.render(cli.format.unwrap_or(default_format))
}

impl StateArgs {
    fn load(&self) -> Result<CoeffMatrix, CliError> {
        if let Some(path) = &self.state {
            return Ok(parse_state_json(&read_file(path)?)?);
        }
        let d = self.d.ok_or_else(|| invalid("--d is required without --state"))?;
        let f = self.fidelity.ok_or_else(|| invalid("--F is required without --state"))?;
        let preset = StatePreset::new(self.preset, f).with_x_weight(self.x_weight.unwrap_or(DEFAULT_X_WEIGHT));
        Ok(make_preset(&preset, Dimension::new(d)?)?)
    }
}

/// Depolarizes both qudits with retention `p`.
fn transmit(s: &CoeffMatrix, p: f64) -> Result<CoeffMatrix, CliError> {
    if p == 1.0 {
        return Ok(s.clone());
    }
    Ok(depolarize_channel(&depolarize_channel(s, p)?, p)?)
}

fn recurrence_run(a: &RecurrenceArgs) -> Result<Table, CliError> {
    let input = transmit(&a.state.load()?, a.transmission)?;
    let noise = NoiseParams::new(a.gate, a.transmission, 1.0)?;
    if !(a.epsilon > 0.0 && a.epsilon < 1.0) {
        return Err(invalid(format!("--epsilon must lie in (0, 1), got {}", a.epsilon)));
    }
    let target = a.target.unwrap_or(1.0 - a.epsilon);
    let t = run_protocol(a.protocol, &input, noise, target, a.max_iters)?;
    let mut table = Table::new(&["iter", "step", "F", "success_prob", "cum_yield"])
        .meta("command", "recurrence-run")
        .meta("protocol", a.protocol.name())
        .meta("d", input.dim().get())
        .meta("Q", a.gate)
        .meta("p", a.transmission)
        .meta("target", target)
        .meta("outcome", serde_json::to_value(t.outcome).unwrap_or(Value::Null))
        .meta("final_fidelity", t.final_fidelity())
        .meta("yield", t.yield_or_zero());
    table.push(vec![0usize.into(), "INIT".into(), input.fidelity().into(), 1.0.into(), 1.0.into()]);
    for s in &t.steps {
        table.push(vec![
            s.iteration.into(),
            s.step.name().into(),
            s.state.fidelity().into(),
            s.success_prob.into(),
            s.cumulative_yield.into(),
        ]);
    }
    Ok(table)
}

fn yields(a: &YieldArgs) -> Result<Table, CliError> {
    let ds = dims(&a.d)?;
    let fs = grid(&a.fidelity)?;
    let noise = NoiseParams::with_gate(a.gate)?;
    if !(a.epsilon > 0.0 && a.epsilon < 1.0) {
        return Err(invalid(format!("--epsilon must lie in (0, 1), got {}", a.epsilon)));
    }
    let target = 1.0 - a.epsilon;
    let mut jobs = Vec::new();
    for &d in &ds {
        for &protocol in &a.protocol {
            for &kind in &a.preset {
                for &f in &fs {
                    jobs.push((d, protocol, kind, f));
                }
            }
        }
    }
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(d, protocol, kind, f)| -> Result<Vec<Cell>, CliError> {
            let preset = StatePreset::new(kind, f).with_x_weight(a.x_weight.unwrap_or(DEFAULT_X_WEIGHT));
            let s = make_preset(&preset, d)?;
            let t = run_protocol(protocol, &s, noise, target, YIELD_MAX_ITERS)?;
            Ok(vec![
                d.get().into(),
                protocol.name().into(),
                kind.name().into(),
                f.into(),
                a.gate.into(),
                t.yield_or_zero().into(),
                t.steps.len().into(),
                t.reached().into(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["d", "protocol", "preset", "F", "Q", "yield", "iterations", "reached"])
        .meta("command", "yields")
        .meta("target", target);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn thresholds(a: &ThresholdArgs) -> Result<Table, CliError> {
    let ds = dims(&a.d)?;
    let qs = a.gate.as_deref().map(grid).transpose()?;
    let opts = RegimeOptions::default();
    let closed_form = a.protocol == Protocol::Bbpssw && !a.numeric && a.kind == PresetKind::Isotropic;
    let rows: Vec<Vec<Vec<Cell>>> = ds
        .par_iter()
        .map(|&d| -> Result<Vec<Vec<Cell>>, CliError> {
            let q_th = if closed_form {
                bbpssw_threshold(d)
            } else {
                numeric_threshold(a.protocol, d, a.kind, opts)?
            };
            let base = vec![d.get().into(), a.protocol.name().into(), q_th.into()];
            let Some(qs) = &qs else {
                return Ok(vec![base]);
            };
            qs.iter()
                .map(|&q| {
                    let r = if closed_form {
                        bbpssw_fixed_points(d, q)?
                    } else {
                        regime_scan(a.protocol, d, q, a.kind, opts)?
                    };
                    let mut row = base.clone();
                    row.extend([q.into(), r.f_min.into(), r.f_max.into(), r.purifiable.into()]);
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let headers: &[&'static str] = if qs.is_some() {
        &["d", "protocol", "Q_th", "Q", "F_min", "F_max", "purifiable"]
    } else {
        &["d", "protocol", "Q_th"]
    };
    let mut table = Table::new(headers)
        .meta("command", "thresholds")
        .meta("kind", a.kind.name())
        .meta("method", if closed_form { "closed_form" } else { "numeric" });
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

fn hashing(a: &HashingArgs, seed: u64) -> Result<Table, CliError> {
    let modes = [a.fmin || a.threshold, a.lemma1, a.noisy].iter().filter(|&&m| m).count();
    if modes > 1 {
        return Err(invalid("choose one of --fmin/--threshold, --lemma1, --noisy"));
    }
    let ds = prime_dims(&a.d)?;
    if a.fmin || a.threshold {
        let rows: Vec<Vec<Cell>> = ds
            .par_iter()
            .map(|&d| -> Result<Vec<Cell>, CliError> {
                let t = noisy_thresholds(d)?;
                Ok(vec![
                    d.get().into(),
                    t.f_min.into(),
                    t.p_min.into(),
                    t.q_min.into(),
                    universal_threshold(d).into(),
                ])
            })
            .collect::<Result<_, _>>()?;
        let mut table =
            Table::new(&["d", "F_min", "p_min", "q_min", "q_universal"]).meta("command", "hashing-thresholds");
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(table);
    }
    if a.lemma1 {
        let mut table = Table::new(&["d", "n", "trials", "estimate", "expected", "sigma", "z"])
            .meta("command", "hashing-lemma1")
            .meta("seed", seed);
        for &d in &ds {
            let est = lemma1_montecarlo(d, a.pairs, a.trials, seed)?;
            let expected = 1.0 / d.as_f64();
            let sigma = binomial_sigma(expected, a.trials);
            table.push(vec![
                d.get().into(),
                a.pairs.into(),
                a.trials.into(),
                est.into(),
                expected.into(),
                sigma.into(),
                ((est - expected) / sigma).into(),
            ]);
        }
        return Ok(table);
    }
    if a.noisy {
        let ps = grid(&a.transmission)?;
        let qs = grid(&a.resource)?;
        let mut table =
            Table::new(&["d", "p", "q", "F_eff", "yield", "works"]).meta("command", "hashing-noisy");
        for &d in &ds {
            for &p in &ps {
                for &q in &qs {
                    table.push(vec![
                        d.get().into(),
                        p.into(),
                        q.into(),
                        effective_fidelity(d, p, q)?.into(),
                        noisy_asymptotic_yield(d, p, q)?.into(),
                        noisy_hashing_works(d, p, q)?.into(),
                    ]);
                }
            }
        }
        return Ok(table);
    }

    let fs = grid(a.fidelity.as_deref().ok_or_else(|| invalid("--F is required"))?)?;
    let Some(sweep) = &a.n_sweep else {
        let mut table = Table::new(&["d", "F", "S", "yield"]).meta("command", "hashing-asymptotic");
        for &d in &ds {
            for &f in &fs {
                let n2 = d.as_f64() * d.as_f64();
                if !(f > 1.0 / n2 && f <= 1.0) {
                    return Err(invalid(format!("F = {f} outside (1/d^2, 1] for d = {}", d.get())));
                }
                let s = isotropic_entropy(d, f);
                table.push(vec![d.get().into(), f.into(), s.into(), (1.0 - s).max(0.0).into()]);
            }
        }
        return Ok(table);
    };
    let ns = parse_n_sweep(sweep).map_err(invalid)?;
    let mut table = Table::new(&[
        "d", "F", "n", "delta", "S", "r", "yield", "yield_raw", "p1_bound", "p2", "F_out_bound", "F_out_raw",
        "feasible",
    ])
    .meta("command", "hashing-finite")
    .meta("delta_policy", serde_json::to_value(a.delta).unwrap_or(Value::Null));
    for &d in &ds {
        for &f in &fs {
            for &n in &ns {
                let r = finite_size_report(d, n, f, a.delta)?;
                table.push(vec![
                    d.get().into(),
                    f.into(),
                    n.into(),
                    r.delta.into(),
                    r.entropy.into(),
                    r.r.into(),
                    r.yield_.into(),
                    r.yield_raw.into(),
                    r.p1_bound.into(),
                    r.p2.into(),
                    r.f_out_bound.into(),
                    r.f_out_raw.into(),
                    r.feasible.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn ghz_row(s: &GhzCoeffs) -> Result<Vec<Cell>, CliError> {
    let e = index_entropies(s);
    Ok(vec![
        s.dim().get().into(),
        s.parties().into(),
        s.fidelity().into(),
        multipartite_yield(s)?.into(),
        e.h0.into(),
        e.hmax_amp.into(),
        e.correlated().into(),
    ])
}

fn ghz(a: &GhzArgs) -> Result<Table, CliError> {
    let mut table =
        Table::new(&["d", "N", "F", "yield", "H0", "Hmax_amp", "correlated"]).meta("command", "ghz");
    if let Some(path) = &a.state {
        table.push(ghz_row(&parse_ghz_json(&read_file(path)?)?)?);
        return Ok(table);
    }
    let ds = prime_dims(&a.d)?;
    let ns = parse_dims(&a.parties).map_err(invalid)?;
    let fs = grid(&a.fidelity)?;
    for &d in &ds {
        for &n in &ns {
            for &f in &fs {
                table.push(ghz_row(&ghz_isotropic(d, n, f)?)?);
            }
        }
    }
    Ok(table)
}

fn oracle_check(a: &OracleArgs, seed: u64, format: Format) -> Result<String, CliError> {
    let ds = dims(&a.d)?;
    if a.states == 0 {
        return Err(invalid("--states must be positive"));
    }
    let report = run_suite(&ds, a.states, seed)?;
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
            v["passed"] = report.passed().into();
            v["max_deviation"] = report.max_deviation().into();
            Ok(pretty(&v))
        }
        Format::Csv => {
            let mut table = Table::new(&["check", "d", "max_deviation", "passed"]);
            for c in &report.checks {
                table.push(vec![c.check.clone().into(), c.d.into(), c.max_deviation.into(), c.passed.into()]);
            }
            table.to_csv()
        }
    }
}
