use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use fracheat::harness::{eigen_decay_study, fmt_float, self_reference_study, ComparisonConfig, TimeStep};
use fracheat::{evolve, EigenPair, ErrorReport, Scheme};
use serde_json::json;

use crate::config::{Command, Format, IcKind, RunConfig};
use crate::error::{CliError, CliResult};

/// Runs the configured command and writes its output.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let body = render(cfg)?;
    match &cfg.out {
        Some(path) => write_file(path, &body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Output document of the configured command.
pub fn render(cfg: &RunConfig) -> CliResult<String> {
    match cfg.command {
        Command::Weights => weights(cfg),
        Command::Eigen => eigen(cfg),
        Command::Solve => solve(cfg),
        Command::Converge => Ok(report_output(cfg, &study(cfg, &[cfg.scheme])?)),
        Command::Compare => Ok(report_output(cfg, &study(cfg, &Scheme::ALL)?)),
    }
}

fn header(cfg: &RunConfig) -> String {
    let echo: Vec<String> = cfg.echo().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", echo.join(" "))
}

fn json_line(value: serde_json::Value) -> String {
    let mut s = value.to_string();
    s.push('\n');
    s
}

fn weights(cfg: &RunConfig) -> CliResult<String> {
    let w = cfg.scheme.weights(cfg.alpha, cfg.n)?;
    let sums = w.partial_sums();
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = header(cfg);
            out.push_str("k,w_k,partial_sum\n");
            for (k, (wk, s)) in w.as_slice().iter().zip(&sums).enumerate() {
                let _ = writeln!(out, "{k},{},{}", fmt_float(*wk), fmt_float(*s));
            }
            out
        }
        Format::Json => json_line(json!({
            "alpha": cfg.alpha,
            "scheme": cfg.scheme.as_str(),
            "k": (0..=cfg.n).collect::<Vec<_>>(),
            "w_k": w.as_slice(),
            "partial_sum": sums,
        })),
    })
}

fn eigen(cfg: &RunConfig) -> CliResult<String> {
    let pair = EigenPair::principal(cfg.alpha)?;
    Ok(match cfg.format {
        Format::Csv => format!("{}alpha,c\n{},{}\n", header(cfg), fmt_float(cfg.alpha), fmt_float(pair.c)),
        Format::Json => json_line(json!({ "alpha": cfg.alpha, "c": pair.c })),
    })
}

fn solve(cfg: &RunConfig) -> CliResult<String> {
    let traj = evolve(&cfg.evolution_config())?;
    let n = cfg.n;
    let xs: Vec<f64> = (1..=n).map(|i| traj.states[0].node(i)).collect();
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = header(cfg);
            out.push_str("t,x,u\n");
            for (t, u) in traj.times.iter().zip(&traj.states) {
                let t = fmt_float(*t);
                for (x, v) in xs.iter().zip(u.values()) {
                    let _ = writeln!(out, "{t},{},{}", fmt_float(*x), fmt_float(*v));
                }
            }
            out
        }
        Format::Json => {
            let states: Vec<&[f64]> = traj.states.iter().map(|u| u.values()).collect();
            json_line(json!({
                "alpha": cfg.alpha,
                "scheme": cfg.scheme.as_str(),
                "t": traj.times,
                "x": xs,
                "u": states,
                "sup_norm": traj.sup_norms,
                "l1_norm": traj.l1_norms,
            }))
        }
    })
}

/// Refinement study over `n-list`: analytic reference for the eigenmode,
/// fine-grid self-reference at `8 max(n-list)` otherwise.
fn study(cfg: &RunConfig, schemes: &[Scheme]) -> CliResult<ErrorReport> {
    let mut report = if cfg.ic == IcKind::Eigen {
        let mut metadata = BTreeMap::new();
        let mut rows = Vec::new();
        for &scheme in schemes {
            let r = eigen_decay_study(cfg.alpha, scheme, &cfg.n_list, cfg.t_final, cfg.dt.map(TimeStep::Fixed))?;
            metadata = r.metadata;
            rows.extend(r.rows);
        }
        ErrorReport::from_rows(metadata, rows)
    } else {
        let n_max = cfg.n_list.iter().copied().max().unwrap_or(0);
        self_reference_study(&ComparisonConfig {
            alpha: cfg.alpha,
            ic: cfg.initial_condition(),
            t_final: cfg.t_final,
            n_list: cfg.n_list.clone(),
            n_reference: 8 * n_max,
            dt: cfg.dt,
            schemes: schemes.to_vec(),
        })?
    };
    for (k, v) in cfg.echo() {
        // studies already record some settings under their own names
        if !report.metadata.contains_key(&k.replace('-', "_")) {
            report.metadata.insert(k.to_string(), v);
        }
    }
    Ok(report)
}

fn report_output(cfg: &RunConfig, report: &ErrorReport) -> String {
    match cfg.format {
        Format::Csv => report.to_csv(),
        Format::Json => json_line(serde_json::to_value(report).expect("reports serialize")),
    }
}
