//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fracheat::harness::{eigen_decay_study, gaussian_comparison, observed_order, TimeStep};
use fracheat::interp::projection_error;
use fracheat::operator::exactness_residual;
use fracheat::reference::{eigenfunction_u_c, ContinuousInverse};
use fracheat::weights::{generating_residual, qmatrix_report};
use fracheat::{
    build_operator, closed_form_inverse, evolve_from, grunwald_weights, new_weights, EigenPair, EvolutionConfig,
    GridFunction, InitialCondition, Norm, Scheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), fracheat::Error>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn weight_signs() -> Outcome {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for k in 1..=9 {
        let alpha = 1.0 + 0.1 * k as f64;
        let w = new_weights(alpha, 4096)?;
        let report = qmatrix_report(&w);
        let sums = w.partial_sums();
        let negative = sums[1..].iter().all(|&s| s < 0.0);
        let increasing = sums[1..].windows(2).all(|p| p[1] >= p[0]);
        let ratio = sums[4096].abs() / sums[256].abs();
        worst_ratio = worst_ratio.max(ratio);
        ok &= report.w1_negative && report.others_positive && negative && increasing && ratio < 1.0;
    }
    Ok((ok, format!("max |S_4096|/|S_256| = {worst_ratio:.3e}")))
}

fn classical_reduction() -> Outcome {
    let expected = |k: usize| match k {
        0 | 2 => 1.0,
        1 => -2.0,
        _ => 0.0,
    };
    let mut weight_err: f64 = 0.0;
    for w in [new_weights(2.0, 4096)?, grunwald_weights(2.0, 4096)?] {
        for (k, &v) in w.as_slice().iter().enumerate() {
            weight_err = weight_err.max((v - expected(k)).abs());
        }
    }
    let pair = EigenPair::principal(2.0)?;
    let c_err = (pair.c + PI * PI).abs();
    let mut u_err: f64 = 0.0;
    for i in 0..1000 {
        let x = i as f64 / 999.0;
        u_err = u_err.max((eigenfunction_u_c(2.0, pair.c, x)? - (PI * x).sin() / PI).abs());
    }
    Ok((
        weight_err <= 1e-10 && c_err <= 1e-8 && u_err <= 1e-10,
        format!("weights {weight_err:.1e}, c {c_err:.1e}, u_c {u_err:.1e}"),
    ))
}

fn exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [1.2, 1.5, 1.8] {
        worst = worst.max(exactness_residual(alpha, 1000)?);
    }
    Ok((worst <= 1e-9, format!("max normalised residual {worst:.2e}")))
}

fn closed_form_inverse_oracle() -> Outcome {
    let m = build_operator(1.4, 256, Scheme::New)?.to_dense();
    let x = closed_form_inverse(1.4, 256)?;
    let product = m.dot(&x);
    let mut worst: f64 = 0.0;
    for ((i, j), &v) in product.indexed_iter() {
        worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
    }
    Ok((worst <= 1e-8, format!("max |MX - I| = {worst:.2e}")))
}

fn generating_function() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [1.2, 1.5, 1.8] {
        let w = new_weights(alpha, 2048)?;
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            worst = worst.max(generating_residual(&w, t)?);
        }
    }
    Ok((worst <= 1e-8, format!("max residual {worst:.2e}")))
}

fn eigen_order(scheme: Scheme, band: (f64, f64)) -> Outcome {
    let report = eigen_decay_study(1.4, scheme, &[50, 100, 200, 400], 0.05, Some(TimeStep::PowerOfH(1.9)))?;
    let order = report.chain_order(scheme, Norm::Sup)?;
    let errors: Vec<String> = report.chain(scheme, Norm::Sup).iter().map(|r| format!("{:.2e}", r.error)).collect();
    Ok((
        order >= band.0 && order <= band.1,
        format!("order {order:.3} in [{}, {}], errors [{}]", band.0, band.1, errors.join(", ")),
    ))
}

fn new_scheme_order() -> Outcome {
    eigen_order(Scheme::New, (1.15, 1.7))
}

fn grunwald_order() -> Outcome {
    eigen_order(Scheme::Grunwald, (0.2, 0.7))
}

fn gaussian_error_ratio() -> Outcome {
    let report = gaussian_comparison(0.0005, 0.4, 1.4, 0.01, &[50, 100, 200, 400], 3200)?;
    let new = report.error_at(Scheme::New, Norm::Sup, 400).expect("n = 400 row");
    let grunwald = report.error_at(Scheme::Grunwald, Norm::Sup, 400).expect("n = 400 row");
    let ratio = grunwald / new;
    Ok((
        ratio >= 3.0,
        format!(
            "relative sup error new {:.3}%, grunwald {:.3}%, ratio {ratio:.3} (need >= 3)",
            new * 100.0,
            grunwald * 100.0
        ),
    ))
}

fn positivity_and_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = 100;
    let mut min_entry = f64::INFINITY;
    let mut ok = true;
    for alpha in [1.3, 1.7] {
        for _ in 0..100 {
            let sparsity: f64 = rng.gen();
            let values: Vec<f64> =
                (0..n).map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen_range(0.0..10.0) }).collect();
            let dt = 10f64.powf(rng.gen_range(-6.0..-1.0));
            let cfg = EvolutionConfig::new(alpha, n, 100.0 * dt, Scheme::New, InitialCondition::Custom(values.clone()))
                .with_dt(dt);
            let traj = evolve_from(&cfg, GridFunction::new(alpha, values)?)?;
            ok &= traj.states.len() == 101;
            for u in &traj.states {
                min_entry = min_entry.min(u.values().iter().copied().fold(f64::INFINITY, f64::min));
            }
            ok &= traj.sup_norms.windows(2).all(|p| p[1] <= p[0]);
        }
    }
    ok &= min_entry >= -1e-12;
    Ok((ok, format!("min entry {min_entry:.2e}")))
}

fn projection_rate() -> Outcome {
    let alpha = 1.5;
    let f = ContinuousInverse::new(alpha, |x: f64| (-50.0 * (x - 0.5).powi(2)).exp())?;
    let ns = [32, 64, 128, 256];
    let mut chain = Vec::new();
    for n in ns {
        let h = 1.0 / (n as f64 + 1.0);
        let err = projection_error(|x| f.apply(x).expect("x in [0, 1]"), alpha, n, 3)?;
        chain.push((h, err));
    }
    let order = observed_order(&chain)?;
    Ok((order >= alpha - 0.2, format!("order {order:.3} (need >= {})", alpha - 0.2)))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "weight sign structure", budget: Duration::from_secs(5), check: weight_signs },
        Criterion {
            id: 2,
            name: "classical reduction at alpha = 2",
            budget: Duration::from_secs(1),
            check: classical_reduction,
        },
        Criterion { id: 3, name: "exactness on x^(alpha-1)", budget: Duration::from_secs(1), check: exactness },
        Criterion {
            id: 4,
            name: "closed-form inverse",
            budget: Duration::from_secs(2),
            check: closed_form_inverse_oracle,
        },
        Criterion {
            id: 5,
            name: "generating function identity",
            budget: Duration::from_secs(2),
            check: generating_function,
        },
        Criterion {
            id: 6,
            name: "eigenmode order, new scheme",
            budget: Duration::from_secs(180),
            check: new_scheme_order,
        },
        Criterion { id: 7, name: "eigenmode order, Grunwald", budget: Duration::from_secs(180), check: grunwald_order },
        Criterion {
            id: 8,
            name: "Gaussian comparison at n = 400",
            budget: Duration::from_secs(600),
            check: gaussian_error_ratio,
        },
        Criterion {
            id: 9,
            name: "positivity and contraction",
            budget: Duration::from_secs(30),
            check: positivity_and_contraction,
        },
        Criterion { id: 10, name: "projection rate", budget: Duration::from_secs(30), check: projection_rate },
    ];

    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= c.budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} [{:>2}] {}: {} ({:.2?} of {:?})",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed,
            c.budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
