//! Grid-refinement studies and observed-order estimation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::evolution::{evolve_final, EvolutionConfig, InitialCondition};
use crate::grid::{spacing, GridFunction};
use crate::interp::PowerInterpolant;
use crate::operator::build_operator;
use crate::reference::EigenPair;
use crate::specfun::gamma;
use crate::weights::Scheme;
use crate::{check_alpha, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Sup,
    L1,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Sup => "sup",
            Norm::L1 => "l1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub scheme: Scheme,
    pub alpha: f64,
    pub n: usize,
    pub h: f64,
    /// Time step actually taken; absent for purely spatial studies.
    pub dt: Option<f64>,
    pub norm: Norm,
    pub error: f64,
    /// Two-point order against the previous row of the same chain.
    pub observed_order: Option<f64>,
}

/// Rows of one or more refinement chains plus free-form metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ErrorReport {
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// Assembles rows into chains keyed by `(scheme, norm)`, ordered by `n`,
    /// and fills in the two-point observed orders.
    pub fn from_rows(metadata: BTreeMap<String, String>, mut rows: Vec<ErrorRow>) -> Self {
        rows.sort_by_key(|r| (r.scheme, r.norm, r.n));
        for i in 1..rows.len() {
            let (prev, cur) = (&rows[i - 1], &rows[i]);
            if prev.scheme == cur.scheme && prev.norm == cur.norm {
                let order = two_point_order((prev.h, prev.error), (cur.h, cur.error));
                rows[i].observed_order = order;
            }
        }
        Self { metadata, rows }
    }

    pub fn chain(&self, scheme: Scheme, norm: Norm) -> Vec<&ErrorRow> {
        self.rows.iter().filter(|r| r.scheme == scheme && r.norm == norm).collect()
    }

    /// Least-squares order of one chain.
    pub fn chain_order(&self, scheme: Scheme, norm: Norm) -> Result<f64> {
        let pairs: Vec<(f64, f64)> = self.chain(scheme, norm).iter().map(|r| (r.h, r.error)).collect();
        observed_order(&pairs)
    }

    pub fn error_at(&self, scheme: Scheme, norm: Norm, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.scheme == scheme && r.norm == norm && r.n == n).map(|r| r.error)
    }

    /// CSV rendering: one `#` metadata line, the header, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let meta: Vec<String> = self.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "# {}", meta.join(" "));
        out.push_str("scheme,alpha,n,h,dt,norm,error,observed_order\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.scheme,
                fmt_float(r.alpha),
                r.n,
                fmt_float(r.h),
                r.dt.map(fmt_float).unwrap_or_default(),
                r.norm.as_str(),
                fmt_float(r.error),
                r.observed_order.map(fmt_float).unwrap_or_default(),
            );
        }
        out
    }
}

/// Shortest round-trip decimal representation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

fn two_point_order(coarse: (f64, f64), fine: (f64, f64)) -> Option<f64> {
    let value = (coarse.1 / fine.1).ln() / (coarse.0 / fine.0).ln();
    value.is_finite().then_some(value)
}

/// Least-squares slope of `ln(error)` against `ln(h)`.
pub fn observed_order(chain: &[(f64, f64)]) -> Result<f64> {
    if chain.len() < 2 {
        return Err(Error::UndefinedOrder(format!("need at least two rows, got {}", chain.len())));
    }
    if let Some((h, e)) = chain.iter().find(|(h, e)| !(*h > 0.0) || !(*e > 0.0)) {
        return Err(Error::UndefinedOrder(format!("nonpositive entry h = {h}, error = {e}")));
    }
    let xs: Vec<f64> = chain.iter().map(|(h, _)| h.ln()).collect();
    let ys: Vec<f64> = chain.iter().map(|(_, e)| e.ln()).collect();
    let k = chain.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::UndefinedOrder("all grid spacings are equal".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub sup: f64,
    pub l1: f64,
}

/// What a grid function is compared against.
pub enum Reference<'a> {
    Function(&'a dyn Fn(f64) -> f64),
    /// A finer solution; shared nodes are used when the grids nest,
    /// otherwise the finer solution is power-interpolated.
    Grid(&'a GridFunction),
}

/// Sup and discrete-L¹ distance between `u` and the reference at the nodes of `u`.
pub fn error_norms(u: &GridFunction, reference: &Reference<'_>) -> Result<ErrorNorms> {
    let targets = reference_at_nodes(u, reference)?;
    let diffs = u.values().iter().zip(&targets).map(|(a, b)| (a - b).abs());
    let (sup, sum) = diffs.fold((0.0f64, 0.0), |(m, s), d| (m.max(d), s + d));
    Ok(ErrorNorms { sup, l1: u.h() * sum })
}

fn reference_at_nodes(u: &GridFunction, reference: &Reference<'_>) -> Result<Vec<f64>> {
    let n = u.n();
    match reference {
        Reference::Function(f) => Ok((1..=n).map(|i| f(u.node(i))).collect()),
        Reference::Grid(fine) => {
            if fine.n() < n {
                return Err(Error::IncompatibleGrids(format!(
                    "reference grid ({} nodes) is coarser than the solution ({n} nodes)",
                    fine.n()
                )));
            }
            if fine.alpha() != u.alpha() {
                return Err(Error::IncompatibleGrids(format!(
                    "reference has alpha = {}, solution has alpha = {}",
                    fine.alpha(),
                    u.alpha()
                )));
            }
            if (fine.n() + 1) % (n + 1) == 0 {
                let stride = (fine.n() + 1) / (n + 1);
                Ok((1..=n).map(|i| fine.values()[i * stride - 1]).collect())
            } else {
                let p = PowerInterpolant::from_grid(fine)?;
                (1..=n).map(|i| p.eval(u.node(i))).collect()
            }
        }
    }
}

/// Rule for choosing the time step of each refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `dt = h^p`.
    PowerOfH(f64),
    Fixed(f64),
}

impl TimeStep {
    pub fn dt(self, n: usize) -> f64 {
        match self {
            TimeStep::PowerOfH(p) => spacing(n).powf(p),
            TimeStep::Fixed(dt) => dt,
        }
    }
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Domain("empty refinement list".into()));
    }
    if let Some(n) = n_list.iter().find(|&&n| n < 3) {
        return Err(Error::Domain(format!("refinement level n = {n} is below 3")));
    }
    Ok(())
}

fn sorted(n_list: &[usize]) -> Vec<usize> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// Evolves `Π_n u_c` to `t_final` and compares with `e^(c t) u_c` at the nodes.
/// The default time step is `h^(α+1/2)`.
pub fn eigen_decay_study(
    alpha: f64,
    scheme: Scheme,
    n_list: &[usize],
    t_final: f64,
    step: Option<TimeStep>,
) -> Result<ErrorReport> {
    check_alpha(alpha)?;
    check_n_list(n_list)?;
    let ns = sorted(n_list);
    let coarsest = spacing(ns[0]).powf(alpha);
    if !(t_final > coarsest) {
        return Err(Error::Domain(format!(
            "final time {t_final} must exceed h^alpha = {coarsest} of the coarsest grid"
        )));
    }
    let step = step.unwrap_or(TimeStep::PowerOfH(alpha + 0.5));
    let pair = EigenPair::principal(alpha)?;

    let rows: Vec<Vec<ErrorRow>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<ErrorRow>> {
            let cfg =
                EvolutionConfig::new(alpha, n, t_final, scheme, InitialCondition::Eigenfunction).with_dt(step.dt(n));
            cfg.validate()?;
            let u0 = GridFunction::try_from_fn(alpha, n, |x| pair.u_c(x))?;
            let u = evolve_final(&cfg, u0)?;
            let exact = GridFunction::try_from_fn(alpha, n, |x| pair.decay(t_final, x))?;
            let norms = error_norms(&u, &Reference::Grid(&exact))?;
            let dt = Some(cfg.step_plan().1);
            let row = |norm, error| ErrorRow { scheme, alpha, n, h: spacing(n), dt, norm, error, observed_order: None };
            Ok(vec![row(Norm::Sup, norms.sup), row(Norm::L1, norms.l1)])
        })
        .collect::<Result<_>>()?;

    let mut metadata = BTreeMap::new();
    metadata.insert("study".into(), "eigen_decay".into());
    metadata.insert("reference".into(), "analytic".into());
    metadata.insert("c".into(), fmt_float(pair.c));
    metadata.insert("t_final".into(), fmt_float(t_final));
    Ok(ErrorReport::from_rows(metadata, rows.into_iter().flatten().collect()))
}

/// Parameters of a self-referenced comparison of both schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    pub alpha: f64,
    pub ic: InitialCondition,
    pub t_final: f64,
    pub n_list: Vec<usize>,
    /// Resolution of the new-scheme reference solution.
    pub n_reference: usize,
    /// Common time step for every run; defaults to `h_ref^α`.
    pub dt: Option<f64>,
    pub schemes: Vec<Scheme>,
}

impl ComparisonConfig {
    /// Gaussian initial data, both schemes, reference at `8·max(n_list)`.
    pub fn gaussian(alpha: f64, mu: f64, sigma2: f64, t_final: f64, n_list: Vec<usize>) -> Self {
        let n_reference = 8 * n_list.iter().copied().max().unwrap_or(0);
        Self {
            alpha,
            ic: InitialCondition::Gaussian { mu, sigma2 },
            t_final,
            n_list,
            n_reference,
            dt: None,
            schemes: Scheme::ALL.to_vec(),
        }
    }
}

/// Relative sup-norm errors of each scheme against a fine new-scheme
/// solution. All runs share one time step, so the time discretisation error
/// largely cancels and the rows measure the spatial error.
pub fn self_reference_study(cfg: &ComparisonConfig) -> Result<ErrorReport> {
    check_alpha(cfg.alpha)?;
    check_n_list(&cfg.n_list)?;
    if matches!(cfg.ic, InitialCondition::Custom(_)) {
        return Err(Error::Domain("custom grid data cannot be resampled across resolutions".into()));
    }
    let ns = sorted(&cfg.n_list);
    let n_max = *ns.last().expect("non-empty");
    if cfg.n_reference < 8 * n_max {
        return Err(Error::Domain(format!("reference resolution {} must be at least 8 x {n_max}", cfg.n_reference)));
    }
    let dt = cfg.dt.unwrap_or_else(|| spacing(cfg.n_reference).powf(cfg.alpha));
    let run = |scheme: Scheme, n: usize| -> Result<(GridFunction, f64)> {
        let ev = EvolutionConfig::new(cfg.alpha, n, cfg.t_final, scheme, cfg.ic.clone()).with_dt(dt);
        let u0 = cfg.ic.sample(cfg.alpha, n)?;
        Ok((evolve_final(&ev, u0)?, ev.step_plan().1))
    };

    let jobs: Vec<(Scheme, usize)> = cfg.schemes.iter().flat_map(|&s| ns.iter().map(move |&n| (s, n))).collect();
    let (reference, coarse) = rayon::join(
        || run(Scheme::New, cfg.n_reference),
        || jobs.par_iter().map(|&(s, n)| run(s, n).map(|r| (s, n, r))).collect::<Result<Vec<_>>>(),
    );
    let (reference, _) = reference?;
    let scale = reference.sup_norm();
    if !(scale > 0.0) {
        return Err(Error::Domain("reference solution vanishes identically".into()));
    }

    let mut rows = Vec::new();
    for (scheme, n, (u, dt_used)) in coarse? {
        let norms = error_norms(&u, &Reference::Grid(&reference))?;
        rows.push(ErrorRow {
            scheme,
            alpha: cfg.alpha,
            n,
            h: spacing(n),
            dt: Some(dt_used),
            norm: Norm::Sup,
            error: norms.sup / scale,
            observed_order: None,
        });
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("study".into(), "self_reference".into());
    metadata.insert("reference".into(), format!("new_scheme_n{}", cfg.n_reference));
    metadata.insert("error".into(), "relative_sup".into());
    metadata.insert("t_final".into(), fmt_float(cfg.t_final));
    Ok(ErrorReport::from_rows(metadata, rows))
}

/// Both schemes on Gaussian initial data against a fine self-reference.
pub fn gaussian_comparison(
    sigma2: f64,
    mu: f64,
    alpha: f64,
    t_final: f64,
    n_list: &[usize],
    n_reference: usize,
) -> Result<ErrorReport> {
    let mut cfg = ComparisonConfig::gaussian(alpha, mu, sigma2, t_final, n_list.to_vec());
    cfg.n_reference = n_reference;
    self_reference_study(&cfg)
}

/// Pointwise error of `M_h` applied to samples of `x^(2α-1)` against the
/// exact derivative `Γ(2α)/Γ(α) x^(α-1)`, at the node nearest `x = 1/2`.
pub fn operator_consistency_study(alpha: f64, scheme: Scheme, n_list: &[usize]) -> Result<ErrorReport> {
    check_alpha(alpha)?;
    check_n_list(n_list)?;
    let factor = gamma(2.0 * alpha)? / gamma(alpha)?;
    let rows = sorted(n_list)
        .into_iter()
        .map(|n| {
            let error = pointwise_operator_error(
                alpha,
                scheme,
                n,
                |x| x.powf(2.0 * alpha - 1.0),
                |x| factor * x.powf(alpha - 1.0),
                0.5,
            )?;
            Ok(ErrorRow { scheme, alpha, n, h: spacing(n), dt: None, norm: Norm::Sup, error, observed_order: None })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = BTreeMap::new();
    metadata.insert("study".into(), "operator_consistency".into());
    metadata.insert("test_function".into(), "x^(2alpha-1)".into());
    Ok(ErrorReport::from_rows(metadata, rows))
}

/// `|(M_h f)_i - exact(x_i)|` at the interior node nearest `x0`.
pub fn pointwise_operator_error(
    alpha: f64,
    scheme: Scheme,
    n: usize,
    f: impl Fn(f64) -> f64,
    exact: impl Fn(f64) -> f64,
    x0: f64,
) -> Result<f64> {
    let m = build_operator(alpha, n, scheme)?;
    let u = GridFunction::from_fn(alpha, n, f)?;
    let v = m.apply(&u)?;
    let i = ((x0 / m.h()).round() as usize).clamp(1, n);
    Ok((v.values()[i - 1] - exact(u.node(i))).abs())
}
