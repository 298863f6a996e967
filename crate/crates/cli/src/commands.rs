use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use weakecho::analysis::{
    aav_convergence, convergence_orders, distinguishability_sweep, echo_scan, halving_sequence,
    shift_sweep, strong_strength, EchoScanOptions, Regime, SweepOptions, STRONG_STRENGTH_GUESS,
};
use weakecho::readout::HERMITICITY_TOLERANCE;
use weakecho::{
    brute_force_oracle, condition_residuals, conditional_expectation, pointer_matrices,
    von_neumann_entangle, EntangledState, Error, PointerFamily, PointerObservable, SystemState,
};

use crate::config::{Config, FamilyKind, Strength};
use crate::error::CliError;
use crate::output::{num, opt, Table};

pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    /// Set when results were produced but break a numerical contract.
    pub violation: Option<String>,
}

impl Outcome {
    fn new(tables: Vec<Table>, summary: Vec<String>) -> Self {
        Self {
            tables,
            summary,
            violation: None,
        }
    }
}

fn family(cfg: &Config, kind: FamilyKind) -> Result<PointerFamily, CliError> {
    Ok(cfg.pointer.family(kind)?)
}

pub fn distinguishability(cfg: &Config) -> Result<Outcome, CliError> {
    let c = &cfg.distinguishability;
    let mut table = Table::new(None, vec!["family", "eta", "D10_re", "D10_im", "D10_abs"]);
    let mut summary = Vec::new();
    for &kind in &c.families {
        let rows =
            distinguishability_sweep(&family(cfg, kind)?, &cfg.observable, &c.etas, &cfg.grid)?;
        let min = rows
            .iter()
            .min_by(|a, b| a.d10.norm().total_cmp(&b.d10.norm()))
            .expect("non-empty eta list");
        summary.push(format!(
            "{}: {} strengths, smallest |D10| = {:.6} at eta = {}",
            kind.name(),
            rows.len(),
            min.d10.norm(),
            min.eta
        ));
        for r in rows {
            table.rows.push(vec![
                kind.name().into(),
                num(r.eta),
                num(r.d10.re),
                num(r.d10.im),
                num(r.d10.norm()),
            ]);
        }
    }
    Ok(Outcome::new(vec![table], summary))
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Weak => "weak",
        Regime::Strong => "strong",
        Regime::FlippedEcho => "flipped echo",
    }
}

pub fn shift_sweeps(cfg: &Config) -> Result<Outcome, CliError> {
    if cfg.observable.dim() != 2 {
        let (line, column) = cfg.eigenvalues_at;
        return Err(CliError::Config {
            line,
            column,
            message: format!(
                "shift-sweep needs two eigenvalues, got {}",
                cfg.observable.dim()
            ),
        });
    }
    let c = &cfg.shift_sweep;
    let fam = family(cfg, c.family)?;
    let options = SweepOptions {
        spec: cfg.grid,
        eta_eff: c.eta_eff,
        echo_threshold: cfg.echo_scan.threshold,
    };
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    for strength in &c.strengths {
        let (eta, tag) = match strength {
            Strength::Value(eta) => (*eta, format!("eta{eta}")),
            Strength::Strong => (
                strong_strength(&fam, &cfg.observable, STRONG_STRENGTH_GUESS, &cfg.grid)?,
                "strong".to_string(),
            ),
        };
        for (param, values) in &c.sweeps {
            let sweep = shift_sweep(&fam, &cfg.observable, eta, *param, values, &cfg.f, &options)?;
            let label = format!("{}-{tag}", param.name());
            let mut table = Table::new(
                Some(label.clone()),
                vec![
                    "param",
                    "prob",
                    "chi_shift",
                    "mu_shift",
                    "norm_chi",
                    "norm_mu",
                    "ref_re",
                    "ref_im",
                    "status",
                ],
            );
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut failed = 0;
            for row in &sweep.rows {
                let s = row.shifts;
                if let Some(s) = s {
                    lo = lo.min(s.norm_chi);
                    hi = hi.max(s.norm_chi);
                }
                if row.status != weakecho::analysis::RowStatus::Ok {
                    failed += 1;
                }
                table.rows.push(vec![
                    num(row.param),
                    opt(s.map(|s| s.prob)),
                    opt(s.map(|s| s.chi)),
                    opt(s.map(|s| s.mu)),
                    opt(s.map(|s| s.norm_chi)),
                    opt(s.map(|s| s.norm_mu)),
                    opt(row.reference.map(|r| r.re)),
                    opt(row.reference.map(|r| r.im)),
                    row.status.name().into(),
                ]);
            }
            summary.push(format!(
                "{label}: eta = {eta:.9}, eta_eff = {:.9}, D10 = {:.6}, {} regime, normalized chi in [{lo:.4}, {hi:.4}], {failed} flagged rows",
                sweep.eta_eff,
                sweep.d10.re,
                regime_name(sweep.regime)
            ));
            tables.push(table);
        }
    }
    Ok(Outcome::new(tables, summary))
}

pub fn echo_scans(cfg: &Config) -> Result<Outcome, CliError> {
    let c = &cfg.echo_scan;
    let options = EchoScanOptions {
        threshold: c.threshold,
        step: c.step,
        include_boundary: c.include_boundary,
        spec: cfg.grid,
    };
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    for &kind in &c.families {
        let points = echo_scan(
            &family(cfg, kind)?,
            &cfg.observable,
            c.range,
            c.exclude_origin,
            &options,
        )?;
        let mut table = Table::new(
            Some(kind.name().into()),
            vec!["eta_star", "D_re", "D_im", "eta_bar", "flipped"],
        );
        for p in &points {
            table.rows.push(vec![
                num(p.eta_star),
                num(p.d_value.re),
                num(p.d_value.im),
                num(c.eta_bar.unwrap_or(p.eta_bar)),
                p.flipped.to_string(),
            ]);
        }
        let listed: Vec<String> = points
            .iter()
            .map(|p| {
                format!(
                    "{:.6}{}",
                    p.eta_star,
                    if p.flipped { " (flipped)" } else { "" }
                )
            })
            .collect();
        summary.push(format!(
            "{}: {} echoes on [{}, {}]{}{}",
            kind.name(),
            points.len(),
            c.range.0,
            c.range.1,
            if listed.is_empty() { "" } else { " at " },
            listed.join(", ")
        ));
        tables.push(table);
    }
    Ok(Outcome::new(tables, summary))
}

pub fn verify_conditions(cfg: &Config) -> Result<Outcome, CliError> {
    let c = &cfg.verify_conditions;
    let mut table = Table::new(None, vec!["family", "eta", "r_D", "r_chi", "r_mu"]);
    let mut summary = Vec::new();
    let mut violation = None;
    for &kind in &c.families {
        let fam = family(cfg, kind)?;
        let mut worst_herm: f64 = 0.0;
        for &eta in &c.etas {
            let m = pointer_matrices(&fam, eta, &cfg.observable, &cfg.grid)?;
            worst_herm = worst_herm.max(m.hermiticity_residue());
            let r = condition_residuals(&m);
            table.rows.push(vec![
                kind.name().into(),
                num(eta),
                num(r.d),
                num(r.chi),
                num(r.mu),
            ]);
        }
        if worst_herm > HERMITICITY_TOLERANCE {
            violation = Some(format!(
                "{}: pointer matrices are not Hermitian (residue {worst_herm:.3e})",
                kind.name()
            ));
        }
        summary.push(format!(
            "{}: {} strengths, Hermiticity residue {worst_herm:.2e}",
            kind.name(),
            c.etas.len()
        ));
    }
    Ok(Outcome {
        tables: vec![table],
        summary,
        violation,
    })
}

pub fn aav(cfg: &Config) -> Result<Outcome, CliError> {
    let c = &cfg.aav_convergence;
    let etas = halving_sequence(c.eta_start, c.eta_end);
    let rows = aav_convergence(
        &family(cfg, c.family)?,
        &cfg.observable,
        &cfg.psi,
        &c.f,
        &etas,
        &cfg.grid,
    )?;
    let orders = convergence_orders(&rows);
    let mut table = Table::new(
        None,
        vec![
            "eta", "shift_re", "shift_im", "weak_re", "weak_im", "error", "order",
        ],
    );
    for (r, o) in rows.iter().zip(&orders) {
        table.rows.push(vec![
            num(r.eta),
            num(r.shift.re),
            num(r.shift.im),
            num(r.weak_value.re),
            num(r.weak_value.im),
            num(r.error),
            opt(*o),
        ]);
    }
    let measured: Vec<String> = orders.iter().flatten().map(|o| format!("{o:.3}")).collect();
    let summary = vec![format!(
        "{}: {} strengths from {} to {}, measured orders [{}]",
        c.family.name(),
        rows.len(),
        etas[0],
        etas[etas.len() - 1],
        measured.join(", ")
    )];
    Ok(Outcome::new(vec![table], summary))
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> SystemState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        if let Ok(s) = SystemState::normalized(amps) {
            return s;
        }
    }
}

struct OracleTally {
    table: Table,
    tolerance: f64,
    worst: f64,
    bad: usize,
    total: usize,
}

impl OracleTally {
    fn compare(
        &mut self,
        label: &str,
        eta: Option<f64>,
        trial: usize,
        state: &EntangledState,
        f: &SystemState,
    ) -> Result<(), CliError> {
        for obs in PointerObservable::BOTH {
            self.total += 1;
            let formula = conditional_expectation(state, f, obs);
            let oracle = brute_force_oracle(state, f, obs);
            let (x, y, rel, status) = match (formula, oracle) {
                (Ok(x), Ok(y)) => {
                    let rel = (x - y).abs() / y.abs();
                    let ok = rel <= self.tolerance || x == y;
                    self.worst = self.worst.max(if x == y { 0.0 } else { rel });
                    (
                        Some(x),
                        Some(y),
                        Some(rel),
                        if ok { "ok" } else { "mismatch" },
                    )
                }
                (Err(Error::ZeroPostSelection { .. }), Err(Error::ZeroPostSelection { .. })) => {
                    (None, None, None, "zero_post_selection")
                }
                (Err(e), _) | (_, Err(e)) if !e.is_numerical_contract() => {
                    (None, None, None, "disagreement")
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            if status == "mismatch" || status == "disagreement" {
                self.bad += 1;
            }
            self.table.rows.push(vec![
                label.into(),
                opt(eta),
                trial.to_string(),
                obs.name().into(),
                opt(x),
                opt(y),
                opt(rel.filter(|r| r.is_finite())),
                status.into(),
            ]);
        }
        Ok(())
    }
}

pub fn oracle_check(cfg: &Config) -> Result<Outcome, CliError> {
    let c = &cfg.oracle_check;
    let dim = cfg.observable.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut tally = OracleTally {
        table: Table::new(
            None,
            vec![
                "family",
                "eta",
                "trial",
                "observable",
                "formula",
                "oracle",
                "rel_err",
                "status",
            ],
        ),
        tolerance: c.tolerance,
        worst: 0.0,
        bad: 0,
        total: 0,
    };
    let joint = cfg
        .joint
        .as_ref()
        .map(|j| j.load().map(|s| (j, s)))
        .transpose()?;
    for &kind in &c.families {
        let fam = family(cfg, kind)?;
        for &eta in &c.etas {
            let base = von_neumann_entangle(&cfg.psi, &cfg.observable, &fam, eta, &cfg.grid)?;
            for trial in 0..c.trials {
                let psi = random_state(&mut rng, dim);
                let f = random_state(&mut rng, dim);
                let state = base.with_system_state(&psi)?;
                tally.compare(kind.name(), Some(eta), trial, &state, &f)?;
            }
        }
    }
    let mut summary = Vec::new();
    if let Some((joint, state)) = joint {
        for trial in 0..c.trials {
            let f = random_state(&mut rng, state.dim());
            tally.compare("joint", None, trial, &state, &f)?;
        }
        summary.push(format!(
            "joint amplitudes from {}: {} system levels",
            joint.amplitudes.display(),
            state.dim()
        ));
    }
    let OracleTally {
        table,
        worst,
        bad,
        total,
        ..
    } = tally;
    summary.push(format!(
        "{total} comparisons, worst relative difference {worst:.3e}, {bad} outside tolerance {:e}",
        c.tolerance
    ));
    Ok(Outcome {
        tables: vec![table],
        summary,
        violation: (bad > 0)
            .then(|| format!("{bad} readouts disagree with the brute-force oracle")),
    })
}
