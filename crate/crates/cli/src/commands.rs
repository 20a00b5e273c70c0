//! One adapter per subcommand: call the library, tabulate, summarize.

use twoway_cvqkd::analysis::{self, NoiseCriterion, SweepSpec, TolerableNoise};
use twoway_cvqkd::keyrate::{secret_key_rate, KeyRateResult};
use twoway_cvqkd::montecarlo;
use twoway_cvqkd::Error;

use crate::config::RunConfig;
use crate::csv::{number, Cell, Table};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KeyRate,
    Sweep,
    TolerableNoise,
    Surface,
    MaxDistance,
    Validate,
}

/// CSV and summary of one run; `success` is false when a validation check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: Vec<String>,
    pub success: bool,
}

impl Report {
    fn ok(table: Table, summary: Vec<String>) -> Self {
        Self {
            table,
            summary,
            success: true,
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::KeyRate => key_rate(cfg),
        Command::Sweep => sweep(cfg),
        Command::TolerableNoise => tolerable_noise(cfg),
        Command::Surface => surface(cfg),
        Command::MaxDistance => max_distance(cfg),
        Command::Validate => validate(cfg),
    }
}

fn result_cells(r: &KeyRateResult) -> [Cell; 3] {
    [r.key_rate.into(), r.mutual_information.into(), r.holevo.into()]
}

fn key_rate(cfg: &RunConfig) -> Result<Report> {
    let r = secret_key_rate(&cfg.params)?;
    let mut table = Table::new(["distance_km", "base.K", "base.I", "base.chi"]);
    let mut row = vec![cfg.params.channel.distance_km.into()];
    row.extend(result_cells(&r));
    table.push(row);
    let summary = vec![format!(
        "K = {} bits/pulse at {} km (I = {}, chi = {}, k = {})",
        number(r.key_rate),
        cfg.params.channel.distance_km,
        number(r.mutual_information),
        number(r.holevo),
        number(r.estimator.k)
    )];
    Ok(Report::ok(table, summary))
}

pub fn sweep_spec(cfg: &RunConfig) -> SweepSpec {
    SweepSpec {
        base: cfg.params,
        variable: cfg.sweep.variable,
        start: cfg.sweep.start,
        stop: cfg.sweep.stop,
        step: cfg.sweep.step,
        configurations: cfg.configurations.clone(),
    }
}

fn sweep(cfg: &RunConfig) -> Result<Report> {
    let spec = sweep_spec(cfg);
    let rows = analysis::sweep(&spec)?;
    let mut header = vec![spec.variable.column_name().to_string()];
    for c in &spec.configurations {
        for q in ["K", "I", "chi"] {
            header.push(format!("{}.{q}", c.label));
        }
    }
    let mut table = Table::new(header);
    for row in &rows {
        let mut cells = vec![row.value.into()];
        for r in &row.results {
            cells.extend(result_cells(r));
        }
        table.push(cells);
    }
    let summary = vec![format!(
        "{} rows over {} in [{}, {}], {} configurations",
        rows.len(),
        spec.variable.column_name(),
        spec.start,
        spec.stop,
        spec.configurations.len()
    )];
    Ok(Report::ok(table, summary))
}

fn criterion_name(t: &TolerableNoise) -> &'static str {
    match t {
        TolerableNoise::Value { criterion: NoiseCriterion::MatchBare { .. }, .. } => "match_bare",
        TolerableNoise::Value { criterion: NoiseCriterion::PositiveKeyRate, .. } => "positive_key_rate",
        TolerableNoise::NoImprovement => "no_improvement",
    }
}

fn tolerable_noise(cfg: &RunConfig) -> Result<Report> {
    let d = cfg.params.channel.distance_km;
    let t = analysis::find_tolerable_noise(&cfg.params, d)?;
    let gain = cfg.params.amplifier.gain();
    let mut table = Table::new(["gain", "distance_km", "N_tol", "criterion"]);
    table.push(vec![
        gain.into(),
        d.into(),
        t.noise().into(),
        Cell::Text(criterion_name(&t).into()),
    ]);
    let line = match t.noise() {
        Some(n) => format!("N_tol = {} at g = {gain}, d = {d} km ({})", number(n), criterion_name(&t)),
        None => format!("no tolerable noise at g = {gain}, d = {d} km: even N = 1 does not improve the key rate"),
    };
    Ok(Report::ok(table, vec![line]))
}

fn surface(cfg: &RunConfig) -> Result<Report> {
    let (g0, g1, gs) = cfg.surface.gains;
    let (d0, d1, ds) = cfg.surface.distances;
    let gains = analysis::grid(g0, g1, gs);
    let distances = analysis::grid(d0, d1, ds);
    let cells = analysis::tolerable_noise_surface(&cfg.params, &gains, &distances)?;
    let mut table = Table::new(["gain", "distance_km", "N_tol"]);
    let mut summary = Vec::new();
    let mut absent = 0;
    for cell in &cells {
        let value = match &cell.result {
            Ok(t) => t.noise(),
            Err(e) => {
                summary.push(format!("g = {}, d = {} km: {e}", cell.gain, cell.distance_km));
                None
            }
        };
        absent += usize::from(value.is_none());
        table.push(vec![cell.gain.into(), cell.distance_km.into(), value.into()]);
    }
    summary.insert(
        0,
        format!("{} cells ({} gains x {} distances), {absent} without a tolerable noise", cells.len(), gains.len(), distances.len()),
    );
    Ok(Report::ok(table, summary))
}

fn max_distance(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::new(["config", "max_distance_km"]);
    let mut summary = Vec::new();
    for c in &cfg.configurations {
        let d = match analysis::find_max_distance(&c.apply(&cfg.params)) {
            Ok(d) => Some(d),
            Err(Error::NoPositiveKeyRate { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        summary.push(match d {
            Some(d) => format!("{}: {d:.2} km", c.label),
            None => format!("{}: no positive key rate", c.label),
        });
        table.push(vec![Cell::Text(c.label.clone()), d.into()]);
    }
    Ok(Report::ok(table, summary))
}

fn validate(cfg: &RunConfig) -> Result<Report> {
    let mc = cfg.montecarlo;
    let checks = montecarlo::validate(&cfg.params, mc.seed, mc.samples, mc.partitions)?;
    let mut table = Table::new(["check", "sampled", "analytic", "tolerance", "passed"]);
    let mut summary = Vec::new();
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        summary.push(format!(
            "{verdict} {}: sampled {} analytic {} (tolerance {})",
            c.name,
            number(c.sampled),
            number(c.analytic),
            number(c.tolerance)
        ));
        table.push(vec![
            Cell::Text(c.name.clone()),
            c.sampled.into(),
            c.analytic.into(),
            c.tolerance.into(),
            Cell::Text(c.passed.to_string()),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    summary.push(format!(
        "{} of {} checks passed (seed {}, {} samples)",
        checks.len() - failed,
        checks.len(),
        mc.seed,
        mc.samples
    ));
    Ok(Report {
        table,
        summary,
        success: failed == 0,
    })
}
