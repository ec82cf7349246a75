use rayon::prelude::*;

use wring::dynamics::{evolve, landau_zener_estimate, linear_ramp, ramp_time_for};
use wring::entanglement::{
    biseparability_scan, gibbs_state, gme_witness_w, pair_concurrence, two_level_model, w_overlap,
    w_state,
};
use wring::hamiltonian::{build_full, build_sector, ModelParams};
use wring::hilbert::StateVector;
use wring::phases::{
    critical_field_cascade_printed, default_bracket, find_crossing, find_crossing_with,
    gap_first_order, ground_state, min_gap, scan_ground_with_levels, CrossingReport,
    MinimumSource,
};
use wring::spectra::{eigensolve, xx_sector_spectrum_exact, xxz3_closed_form, ClosedFormMode, Xxz3Label};

use crate::config::{
    CrossingArgs, EntangleArgs, EntangleTable, GapArgs, RunConfig, ScanArgs, SourceArg,
    SpectrumArgs, StateChoice, SweepArgs, ThermalArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Set when the command ran but its checks did not hold (exit 1).
    pub failure: Option<String>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Self { table, warnings: Vec::new(), failure: None }
    }
}

fn xxz3_sector(label: Xxz3Label) -> usize {
    match label {
        Xxz3Label::AllUp => 0,
        Xxz3Label::W | Xxz3Label::WPhase(_) => 1,
        Xxz3Label::WBar | Xxz3Label::WBarPhase(_) => 2,
        Xxz3Label::AllDown => 3,
    }
}

pub fn cmd_spectrum(cfg: &RunConfig, args: &SpectrumArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let n = p.n_sites();
    let sector = cfg.file.pick(args.sector, "sector")?;
    let mut t = cfg.table("spectrum", &["index", "sector", "energy", "analytic", "label"]);
    t.meta("sector", sector.map_or(Cell::text("all"), Cell::from));

    if !p.conserves_magnetization() {
        if sector.is_some() {
            return Err(CliError::Usage("--sector needs b-perp = 0".into()));
        }
        let spec = eigensolve(&build_full(p)?, false)?;
        for (i, e) in spec.eigenvalues.iter().enumerate() {
            t.push(vec![i.into(), "mixed".into(), (*e).into(), Cell::Empty, Cell::Empty]);
        }
        return Ok(t.into());
    }

    let closed = if n == 3 { Some(xxz3_closed_form(p, ClosedFormMode::Corrected)?) } else { None };
    let sectors: Vec<usize> = match sector {
        Some(m) if m > n => return Err(wring::Error::SectorOutOfRange { n_sites: n, m }.into()),
        Some(m) => vec![m],
        None => (0..=n).collect(),
    };
    let blocks = sectors
        .par_iter()
        .map(|&m| -> CliResult<Vec<(usize, f64, Option<f64>, Option<String>)>> {
            let ed = eigensolve(&build_sector(p, m)?, false)?.eigenvalues;
            let free = if p.is_xx() { Some(xx_sector_spectrum_exact(p, m)?) } else { None };
            let mut used = Vec::new();
            Ok(ed
                .iter()
                .enumerate()
                .map(|(k, &e)| {
                    let matched = closed.as_ref().and_then(|levels| {
                        let hit = levels.iter().enumerate().find(|(i, l)| {
                            xxz3_sector(l.label) == m && !used.contains(i) && (l.energy - e).abs() < 1e-8
                        })?;
                        used.push(hit.0);
                        Some((hit.1.energy, hit.1.label.to_string()))
                    });
                    match matched {
                        Some((a, label)) => (m, e, Some(a), Some(label)),
                        None => (m, e, free.as_ref().map(|f| f[k]), None),
                    }
                })
                .collect())
        })
        .collect::<CliResult<Vec<_>>>()?;
    for (i, (m, e, a, label)) in blocks.into_iter().flatten().enumerate() {
        t.push(vec![i.into(), m.into(), e.into(), Cell::opt(a), label.map_or(Cell::Empty, Cell::from)]);
    }
    Ok(t.into())
}

pub fn cmd_scan(cfg: &RunConfig, args: &ScanArgs) -> CliResult<Report> {
    let f = &cfg.file;
    let scale = cfg.params.j_xy().abs().max(1.0);
    let b_from = f.pick(args.b_from, "b-from")?.unwrap_or(0.0);
    let b_to = f.pick(args.b_to, "b-to")?.unwrap_or(4.0 * scale);
    let steps = f.pick(args.steps, "steps")?.unwrap_or(81);
    let levels = f.pick(args.levels, "levels")?.unwrap_or(0);
    let scan = scan_ground_with_levels(&cfg.params, b_from, b_to, steps, levels)?;

    let mut columns = vec!["b".to_string(), "ground_energy".into(), "sector".into(), "w_fidelity".into(), "gap".into()];
    columns.extend((0..levels).map(|k| format!("level_{k}")));
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = cfg.table("scan", &names);
    t.meta("b_from", b_from).meta("b_to", b_to).meta("steps", steps).meta("levels", levels);
    for row in scan.rows {
        let mut cells = vec![
            row.b_field.into(),
            row.ground_energy.into(),
            row.sector.to_string().into(),
            row.w_fidelity.into(),
            row.gap.into(),
        ];
        cells.extend((0..levels).map(|k| Cell::opt(row.levels.get(k).copied())));
        t.push(cells);
    }
    Ok(t.into())
}

fn source_name(source: Option<MinimumSource>) -> &'static str {
    match source {
        Some(MinimumSource::FreeFermion) => "free-fermion",
        Some(MinimumSource::SectorEd) => "sector-ed",
        None => "formula",
    }
}

pub fn cmd_crossing(cfg: &RunConfig, args: &CrossingArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let f = &cfg.file;
    let n = p.n_sites();
    if !p.conserves_magnetization() {
        return Err(CliError::Usage("sector crossings need b-perp = 0".into()));
    }
    let m = f.pick(args.m, "m")?;
    let source = f.pick(args.source, "source")?;
    let (dlo, dhi) = default_bracket(p);
    let bracket = (f.pick(args.lo, "lo")?.unwrap_or(dlo), f.pick(args.hi, "hi")?.unwrap_or(dhi));
    let pairs: Vec<usize> = match m {
        Some(m) if m >= n => {
            return Err(CliError::Usage(format!("m must be below n = {n}, got {m}")))
        }
        Some(m) => vec![m],
        None => (0..n).collect(),
    };
    let run = |m: usize| -> wring::Result<CrossingReport> {
        match source {
            None => find_crossing(p, m, bracket),
            Some(SourceArg::FreeFermion) => find_crossing_with(p, m, bracket, MinimumSource::FreeFermion),
            Some(SourceArg::SectorEd) => find_crossing_with(p, m, bracket, MinimumSource::SectorEd),
        }
    };
    let results: Vec<wring::Result<CrossingReport>> = pairs.par_iter().map(|&m| run(m)).collect();

    let mut t = cfg.table(
        "crossing",
        &["m_low", "m_high", "b_cross", "method", "source", "residual", "b_printed"],
    );
    t.meta("bracket_lo", bracket.0).meta("bracket_hi", bracket.1);
    let mut warnings = Vec::new();
    for (&m, res) in pairs.iter().zip(results) {
        let printed = (p.is_xx() && p.j_xy() < 0.0).then(|| critical_field_cascade_printed(p.j_xy(), n, m));
        match res {
            Ok(r) => t.push(vec![
                r.m_low.into(),
                r.m_high.into(),
                r.b_cross.into(),
                "bisection".into(),
                source_name(r.source).into(),
                r.residual.into(),
                Cell::opt(printed),
            ]),
            Err(e @ wring::Error::NoSignChange { .. }) if pairs.len() > 1 => {
                warnings.push(format!("m = {m}: {e}"));
                t.push(vec![m.into(), (m + 1).into(), Cell::Empty, "none".into(), Cell::Empty, Cell::Empty, Cell::opt(printed)]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Report { table: t, warnings, failure: None })
}

/// Window of half-width `max(0.5|J|, 20·B′√N)` around the `m = 0 → 1` crossing.
fn default_gap_window(p: &ModelParams) -> CliResult<(f64, f64)> {
    let bare = p.with_b_perp(0.0)?;
    let centre = find_crossing(&bare, 0, default_bracket(&bare))?.b_cross;
    let half = (0.5 * p.j_xy().abs()).max(20.0 * gap_first_order(p.n_sites(), p.b_perp()));
    Ok((centre - half, centre + half))
}

pub fn cmd_gap(cfg: &RunConfig, args: &GapArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let f = &cfg.file;
    let lo = f.pick(args.window_lo, "window-lo")?;
    let hi = f.pick(args.window_hi, "window-hi")?;
    let window = match (lo, hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => default_gap_window(p)?,
        _ => return Err(CliError::Usage("give both --window-lo and --window-hi".into())),
    };
    let found = min_gap(p, window)?;
    let predicted = gap_first_order(p.n_sites(), p.b_perp());
    let mut t = cfg.table("gap", &["b_at_min", "gap", "first_order", "rel_diff"]);
    t.meta("window_lo", window.0).meta("window_hi", window.1);
    t.push(vec![
        found.b_at_min.into(),
        found.gap.into(),
        predicted.into(),
        ((found.gap - predicted) / predicted).into(),
    ]);
    Ok(t.into())
}

pub fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let f = &cfg.file;
    let n = p.n_sites();
    let scale = p.j_xy().abs();
    let b_start = f.pick(args.b_start, "b-start")?.unwrap_or(3.0 * scale);
    let b_end = f.pick(args.b_end, "b-end")?.unwrap_or(scale);
    let lz_target = f.pick(args.lz_target, "lz-target")?.unwrap_or(1e-3);
    let span = (b_end - b_start).abs();
    let duration = match f.pick(args.time, "time")? {
        Some(t) => t,
        None => ramp_time_for(n, p.b_perp(), span, lz_target)?,
    };
    let dt = f.pick(args.dt, "dt")?.unwrap_or(0.05);
    let record_every = f.pick(args.record_every, "record-every")?.unwrap_or(100);
    let series = f.switch(args.series, "series")?;

    let mut warnings = Vec::new();
    let bare = p.with_b_perp(0.0)?;
    if let Ok(r) = find_crossing(&bare, 1, default_bracket(&bare)) {
        if b_end < r.b_cross && b_end < b_start {
            warnings.push(format!(
                "b-end = {b_end} lies below the m = 1 -> 2 crossing at B = {:.6}; the ramp leaves the W window",
                r.b_cross
            ));
        }
    }

    let ramp = linear_ramp(b_start, b_end, duration)?;
    let rate = span / duration;
    let lz = landau_zener_estimate(n, p.b_perp(), rate)?;
    let traj = evolve(p, &ramp, dt, &StateVector::all_up(n)?, record_every)?;

    let columns: &[&str] = if series {
        &["t", "b", "w_fidelity"]
    } else {
        &["duration", "steps", "dt", "ramp_rate", "lz_estimate", "final_w_fidelity", "max_norm_drift"]
    };
    let mut t = cfg.table("sweep", columns);
    t.meta("b_start", b_start)
        .meta("b_end", b_end)
        .meta("duration", duration)
        .meta("dt_requested", dt)
        .meta("record_every", record_every)
        .meta("initial_state", "all-up")
        .meta("lz_criterion", "two-level estimate exp(-pi N b_perp^2 / rate); model construction, not a closed-form claim");
    if series {
        t.meta("final_w_fidelity", traj.final_w_fidelity())
            .meta("max_norm_drift", traj.max_norm_drift)
            .meta("lz_estimate", lz);
        for ((time, b), fid) in traj.times.iter().zip(&traj.fields).zip(&traj.w_fidelity) {
            t.push(vec![(*time).into(), (*b).into(), (*fid).into()]);
        }
    } else {
        t.push(vec![
            duration.into(),
            traj.steps.into(),
            traj.dt.into(),
            rate.into(),
            lz.into(),
            traj.final_w_fidelity().into(),
            traj.max_norm_drift.into(),
        ]);
    }
    Ok(Report { table: t, warnings, failure: None })
}

pub fn cmd_thermal(cfg: &RunConfig, args: &ThermalArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let f = &cfg.file;
    let n = p.n_sites();
    let beta = match (f.pick(args.beta, "beta")?, f.pick(args.kt, "kt")?) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --beta or --kt, not both".into())),
        (Some(beta), None) => beta,
        (None, Some(kt)) if kt > 0.0 => 1.0 / kt,
        (None, Some(kt)) => return Err(CliError::Usage(format!("kt must be positive, got {kt}"))),
        (None, None) => return Err(CliError::Usage("thermal needs --beta or --kt".into())),
    };
    let fields = f.pick_list(args.b_values.clone(), "b-values")?.unwrap_or_else(|| vec![p.b_field()]);
    let two_level = n == 3 && p.conserves_magnetization();

    let rows = fields
        .par_iter()
        .map(|&b| -> CliResult<Vec<Cell>> {
            let pb = p.with_b_field(b)?;
            let gibbs = gibbs_state(&pb, beta)?;
            let overlap = w_overlap(&gibbs.rho, n)?;
            let witness = gme_witness_w(&gibbs.rho, n)?;
            let (pw, model_overlap, distance) = if two_level {
                let model = two_level_model(pb.delta(), b, beta)?;
                (
                    Some(model.p),
                    Some(w_overlap(&model.rho, 3)?),
                    Some(gibbs.rho.trace_distance(&model.rho)?),
                )
            } else {
                (None, None, None)
            };
            Ok(vec![
                b.into(),
                overlap.into(),
                witness.into(),
                Cell::opt(pw),
                Cell::opt(model_overlap),
                Cell::opt(distance),
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut t = cfg.table(
        "thermal",
        &["b", "w_overlap", "witness", "p", "model_w_overlap", "trace_distance"],
    );
    t.meta("beta", beta);
    if !two_level {
        t.meta("two_level_model", "n/a (defined for n = 3, b-perp = 0)");
    }
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t.into())
}

pub fn cmd_entangle(cfg: &RunConfig, args: &EntangleArgs) -> CliResult<Report> {
    let p = &cfg.params;
    let f = &cfg.file;
    let n = p.n_sites();
    match f.pick(args.table, "table")?.unwrap_or(EntangleTable::Pairs) {
        EntangleTable::Pairs => {
            let choice = f.pick(args.state, "state")?.unwrap_or(StateChoice::W);
            let (psi, name) = match choice {
                StateChoice::W => (w_state(n)?, "w"),
                StateChoice::Ground => (ground_state(p)?.state, "ground"),
            };
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let values = pairs
                .par_iter()
                .map(|&(i, j)| pair_concurrence(&psi, i, j))
                .collect::<wring::Result<Vec<_>>>()?;
            let mut t = cfg.table("entangle", &["i", "j", "concurrence", "reference"]);
            t.meta("table", "pairs").meta("state", name);
            let reference = (choice == StateChoice::W).then(|| 2.0 / n as f64);
            for ((i, j), c) in pairs.into_iter().zip(values) {
                t.push(vec![i.into(), j.into(), c.into(), Cell::opt(reference)]);
            }
            Ok(t.into())
        }
        EntangleTable::Biseparability => {
            let alphas = f
                .pick_list(args.alphas.clone(), "alphas")?
                .unwrap_or_else(|| (1..=20).map(|k| k as f64 * 0.05).collect());
            let rows = biseparability_scan(n, &alphas)?;
            let mut t = cfg.table(
                "entangle",
                &["alpha", "min_second_schmidt", "argmin_part", "argmin_phase", "determinant_bound", "max_bound_violation"],
            );
            t.meta("table", "biseparability").meta("phases", "0 pi/2 pi/4");
            for r in rows {
                let part: Vec<String> = r.argmin_part.iter().map(usize::to_string).collect();
                t.push(vec![
                    r.alpha.into(),
                    r.min_second_schmidt.into(),
                    part.join(" ").into(),
                    r.argmin_phase.into(),
                    r.determinant_bound.into(),
                    r.max_bound_violation.into(),
                ]);
            }
            Ok(t.into())
        }
    }
}
