//! Acceptance criteria, one line each. Runs under its own harness so the
//! PASS/FAIL lines are always printed; exits non-zero if any criterion fails.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use serde_json::Value;

use wring::dynamics::{evolve, landau_zener_estimate, linear_ramp};
use wring::entanglement::{
    biseparability_scan, gibbs_state, pair_concurrence, two_level_model, w_overlap, w_state,
};
use wring::hamiltonian::{build_full, build_sector, ModelParams};
use wring::hilbert::StateVector;
use wring::phases::{default_bracket, find_crossing, gap_first_order, min_gap, sector_min_lower_bound};
use wring::spectra::{
    eigensolve, projector_distance, projector_from_states, xx_min_energy_printed,
    xx_sector_spectrum_exact, xx_sector_spectrum_printed, xx_single_excitation, xxz3_closed_form,
    ClosedFormMode,
};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn grid5() -> Vec<(f64, f64, f64)> {
    let axis: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    let mut out = Vec::new();
    for &j in &axis {
        for &d in &axis {
            for &b in &axis {
                out.push((j, d, b));
            }
        }
    }
    out
}

fn count_near(spec: &[f64], e: f64, tol: f64) -> usize {
    spec.iter().filter(|x| (*x - e).abs() <= tol).count()
}

fn criterion_1() -> Check {
    let mut worst = 0.0f64;
    for (j, d, b) in grid5() {
        let spec = eigensolve(&build_full(&ModelParams::xxz(3, j, d, b).map_err(err)?).map_err(err)?, false)
            .map_err(err)?
            .eigenvalues;
        for e in [3.0 * j - 3.0 * b + 3.0 * d, 3.0 * j - b - d, 3.0 * j + b - d, 3.0 * j + 3.0 * b + 3.0 * d] {
            let d = spec.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-10, format!("max distance to ED over 125 points {worst:.2e}"))
}

fn run_cli(args: &[&str]) -> Result<(i32, String), String> {
    let mut full = vec!["wring"];
    full.extend_from_slice(args);
    let out = wring_cli::run(full);
    if out.code != 0 && out.code != 1 {
        return Err(format!("wring {} exited {}: {}", args.join(" "), out.code, out.stderr));
    }
    Ok((out.code, out.stdout))
}

fn verify_json() -> Result<(i32, Value), String> {
    let (code, text) = run_cli(&["verify", "--n-max", "10", "--format", "json"])?;
    Ok((code, serde_json::from_str(&text).map_err(err)?))
}

fn claim_row<'a>(report: &'a Value, id: &str) -> Result<&'a Value, String> {
    report["rows"]
        .as_array()
        .and_then(|rows| rows.iter().find(|r| r["claim"] == id))
        .ok_or_else(|| format!("claim {id} missing from verify output"))
}

fn criterion_2(report: &Value) -> Check {
    let mut corrected_ok = true;
    let mut printed_fails_trace = true;
    for (j, d, b) in grid5() {
        let p = ModelParams::xxz(3, j, d, b).map_err(err)?;
        let spec = eigensolve(&build_full(&p).map_err(err)?, false).map_err(err)?.eigenvalues;
        for e in [-3.0 * j - b - d, -3.0 * j + b - d] {
            corrected_ok &= count_near(&spec, e, 1e-10) >= 2;
        }
        let printed_sum: f64 = xxz3_closed_form(&p, ClosedFormMode::Printed).map_err(err)?.iter().map(|l| l.energy).sum();
        if j != 0.0 {
            printed_fails_trace &= printed_sum.abs() > 1e-10;
        }
    }
    let row = claim_row(report, "xxz3-degenerate-levels")?;
    let reported = row["verdict"] == "erratum" && row["observed"] == "erratum";
    ensure(
        corrected_ok && printed_fails_trace && reported,
        format!(
            "-3J-/+B-delta doubly degenerate: {corrected_ok}; printed levels break tr H = 0: {printed_fails_trace}; verify reports {} / {}",
            row["verdict"], row["observed"]
        ),
    )
}

fn criterion_3() -> Check {
    let p = ModelParams::xxz(3, -1.0, 1.0, 0.0).map_err(err)?;
    let r = find_crossing(&p, 0, default_bracket(&p)).map_err(err)?;
    ensure((r.b_cross - 2.0).abs() <= 1e-8, format!("b_cross = {:.12} vs 2 delta = 2", r.b_cross))
}

fn criterion_4() -> Check {
    let mut e_worst = 0.0f64;
    let mut p_worst = 0.0f64;
    for (j, b) in [(-1.0, 0.7), (0.6, -1.3)] {
        for n in 3..=12 {
            let params = ModelParams::xx(n, j, b).map_err(err)?;
            let modes = xx_single_excitation(&params).map_err(err)?;
            for m in &modes {
                let expected = 4.0 * j * (2.0 * std::f64::consts::PI * m.k as f64 / n as f64).cos() - (n as f64 - 2.0) * b;
                if (m.energy - expected).abs() > 1e-12 {
                    return Err(format!("mode energy formula off for N={n} k={}", m.k));
                }
            }
            let spec = eigensolve(&build_sector(&params, 1).map_err(err)?, true).map_err(err)?;
            let mut analytic: Vec<f64> = modes.iter().map(|m| m.energy).collect();
            analytic.sort_by(f64::total_cmp);
            for (a, e) in analytic.iter().zip(&spec.eigenvalues) {
                e_worst = e_worst.max((a - e).abs());
            }
            for range in spec.clusters(1e-8) {
                let e = spec.eigenvalues[range.start];
                let analytic_proj =
                    projector_from_states(modes.iter().filter(|m| (m.energy - e).abs() <= 1e-8).map(|m| &m.state))
                        .ok_or("no analytic mode at an ED level")?;
                let ed_proj = spec.projector(range).expect("vectors requested");
                p_worst = p_worst.max(projector_distance(&analytic_proj, &ed_proj));
            }
        }
    }
    ensure(
        e_worst <= 1e-9 && p_worst <= 1e-8,
        format!("max |E_k - ED| {e_worst:.2e}, max projector distance {p_worst:.2e}"),
    )
}

fn criterion_5() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for j in [-1.0, -0.7] {
        let values: Vec<f64> = (3..=11)
            .map(|n| {
                let p = ModelParams::xx(n, j, 0.0)?;
                Ok(find_crossing(&p, 0, default_bracket(&p))?.b_cross)
            })
            .collect::<wring::Result<_>>()
            .map_err(err)?;
        let worst = values.iter().map(|b| (b + 2.0 * j).abs()).fold(0.0, f64::max);
        let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= worst <= 1e-8 && spread <= 1e-8;
        detail.push(format!("J={j}: max |b - (-2J)| {worst:.2e}, spread {spread:.2e}"));
    }
    ensure(ok, detail.join("; "))
}

fn criterion_6() -> Check {
    let mut exact_worst = 0.0f64;
    let mut odd_worst = 0.0f64;
    let mut even_deviates = true;
    for n in 3..=10 {
        let p = ModelParams::xx(n, -1.0, 0.4).map_err(err)?;
        for m in 0..=n {
            let ed = eigensolve(&build_sector(&p, m).map_err(err)?, false).map_err(err)?.eigenvalues;
            let ff = xx_sector_spectrum_exact(&p, m).map_err(err)?;
            if ed.len() != ff.len() {
                return Err(format!("multiset sizes differ at N={n} m={m}"));
            }
            for (a, e) in ff.iter().zip(&ed) {
                exact_worst = exact_worst.max((a - e).abs());
            }
            if m == 0 || m == n {
                continue;
            }
            let printed_min = xx_min_energy_printed(&p, m).map_err(err)?;
            if m % 2 == 1 {
                odd_worst = odd_worst.max((printed_min - ed[0]).abs());
                let printed_spec = xx_sector_spectrum_printed(&p, m).map_err(err)?;
                for (a, e) in printed_spec.iter().zip(&ff) {
                    odd_worst = odd_worst.max((a - e).abs());
                }
            }
        }
    }
    for (n, m) in [(4, 2), (6, 2), (8, 4)] {
        let p = ModelParams::xx(n, -1.0, 0.0).map_err(err)?;
        let ed = eigensolve(&build_sector(&p, m).map_err(err)?, false).map_err(err)?.ground_energy();
        even_deviates &= (xx_min_energy_printed(&p, m).map_err(err)? - ed).abs() > 1e-6;
    }
    let p = ModelParams::xx(4, -1.0, 0.0).map_err(err)?;
    let printed = xx_min_energy_printed(&p, 2).map_err(err)?;
    let ed = eigensolve(&build_sector(&p, 2).map_err(err)?, false).map_err(err)?.ground_energy();
    let example = (printed + 4.0).abs() <= 1e-9 && (ed + 4.0 * SQRT_2).abs() <= 1e-9;
    ensure(
        exact_worst <= 1e-9 && odd_worst <= 1e-12 && even_deviates && example,
        format!(
            "free fermions vs ED {exact_worst:.2e}; odd-m printed form {odd_worst:.2e}; even m deviates: {even_deviates}; N=4 m=2: {printed:.9} vs {ed:.9}"
        ),
    )
}

fn criterion_7() -> Check {
    let j: f64 = -1.0;
    let mut slack = f64::INFINITY;
    for n in 3..=10 {
        for k in 0..=16 {
            let b = 4.0 * j.abs() * k as f64 / 16.0;
            let p = ModelParams::xx(n, j, b).map_err(err)?;
            for m in 1..=n {
                let bound = sector_min_lower_bound(&p, m).map_err(err)?.bound;
                let min = eigensolve(&build_sector(&p, m).map_err(err)?, false).map_err(err)?.ground_energy();
                slack = slack.min(min - bound);
            }
        }
    }
    ensure(slack >= -1e-9, format!("min over N, m, B of (E_min - bound) = {slack:.2e}"))
}

fn gap_of(n: usize, b_perp: f64) -> Result<f64, String> {
    let p = ModelParams::xx(n, -1.0, 0.0).map_err(err)?.with_b_perp(b_perp).map_err(err)?;
    let half = 0.5f64.max(20.0 * gap_first_order(n, b_perp));
    Ok(min_gap(&p, (2.0 - half, 2.0 + half)).map_err(err)?.gap)
}

fn criterion_8() -> Check {
    let gap = gap_of(8, 0.01)?;
    let predicted = 2.0 * 0.01 * 8f64.sqrt();
    let rel = (gap - predicted).abs() / predicted;
    let ratio = gap_of(4, 0.01)? / gap_of(9, 0.01)?;
    let ratio_rel = (ratio - 2.0 / 3.0).abs() / (2.0 / 3.0);
    ensure(
        rel <= 0.05 && ratio_rel <= 0.05,
        format!("gap {gap:.7} vs {predicted:.7} (rel {rel:.2e}); N=4/N=9 ratio {ratio:.6} (rel {ratio_rel:.2e})"),
    )
}

fn criterion_9() -> Check {
    let (n, b_perp, b0, b1, t_slow) = (6, 0.05, 3.0, 1.0, 400.0);
    let params = ModelParams::xx(n, -1.0, 0.0).map_err(err)?.with_b_perp(b_perp).map_err(err)?;
    let lz = landau_zener_estimate(n, b_perp, (b0 - b1) / t_slow).map_err(err)?;
    if lz > 1e-3 {
        return Err(format!("T = {t_slow} gives LZ estimate {lz:.2e} > 1e-3"));
    }
    let psi0 = StateVector::all_up(n).map_err(err)?;
    let run = |t: f64, end: f64| -> Result<(f64, f64), String> {
        let ramp = linear_ramp(b0, end, t).map_err(err)?;
        let traj = evolve(&params, &ramp, 0.02, &psi0, usize::MAX).map_err(err)?;
        Ok((traj.final_w_fidelity(), traj.max_norm_drift))
    };
    let (slow, drift_slow) = run(t_slow, b1)?;
    let (fast, drift_fast) = run(t_slow / 100.0, b1)?;
    let (companion, _) = run(t_slow, 1.75)?;
    ensure(
        slow >= 0.99 && fast <= 0.1 && drift_slow <= 1e-8 && drift_fast <= 1e-8,
        format!(
            "T={t_slow} (LZ {lz:.1e}): W-fidelity {slow:.4}; T={}: {fast:.4}; drift {:.1e}/{:.1e}; \
             ramp 3->1.75 at T={t_slow}: {companion:.4} (B=1 is below the m=1->2 crossing for N=6)",
            t_slow / 100.0,
            drift_slow,
            drift_fast
        ),
    )
}

fn criterion_10() -> Check {
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let w = w_state(n).map_err(err)?;
        for i in 0..n {
            for j in i + 1..n {
                let c = pair_concurrence(&w, i, j).map_err(err)?;
                worst = worst.max((c - 2.0 / n as f64).abs());
            }
        }
    }
    ensure(worst <= 1e-9, format!("max |C - 2/N| over all pairs {worst:.2e}"))
}

fn criterion_11() -> Check {
    let (j, d, beta) = (-1.0, 1.0, 5.0);
    let mut worst_distance = 0.0f64;
    let mut worst_overlap = 0.0f64;
    for b in [1.8, 2.0, 2.2] {
        let gibbs = gibbs_state(&ModelParams::xxz(3, j, d, b).map_err(err)?, beta).map_err(err)?;
        let model = two_level_model(d, b, beta).map_err(err)?;
        worst_distance = worst_distance.max(gibbs.rho.trace_distance(&model.rho).map_err(err)?);
        worst_overlap = worst_overlap.max((w_overlap(&model.rho, 3).map_err(err)? - model.p).abs());
    }
    let half = two_level_model(d, 2.0 * d, beta).map_err(err)?.p;
    ensure(
        worst_distance <= 1e-6 && worst_overlap <= 1e-15 && half == 0.5,
        format!("max trace distance {worst_distance:.2e}; |<W|rho|W> - p| {worst_overlap:.1e}; p(B=2 delta) = {half}"),
    )
}

fn criterion_12() -> Check {
    let alphas: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
    let mut violation = f64::NEG_INFINITY;
    let mut smallest = f64::INFINITY;
    for n in 3..=8 {
        for row in biseparability_scan(n, &alphas).map_err(err)? {
            violation = violation.max(row.max_bound_violation);
            smallest = smallest.min(row.min_second_schmidt);
        }
    }
    ensure(
        violation <= 1e-9 && smallest > 1e-4,
        format!("max (bound - s2) {violation:.2e}; smallest s2 {smallest:.3e}"),
    )
}

fn criterion_13(first: &Value, second: &Value) -> Check {
    let a = claim_row(first, "cascade-bcm")?;
    let b = claim_row(second, "cascade-bcm")?;
    let details = a["details"].as_str().unwrap_or_default();
    let both_m = details.contains("m=1:") && details.contains("m=2:");
    let numeric = (a["oracle_value"].as_f64(), b["oracle_value"].as_f64());
    let (Some(x), Some(y)) = numeric else {
        return Err("cascade numeric value missing".into());
    };
    let same_details = a["details"] == b["details"];
    ensure(
        a["verdict"] == "asymptotic" && both_m && (x - y).abs() <= 1e-10 && same_details,
        format!("verdict {}; run-to-run |diff| {:.1e}; {details}", a["verdict"], (x - y).abs()),
    )
}

fn criterion_14() -> Check {
    let cases: [&[&str]; 3] = [
        &["scan", "--model", "xx", "--n", "8", "--j", "-1", "--b-perp", "0.01", "--b-from", "0", "--b-to", "4", "--steps", "41", "--levels", "4"],
        &["scan", "--model", "xxz", "--n", "7", "--j", "-1", "--delta", "0.5", "--b-from", "-2", "--b-to", "5", "--steps", "57"],
        &["scan", "--model", "xx", "--n", "6", "--j", "-1", "--b-perp", "0.05", "--steps", "33", "--format", "json"],
    ];
    let mut outputs = 0;
    for case in cases {
        let mut reference: Option<String> = None;
        for threads in ["1", "8", "1", "8"] {
            let mut args = case.to_vec();
            args.extend_from_slice(&["--threads", threads]);
            let (code, text) = run_cli(&args)?;
            if code != 0 {
                return Err(format!("scan exited {code}"));
            }
            match &reference {
                None => reference = Some(text),
                Some(r) if *r != text => return Err(format!("output differs with --threads {threads}")),
                Some(_) => {}
            }
            outputs += 1;
        }
    }
    Ok(format!("{outputs} runs over 3 configurations byte-identical across --threads 1/8"))
}

fn main() {
    let started = Instant::now();
    let report = |n: usize, result: Check, elapsed: f64| -> bool {
        match result {
            Ok(d) => {
                println!("criterion {n:>2}: PASS  {d}  [{elapsed:.1}s]");
                true
            }
            Err(d) => {
                println!("criterion {n:>2}: FAIL  {d}  [{elapsed:.1}s]");
                false
            }
        }
    };
    let timed = |f: &dyn Fn() -> Check| {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed().as_secs_f64())
    };

    let verify_started = Instant::now();
    let verify = (|| -> Result<(Value, Value), String> {
        let (c1, first) = verify_json()?;
        let (c2, second) = verify_json()?;
        if c1 != 0 || c2 != 0 {
            return Err(format!("verify exited {c1}/{c2}"));
        }
        Ok((first, second))
    })();
    let verify_time = verify_started.elapsed().as_secs_f64();

    let mut results = Vec::new();
    let simple: [(usize, fn() -> Check); 11] = [
        (1, criterion_1),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    for (n, f) in simple {
        let (r, t) = timed(&f);
        results.push((n, r, t));
    }
    let (r2, t2) = timed(&|| verify.as_ref().map_err(Clone::clone).and_then(|(a, _)| criterion_2(a)));
    results.push((2, r2, t2));
    let (r13, t13) = timed(&|| verify.as_ref().map_err(Clone::clone).and_then(|(a, b)| criterion_13(a, b)));
    results.push((13, r13, t13 + verify_time));
    let (r14, t14) = timed(&criterion_14);
    results.push((14, r14, t14));
    results.sort_by_key(|r| r.0);

    let mut passed = 0;
    for (n, r, t) in results {
        passed += usize::from(report(n, r, t));
    }
    println!("acceptance: {passed}/14 criteria pass in {:.1}s", started.elapsed().as_secs_f64());
    if passed != 14 {
        std::process::exit(1);
    }
}
