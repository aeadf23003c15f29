use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;

use stp_core::sim::{CycleRecord, Plan, ProfileSnapshot, RunOutcome};

/// Write the full run outputs: deterministic cycles.csv and profiles.csv,
/// wall-clock timings.csv, and report.json.
pub fn write_run(dir: &Path, outcome: &RunOutcome) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let cycles = dir.join("cycles.csv");
    {
        let mut f = create(&cycles)?;
        writeln!(f, "{}", CycleRecord::CSV_HEADER)?;
        for r in &outcome.records {
            writeln!(f, "{}", r.csv_row())?;
        }
    }
    written.push(cycles);

    let profiles = dir.join("profiles.csv");
    {
        let mut f = create(&profiles)?;
        writeln!(f, "{}", ProfileSnapshot::CSV_HEADER)?;
        for snap in &outcome.snapshots {
            for row in snap.csv_rows() {
                writeln!(f, "{row}")?;
            }
        }
    }
    written.push(profiles);

    // Wall-clock times are inherently not reproducible across runs; they live
    // in their own file so the other CSVs replay byte identically.
    let timings = dir.join("timings.csv");
    {
        let mut f = create(&timings)?;
        writeln!(f, "cycle,preproc_ms,lateral_ms,longitudinal_ms,total_ms")?;
        for (i, t) in outcome.timings.iter().enumerate() {
            writeln!(
                f,
                "{},{:.4},{:.4},{:.4},{:.4}",
                i, t.preprocessing_ms, t.lateral_ms, t.longitudinal_ms, t.total_ms
            )?;
        }
    }
    written.push(timings);

    let report = dir.join("report.json");
    {
        let v = &outcome.verdict;
        let stats = &outcome.timing_stats;
        let row = |r: &stp_core::sim::StatsRow| {
            json!({ "mean_ms": r.mean, "stddev_ms": r.stddev, "max_ms": r.max })
        };
        let doc = json!({
            "verdict": {
                "collision": v.collision.as_ref().map(|c| json!({
                    "time": c.time, "actor": c.actor, "distance": c.distance,
                })),
                "constraints_satisfied": v.constraints_satisfied(),
                "spatiotemporal": v.arrivals.iter().map(|a| json!({
                    "kind": match a.kind {
                        stp_core::scenario::StKindConfig::Min => "min",
                        stp_core::scenario::StKindConfig::Max => "max",
                    },
                    "s": a.s,
                    "bound": a.bound,
                    "arrival": a.arrival,
                    "satisfied": a.satisfied,
                })).collect::<Vec<_>>(),
                "stop_compliance": v.stop_compliance,
                "accel_cmd_min": v.accel_cmd_min,
                "accel_cmd_max": v.accel_cmd_max,
                "v_max": v.v_max,
                "plan_failures": v.plan_failures,
                "mean_longitudinal_iterations": v.mean_longitudinal_iterations,
                "completed_time": v.completed_time,
            },
            "runtime": {
                "lateral": row(&stats.lateral),
                "longitudinal": row(&stats.longitudinal),
                "total": row(&stats.total),
            },
        });
        let mut f = create(&report)?;
        serde_json::to_writer_pretty(&mut f, &doc)?;
        writeln!(f)?;
    }
    written.push(report);

    Ok(written)
}

/// Write one plan snapshot: profile.csv with the velocity columns and
/// path.csv with the smoothed geometry.
pub fn write_profile(dir: &Path, plan: &Plan) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let profile = dir.join("profile.csv");
    {
        let mut f = create(&profile)?;
        writeln!(f, "s,v_lim,v_ref,v_star,a_star,t_star")?;
        for k in 0..plan.velocity.grid.len {
            writeln!(
                f,
                "{:.3},{:.6},{:.6},{:.6},{:.6},{:.6}",
                plan.velocity.grid.s(k),
                plan.limits.values[k],
                plan.reference.values[k],
                plan.velocity.v[k],
                plan.velocity.a[k],
                plan.velocity.t[k],
            )?;
        }
    }
    written.push(profile);

    let path = dir.join("path.csv");
    {
        let mut f = create(&path)?;
        writeln!(f, "s,x_r,y_r,phi_r,kappa")?;
        for k in 0..plan.path.grid.len {
            writeln!(
                f,
                "{:.3},{:.6},{:.6},{:.6},{:.6}",
                plan.path.grid.s(k),
                plan.path.xs[k],
                plan.path.ys[k],
                plan.path.headings[k],
                plan.path.curvatures[k],
            )?;
        }
    }
    written.push(path);

    Ok(written)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    Ok(std::io::BufWriter::new(f))
}
