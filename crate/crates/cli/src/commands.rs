use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use sacs_core::propagator::{final_populations, fmt12, propagate, FinalPopulations, TimeGrid, Trajectory};
use sacs_core::protocols::config::{AxisSection, LoadedConfig, Quantity, UnitContext};
use sacs_core::protocols::{analyze_final, Protocol, SuperpositionReport};
use sacs_core::pulses::{validate_table, MercuryData, StarkContext, TwoPhotonContext};
use sacs_core::sweeps::{
    contour_sweep, detuning_scan, eigen_surfaces, gap_surface, level_line, scenario_path, Axis,
    ParameterPath, SweepGrid,
};

use crate::manifest::{sha256_hex, Artifacts};
use crate::{Common, Failure, Format, SweepKind};

fn load(path: &Path) -> Result<(LoadedConfig, String), Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Config(format!("{}: not UTF-8", path.display())))?;
    let cfg = LoadedConfig::parse(&text, path.parent())?;
    Ok((cfg, sha256_hex(&bytes)))
}

fn finish(
    art: &Artifacts,
    c: &Common,
    command: &str,
    config_hash: String,
    started: Instant,
) -> Result<(), Failure> {
    if c.check {
        let problems = art.check(&c.out)?;
        if !problems.is_empty() {
            return Err(Failure::Check(problems.join("; ")));
        }
        println!("check: all outputs match {}", c.out.join(crate::manifest::MANIFEST).display());
    } else {
        let m = art.write(
            &c.out,
            command.to_string(),
            Some(config_hash),
            started.elapsed().as_secs_f64(),
        )?;
        for o in &m.outputs {
            println!("wrote {}", c.out.join(&o.path).display());
        }
    }
    for w in &art.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

#[derive(Serialize)]
struct GridInfo {
    start: f64,
    end: f64,
    dt: f64,
    steps: usize,
}

impl From<&TimeGrid> for GridInfo {
    fn from(g: &TimeGrid) -> Self {
        GridInfo {
            start: g.start,
            end: g.end,
            dt: g.step_size(),
            steps: g.steps(),
        }
    }
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    protocol: Protocol,
    tool_version: &'static str,
    config_hash: &'a str,
    grid: GridInfo,
    final_populations: FinalPopulations,
    superposition: &'a SuperpositionReport,
    derived: &'a BTreeMap<String, f64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct TrajectoryJson {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl From<&Trajectory> for TrajectoryJson {
    fn from(t: &Trajectory) -> Self {
        let rows = (0..t.len())
            .map(|i| {
                let c = &t.states[i].0;
                let mut r = vec![t.times[i], c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im];
                r.extend(t.populations[i]);
                r.extend(t.frames[i].values);
                r.extend(t.overlaps[i]);
                r
            })
            .collect();
        TrajectoryJson {
            columns: vec![
                "t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "p1", "p2", "p3",
                "lambda_minus", "lambda_zero", "lambda_plus", "overlap_minus", "overlap_zero",
                "overlap_plus",
            ],
            rows,
        }
    }
}

pub fn simulate(c: &Common, strict: bool, command: &str) -> Result<(), Failure> {
    let started = Instant::now();
    let (cfg, hash) = load(&c.config)?;
    let grid = match c.dt {
        Some(dt) => cfg.scenario.grid(Some(dt))?,
        None => cfg.grid,
    };
    let traj = propagate(&cfg.scenario, &grid)?;
    let report = analyze_final(&traj)?;
    let finals = final_populations(&traj)?;

    let mut art = Artifacts::default();
    let warnings: Vec<String> = cfg
        .scenario
        .warnings
        .iter()
        .chain(&report.warnings)
        .map(ToString::to_string)
        .collect();
    for w in &warnings {
        art.warn(w);
    }
    match c.format {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            art.add("trajectory.csv", buf);
        }
        Format::Json => art.add_json("trajectory.json", &TrajectoryJson::from(&traj)),
    }
    art.add_json(
        "report.json",
        &SimulationReport {
            protocol: cfg.scenario.protocol,
            tool_version: sacs_core::TOOL_VERSION,
            config_hash: &hash,
            grid: GridInfo::from(&grid),
            final_populations: finals,
            superposition: &report,
            derived: &cfg.derived.values,
            warnings: warnings.clone(),
        },
    );
    finish(&art, c, command, hash, started)?;

    println!("protocol      {}", cfg.scenario.protocol);
    println!("steps         {} (dt = {:.3e} ns)", grid.steps(), grid.step_size());
    println!(
        "populations   P1 = {:.4}  P2 = {:.4}  P3 = {:.4}",
        finals.p1, finals.p2, finals.p3
    );
    match report.relative_phase {
        Some(p) => println!("phase         arg(C3/C1) = {p:.4} rad"),
        None => println!("phase         undefined"),
    }
    println!("norm drift    {:.3e}", report.norm_drift);
    println!("integrated P2 {:.4e} ns", report.integrated_p2);
    println!("wall time     {:.3} s", started.elapsed().as_secs_f64());

    if strict && report.non_adiabatic {
        return Err(Failure::Strict(format!(
            "non-adiabatic outcome: residual P2 = {:.4}",
            report.residual
        )));
    }
    Ok(())
}

type Convert = fn(&Quantity, Option<&UnitContext>) -> sacs_core::Result<f64>;

fn axis(
    spec: Option<&AxisSection>,
    name: &str,
    unit: &str,
    default: (f64, f64, usize),
    convert: Convert,
    ctx: &UnitContext,
    count: Option<usize>,
) -> Result<Axis, Failure> {
    let (lo, hi, n) = match spec {
        Some(s) => (convert(&s.min, Some(ctx))?, convert(&s.max, Some(ctx))?, s.count),
        None => default,
    };
    Ok(Axis::linspace(name, unit, lo, hi, count.unwrap_or(n))?)
}

#[derive(Serialize)]
struct LevelLineMeta {
    level: f64,
    anchor: (f64, f64),
    delta2: f64,
    omega_at_zero_stark: Option<f64>,
    omega_at_zero_stark_delta2: Option<f64>,
    points: usize,
    scenario_score: Option<f64>,
    scenario_score_time: Option<f64>,
    scenario_reference_distance: Option<f64>,
    tool_version: &'static str,
}

fn grid_output(art: &mut Artifacts, name: &str, grid: &SweepGrid, format: Format) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            grid.write_csv(&mut buf)?;
            art.add(&format!("{name}.csv"), buf);
        }
        Format::Json => art.add_json(&format!("{name}.grid.json"), grid),
    }
    art.add_json(&format!("{name}.json"), &grid.sidecar());
    Ok(())
}

fn path_output(art: &mut Artifacts, name: &str, path: &ParameterPath, format: Format) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut s = String::from("omega,stark,gap\n");
            for p in &path.points {
                s.push_str(&format!("{},{},{}\n", fmt12(p.omega), fmt12(p.stark), fmt12(p.gap)));
            }
            art.add(&format!("{name}.csv"), s.into_bytes());
        }
        Format::Json => art.add_json(&format!("{name}.path.json"), path),
    }
    Ok(())
}

pub fn sweep(kind: SweepKind, c: &Common, count: Option<usize>, command: &str) -> Result<(), Failure> {
    let started = Instant::now();
    let (cfg, hash) = load(&c.config)?;
    let sec = cfg.file.sweep.clone().unwrap_or_default();
    let ctx = cfg.context;
    let t = ctx.width;
    let d2 = ctx.delta2;
    let freq: Convert = Quantity::frequency;
    let time: Convert = Quantity::time;
    let mut art = Artifacts::default();
    for w in &cfg.scenario.warnings {
        art.warn(w);
    }
    let name = kind.name();

    match kind {
        SweepKind::Detuning => {
            let x = axis(sec.x.as_ref(), "two_photon_detuning", "rad/ns", (-40.0 / t, 40.0 / t, 41), freq, &ctx, count)?;
            let g = detuning_scan(&cfg.scenario, &x, c.dt)?;
            grid_output(&mut art, name, &g, c.format)?;
            let p1 = g.field("p1")?;
            let p3 = g.field("p3")?;
            println!("detuning scan: {} points", x.len());
            println!("  left  edge  P1 = {:.4}  P3 = {:.4}", p1[0], p3[0]);
            if let Some(k) = x.index_of(0.0) {
                println!("  centre      P1 = {:.4}  P3 = {:.4}", p1[k], p3[k]);
            }
            println!("  right edge  P1 = {:.4}  P3 = {:.4}", p1[x.len() - 1], p3[x.len() - 1]);
        }
        SweepKind::Contour => {
            let base = cfg.pair.ok_or_else(|| {
                Failure::Config("contour sweeps need gaussian_pair = true".into())
            })?;
            let x = axis(sec.x.as_ref(), "stokes_peak", "rad/ns", (20.0 / t, 60.0 / t, 101), freq, &ctx, count)?;
            let y = axis(sec.y.as_ref(), "delay", "ns", (-3.0 * t, 3.0 * t, 101), time, &ctx, count)?;
            let g = contour_sweep(&base, &x, &y, c.dt)?;
            grid_output(&mut art, name, &g, c.format)?;
            println!("contour sweep: {} x {} cells", x.len(), y.len());
        }
        SweepKind::Surface | SweepKind::Gap | SweepKind::Levelline => {
            if d2 == 0.0 {
                return Err(Failure::Config("surface sweeps need a non-zero delta2".into()));
            }
            let x = axis(sec.x.as_ref(), "omega", "rad/ns", (0.0, 3.5 * d2, 101), freq, &ctx, count)?;
            let y = axis(sec.y.as_ref(), "stark", "rad/ns", (0.0, 2.0 * d2, 101), freq, &ctx, count)?;
            match kind {
                SweepKind::Surface => {
                    let g = eigen_surfaces(d2, &x, &y, false)?;
                    grid_output(&mut art, name, &g, c.format)?;
                    println!("eigenvalue surfaces: {} x {} cells", x.len(), y.len());
                }
                SweepKind::Gap => {
                    let g = gap_surface(d2, &x, &y)?;
                    grid_output(&mut art, name, &g, c.format)?;
                    println!("gap surface: {} x {} cells", x.len(), y.len());
                }
                _ => {
                    let level = match &sec.level {
                        Some(q) => q.frequency(Some(&ctx))?,
                        None => 1.5 * d2,
                    };
                    let anchor = match &sec.anchor {
                        Some(q) => q.frequency(Some(&ctx))?,
                        None => level,
                    };
                    let g = gap_surface(d2, &x, &y)?;
                    let line = level_line(&g, "gap", level, (0.0, anchor))?;
                    let end = line.omega_at_stark(0.0);
                    let score = match cfg.scenario.protocol {
                        Protocol::Sacs => Some(scenario_path(&cfg.scenario, Some(&line))?),
                        _ => None,
                    };
                    path_output(&mut art, name, &line, c.format)?;
                    art.add_json(
                        &format!("{name}.json"),
                        &LevelLineMeta {
                            level,
                            anchor: (0.0, anchor),
                            delta2: d2,
                            omega_at_zero_stark: end,
                            omega_at_zero_stark_delta2: end.map(|o| o / d2),
                            points: line.len(),
                            scenario_score: score.as_ref().map(|s| s.score),
                            scenario_score_time: score.as_ref().map(|s| s.score_time),
                            scenario_reference_distance: score.as_ref().and_then(|s| s.reference_distance),
                            tool_version: sacs_core::TOOL_VERSION,
                        },
                    );
                    println!("level line at gap = {level} rad/ns: {} points", line.len());
                    if let Some(o) = end {
                        println!("  reaches stark = 0 at omega = {o:.4} rad/ns ({:.4} delta2)", o / d2);
                    }
                    if let Some(s) = score {
                        println!("  scenario adiabaticity score = {:.4}", s.score);
                    }
                }
            }
        }
    }
    finish(&art, c, command, hash, started)
}

pub fn validate_data(path: Option<&Path>) -> Result<(), Failure> {
    let data = match path {
        None => MercuryData::shipped(),
        Some(p) => MercuryData::load(p).map_err(|e| Failure::Config(e.to_string()))?,
    };
    match data.checksum_ok {
        Some(true) => println!("checksum      ok"),
        Some(false) => println!("checksum      MISMATCH (rows differ from the recorded digest)"),
        None => println!("checksum      not recorded"),
    }
    let rows = validate_table(&data.records);
    println!(
        "{:<18} {:>10} {:>10} {:>9} {:>9}  status",
        "transition", "d_table", "d_from_A", "dev_d %", "dev_A %"
    );
    for r in &rows {
        println!(
            "{:<18} {:>10.3} {:>10.3} {:>9.2} {:>9.2}  {}",
            r.transition,
            r.dipole_table,
            r.dipole_from_a,
            100.0 * r.deviation,
            100.0 * r.deviation_a,
            if r.within_tolerance { "ok" } else { "FAIL" }
        );
    }
    println!("{} rows checked", rows.len());
    if let Ok(c) = StarkContext::mercury(&data, 1064.0).and_then(|s| s.coefficient()) {
        println!("Stark coefficient of 7^1S_0 at 1064 nm: {c:.2} s^-1/(W/cm^2)");
    }
    if let Ok(c) = TwoPhotonContext::mercury(&data, 313.0).and_then(|s| s.coefficient()) {
        println!("two-photon coefficient at 313 nm: {c:.3} s^-1/(W/cm^2)");
    }
    let bad: Vec<&str> = rows
        .iter()
        .filter(|r| !r.within_tolerance)
        .map(|r| r.transition.as_str())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Data(format!(
            "rows outside the 2% tolerance: {}",
            bad.join(", ")
        )))
    }
}
