//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use faer::{c64, Mat};
use magspec::analysis::{
    alpha0_pipeline, fit_holder, harper_family, log_spaced, sweep_defect, sweep_hausdorff,
    theorem2_compare, HarperFamily,
};
use magspec::certificate::{build_partition, default_z_values, DefectEngine};
use magspec::cli::{sample_z_values, RunConfig};
use magspec::models::{MagneticField, ModelSpec};
use magspec::operators::{Grid, KernelOperator};
use magspec::spectral::{eigvalsh, hausdorff, op_norm, spectral_distance, Spectrum};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> RunConfig {
    RunConfig::load(&configs().join(name)).expect("reference config")
}

fn family_of(cfg: &RunConfig) -> HarperFamily {
    harper_family(
        &cfg.model_spec().unwrap(),
        &cfg.field.base(),
        &cfg.field.variation(),
    )
    .unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String, ok: bool) -> Outcome {
    let t = start.elapsed();
    check(
        ok && t < limit,
        format!("{detail}; {:.1}s of {}s", t.as_secs_f64(), limit.as_secs()),
    )
}

fn hausdorff_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let a = random_points(&mut r, 200);
        let b = random_points(&mut r, 200);
        let fast = hausdorff(
            &Spectrum::new(a.clone()).unwrap(),
            &Spectrum::new(b.clone()).unwrap(),
        )
        .unwrap();
        if fast != brute_hausdorff(&a, &b) {
            mismatches += 1;
        }
    }
    within(
        Duration::from_secs(5),
        start,
        format!("{mismatches} mismatches in 1000 sets"),
        mismatches == 0,
    )
}

fn eigensolver_contract() -> Outcome {
    let mut worst_closed = 0.0f64;
    for n in [4usize, 16, 64] {
        let m = Mat::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => c64::new(2.0, 0.0),
            1 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, 0.0),
        });
        let s = eigvalsh(&KernelOperator::from_matrix(chain(n), m, true).unwrap()).unwrap();
        for (k, v) in s.values().iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            worst_closed = worst_closed.max((v - exact).abs());
        }
    }
    let mut r = rng(2);
    let mut worst_unitary = 0.0f64;
    for n in [4usize, 16, 64, 128] {
        let g = chain(n);
        let h = random_hermitian(&mut r, &g);
        let u: Vec<c64> = (0..n)
            .map(|_| c64::cis(r.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let m = Mat::from_fn(n, n, |i, j| u[i] * h.matrix()[(i, j)] * u[j].conj());
        let hu = KernelOperator::from_matrix(g, m, true).unwrap();
        let (a, b) = (eigvalsh(&h).unwrap(), eigvalsh(&hu).unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            worst_unitary = worst_unitary.max((x - y).abs());
        }
    }
    check(
        worst_closed <= 1e-10 && worst_unitary <= 1e-10,
        format!("closed form {worst_closed:.1e}, phase conjugation {worst_unitary:.1e}"),
    )
}

fn weyl_suite() -> Outcome {
    let mut r = rng(3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = r.gen_range(1..=128);
        let g = chain(n);
        let a = random_hermitian(&mut r, &g);
        let scale = 10f64.powf(r.gen_range(-8.0..0.5));
        let b = a
            .add(&random_hermitian(&mut r, &g).scale(c64::new(scale, 0.0)))
            .unwrap();
        let d = hausdorff(&eigvalsh(&a).unwrap(), &eigvalsh(&b).unwrap()).unwrap();
        worst = worst.max(d - op_norm(&a.sub(&b).unwrap()).unwrap());
    }
    check(
        worst <= 1e-9,
        format!("max d_H − ‖A − B‖ = {worst:.2e} over 100 pairs"),
    )
}

fn partition_suite() -> Outcome {
    let mut identity = 0.0f64;
    let mut worst_count = 0.0f64;
    let mut worst_radius = f64::NEG_INFINITY;
    let mut cases = 0;
    for grid in [
        Arc::new(Grid::chain(800).unwrap()),
        Arc::new(Grid::new(1, 100.0, 0.25).unwrap()),
        Arc::new(Grid::square(24).unwrap()),
        Arc::new(Grid::square(32).unwrap()),
    ] {
        let slack = grid.spacing() * (grid.dim() as f64).sqrt();
        let cap = 5f64.powi(grid.dim() as i32);
        for b in log_spaced(grid.min_partition_b(), 1.0, 15).unwrap() {
            let p = build_partition(&grid, b).unwrap();
            identity = identity.max(p.identity_defect());
            worst_count = worst_count.max(p.multiplicity() as f64 / cap);
            worst_radius = worst_radius.max(p.support_radius() - 2.0 / b.sqrt() - slack);
            cases += 1;
        }
    }
    check(
        identity <= 1e-12 && worst_count <= 1.0 && worst_radius <= 0.0,
        format!(
            "{cases} partitions: |Σĝ² − 1| ≤ {identity:.1e}, count/5^d ≤ {worst_count:.2}, radius excess {worst_radius:.2}"
        ),
    )
}

fn defect_consistency() -> Outcome {
    let start = Instant::now();
    let one_d = ModelSpec::harper(Grid::chain(400).unwrap(), -1.0, 1.0);
    let two_d = ModelSpec::harper(Grid::square(22).unwrap(), -1.0, 1.0);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for spec in [one_d, two_d] {
        let f = harper_family(&spec, &MagneticField::zero(), &MagneticField::uniform(1.0)).unwrap();
        let engine = DefectEngine::new(&f.h, &f.phi, f.spec.epsilon()).unwrap();
        let b_grid = log_spaced(f.h.grid().min_partition_b(), 1.0, 6).unwrap();
        let partitions: Vec<_> = b_grid
            .iter()
            .map(|&b| build_partition(f.h.grid(), b).unwrap())
            .collect();
        for z in default_z_values(engine.spectrum()) {
            let rp = engine.at(z).unwrap();
            for (&b, p) in b_grid.iter().zip(&partitions) {
                let parts = engine.assemble(&rp, b, p).unwrap();
                let s = op_norm(&parts.s).unwrap();
                worst = worst.max(parts.split_residual().unwrap() / (1.0 + s));
                cases += 1;
            }
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!("{cases} cases, max ‖S − S₁ − S₂‖/(1 + ‖S‖) = {worst:.1e}"),
        worst <= 1e-8,
    )
}

fn scaling_exponential() -> Outcome {
    let start = Instant::now();
    let cfg = load("harper_1d.toml");
    let f = family_of(&cfg);
    let b_grid = cfg.sweep().unwrap().b_grid.values().unwrap();
    let z = default_z_values(&eigvalsh(&f.h).unwrap())[0];
    let defect = fit_holder(&sweep_defect(&f, z, &b_grid, 1).unwrap().0, 0.5).unwrap();
    let hd = fit_holder(&sweep_hausdorff(&f, &b_grid, 1).unwrap(), 0.5).unwrap();
    let decades = (b_grid[b_grid.len() - 1] / b_grid[0]).log10();
    within(
        Duration::from_secs(300),
        start,
        format!(
            "defect slope {:.3} (r² {:.3}), ratio stable {}; d_H ratio stable {} over {decades:.1} decades",
            defect.slope, defect.r_squared, defect.ratio_stable, hd.ratio_stable
        ),
        (0.4..=0.6).contains(&defect.slope) && defect.ratio_stable && hd.ratio_stable && decades >= 1.5,
    )
}

fn scaling_power_law() -> Outcome {
    let start = Instant::now();
    let cfg = load("powerlaw_1d.toml");
    let f = family_of(&cfg);
    let alpha = f.spec.alpha();
    let b_grid = cfg.sweep().unwrap().b_grid.values().unwrap();
    let z = default_z_values(&eigvalsh(&f.h).unwrap())[0];
    let fit = fit_holder(&sweep_defect(&f, z, &b_grid, 1).unwrap().0, alpha / 2.0).unwrap();
    within(
        Duration::from_secs(300),
        start,
        format!(
            "α = {alpha:.2}, defect slope {:.3} (r² {:.3})",
            fit.slope, fit.r_squared
        ),
        (0.15..=0.35).contains(&fit.slope),
    )
}

fn certificate_soundness() -> Outcome {
    let spec = ModelSpec::harper(Grid::chain(200).unwrap(), -1.0, 1.0);
    let f = harper_family(&spec, &MagneticField::zero(), &MagneticField::uniform(2.5)).unwrap();
    let engine = DefectEngine::new(&f.h, &f.phi, 1.0).unwrap();
    let zs = sample_z_values(engine.spectrum(), 50, 8);
    let points: Vec<_> = zs.iter().map(|&z| engine.at(z)).collect();
    let (mut certified, mut rejected, mut false_positives) = (0, 0, 0);
    for b in log_spaced(f.h.grid().min_partition_b(), 1.0, 6).unwrap() {
        let p = build_partition(f.h.grid(), b).unwrap();
        let sigma_b = eigvalsh(&f.at(b)).unwrap();
        for (z, rp) in zs.iter().zip(&points) {
            let Ok(rp) = rp else {
                rejected += 1;
                continue;
            };
            if engine.report(rp, b, &p).unwrap().certified {
                certified += 1;
                if spectral_distance(*z, &sigma_b).unwrap() <= 0.0 {
                    false_positives += 1;
                }
            }
        }
    }
    check(
        false_positives == 0 && certified > 0,
        format!(
            "{certified} certified of 300, {rejected} on σ(H), {false_positives} false positives"
        ),
    )
}

fn theorem2_desk_scale() -> Outcome {
    let start = Instant::now();
    let cfg = load("theorem2_2d.toml");
    let b_grid = cfg.sweep().unwrap().b_grid.values().unwrap();
    let t = theorem2_compare(
        &cfg.model_spec().unwrap(),
        &cfg.field.base(),
        &cfg.field.variation(),
        cfg.a_shift().unwrap(),
        &b_grid,
        1,
    )
    .unwrap();
    let rb = fit_holder(&t.operators, 1.0).unwrap();
    let gap = fit_holder(&t.spectra, 0.5).unwrap();
    within(
        Duration::from_secs(600),
        start,
        format!(
            "‖R′ − R_b‖ slope {:.3}; d_H(σ(R), σ(R′)) slope {:.3}, ratio stable {}",
            rb.slope, gap.slope, gap.ratio_stable
        ),
        (0.85..=1.15).contains(&rb.slope) && gap.ratio_stable,
    )
}

fn alpha0() -> Outcome {
    let cfg = load("alpha0_1d.toml");
    let sweep = cfg.sweep().unwrap();
    let report = alpha0_pipeline(
        &family_of(&cfg),
        &sweep.b_grid.values().unwrap(),
        &sweep.radii,
        1,
    )
    .unwrap();
    let failing = report.rows.iter().filter(|r| !r.holds).count();
    check(
        report.all_hold && report.uniformity_monotone && report.rows.len() == 16,
        format!(
            "{} rows, {failing} chain violations, u(M) nonincreasing {}",
            report.rows.len(),
            report.uniformity_monotone
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
seed = 11

[model]
kind = "harper"
dim = 1
L = 150.0
decay = { type = "exponential", rate = 1.0 }

[field]
type = "uniform"
db = 2.5

[sweep]
quantity = "defect"
b_grid = { lo = 3e-3, hi = 0.3, count = 6 }

[certify]
b = [0.01, 0.1]
z_random = 6
"#;

fn run_cli(args: &[&str]) -> Result<Vec<PathBuf>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_magspec"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(PathBuf::from)
        .collect())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let small = dir.path().join("small.toml");
    std::fs::write(&small, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let theorem2 = configs().join("theorem2_2d.toml");
    let jobs: [(&str, &Path); 3] = [("sweep", &small), ("certify", &small), ("sweep", &theorem2)];
    let mut compared = 0;
    for (k, (cmd, cfg)) in jobs.iter().enumerate() {
        let mut runs = Vec::new();
        for workers in ["1", "1", "3"] {
            let out = dir.path().join(format!("run{k}_{}", runs.len()));
            let files = run_cli(&[
                cmd,
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--workers",
                workers,
            ])?;
            let bytes: Vec<Vec<u8>> = files.iter().map(|p| std::fs::read(p).unwrap()).collect();
            runs.push(bytes);
        }
        if runs[0] != runs[1] || runs[0] != runs[2] {
            return Err(format!("{cmd} on {} differs between runs", cfg.display()));
        }
        compared += runs[0].len();
    }
    Ok(format!(
        "{compared} files byte-identical across reruns and --workers 1/3"
    ))
}

fn main() {
    faer::set_global_parallelism(faer::Par::Seq);
    let criteria: [Criterion; 11] = [
        ("hausdorff oracle equivalence", hausdorff_oracle),
        ("eigensolver contract", eigensolver_contract),
        ("weyl property suite", weyl_suite),
        ("partition suite", partition_suite),
        ("defect consistency", defect_consistency),
        ("scaling, exponential decay", scaling_exponential),
        ("scaling, power-law decay", scaling_power_law),
        ("certificate soundness", certificate_soundness),
        ("resolvent comparison on 24x24", theorem2_desk_scale),
        ("heavy-tail truncation chain", alpha0),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
