use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{RunConfig, SweepQuantity};
use crate::analysis::{
    alpha0_pipeline, check_b_grid, fit_holder, harper_family, hash_json, run_jobs, sweep_defect,
    sweep_hausdorff, theorem2_compare, HarperFamily, HolderFit, SweepTable,
};
use crate::certificate::{
    build_partition, default_z_values, DefectEngine, DefectReport, PartitionOfUnity,
};
use crate::error::{Error, Result};
use crate::models::{build_mag_schrodinger, ModelKind};
use crate::spectral::{eigvalsh, Spectrum, SpectrumFile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Meta {
    pub fn of(cfg: &RunConfig) -> Result<Self> {
        Ok(Meta {
            config_hash: cfg.hash()?,
            seed: cfg.seed,
            version: VERSION.to_string(),
        })
    }

    fn csv_comment(&self) -> String {
        format!(
            "# config_hash={},seed={},version={}\n",
            self.config_hash, self.seed, self.version
        )
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer<'a> {
    dir: &'a Path,
    cfg: &'a RunConfig,
    meta: Meta,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(cfg: &'a RunConfig, dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| {
            Error::InvalidArgument(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        Ok(Writer {
            dir,
            cfg,
            meta: Meta::of(cfg)?,
            written: Vec::new(),
        })
    }

    fn wants(&self, format: &str) -> bool {
        self.cfg
            .output
            .formats
            .iter()
            .any(|f| f.eq_ignore_ascii_case(format))
    }

    fn put(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<()> {
        if !self.wants("csv") {
            return Ok(());
        }
        let mut body = self.meta.csv_comment();
        body.push_str(header);
        body.push('\n');
        for r in rows {
            body.push_str(&r);
            body.push('\n');
        }
        self.put(name, &body)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if !self.wants("json") {
            return Ok(());
        }
        #[derive(Serialize)]
        struct Stamped<'v, T> {
            meta: &'v Meta,
            #[serde(flatten)]
            body: &'v T,
        }
        let mut text = serde_json::to_string_pretty(&Stamped {
            meta: &self.meta,
            body: value,
        })?;
        text.push('\n');
        self.put(name, &text)
    }

    fn sweep_table(&mut self, name: &str, t: &SweepTable) -> Result<()> {
        let rows: Vec<String> = t
            .rows()
            .iter()
            .map(|&(b, v)| format!("{},{}", fmt_num(b), fmt_num(v)))
            .collect();
        self.csv(name, "b,value", rows)
    }

    fn fit(&mut self, name: &str, t: &SweepTable, fit: &HolderFit) -> Result<()> {
        #[derive(Serialize)]
        struct FitFile<'f> {
            quantity: &'static str,
            model_hash: &'f str,
            #[serde(flatten)]
            fit: &'f HolderFit,
        }
        self.json(
            name,
            &FitFile {
                quantity: t.quantity.name(),
                model_hash: &t.model_hash,
                fit,
            },
        )
    }
}

fn harper_of(cfg: &RunConfig) -> Result<HarperFamily> {
    let spec = cfg.model_spec()?;
    if spec.kind == ModelKind::MagSchrodinger {
        return Err(Error::InvalidArgument(
            "this command needs a harper or longrange model".into(),
        ));
    }
    harper_family(&spec, &cfg.field.base(), &cfg.field.variation())
}

/// Harper-like b must be 0 or lie in the partition window `[(8/L)², 1]`.
fn check_b(cfg: &RunConfig, b: f64) -> Result<()> {
    if cfg.model.kind == ModelKind::MagSchrodinger {
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("b = {b} is not finite")));
        }
        return Ok(());
    }
    check_b_grid(&cfg.grid()?, &[b.abs()], true)
}

/// Writes `spectrum.json`: σ(H_b) with its metadata.
pub fn cmd_spectrum(cfg: &RunConfig, b: f64, out: &Path) -> Result<Vec<PathBuf>> {
    check_b(cfg, b)?;
    let spec = cfg.model_spec()?;
    let (spectrum, model_hash) = if spec.kind == ModelKind::MagSchrodinger {
        let a_shift = cfg.a_shift()?;
        let field = cfg.field.base().plus_scaled(b, &cfg.field.variation());
        let h = build_mag_schrodinger(&spec, &field, a_shift)?;
        let hash = hash_json(&(&spec, &cfg.field.base(), &cfg.field.variation(), a_shift))?;
        (eigvalsh(&h)?, hash)
    } else {
        let family = harper_of(cfg)?;
        (eigvalsh(&family.at(b))?, family.model_hash)
    };
    let mut w = Writer::new(cfg, out)?;
    let file = SpectrumFile {
        n: spectrum.len(),
        values: spectrum.values().to_vec(),
        model_hash,
        b,
    };
    w.json("spectrum.json", &file)?;
    Ok(w.written)
}

fn z_of(pair: &[f64; 2]) -> c64 {
    c64::new(pair[0], pair[1])
}

/// Runs the configured sweep and writes its tables and fits.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path, workers: usize) -> Result<Vec<PathBuf>> {
    let sweep = cfg.sweep()?;
    let b_grid = sweep.b_grid.values()?;
    match sweep.quantity {
        SweepQuantity::Hausdorff => {
            let family = harper_of(cfg)?;
            let table = sweep_hausdorff(&family, &b_grid, workers)?;
            let fit = fit_holder(&table, sweep.beta_ref.unwrap_or(0.5))?;
            let mut w = Writer::new(cfg, out)?;
            w.sweep_table("sweep_hausdorff.csv", &table)?;
            w.fit("fit_hausdorff.json", &table, &fit)?;
            Ok(w.written)
        }
        SweepQuantity::Defect => {
            let family = harper_of(cfg)?;
            let z = match sweep.z.first() {
                Some(p) => z_of(p),
                None => default_z_values(&eigvalsh(&family.h)?)[0],
            };
            let (table, reports) = sweep_defect(&family, z, &b_grid, workers)?;
            let fit = fit_holder(&table, sweep.beta_ref.unwrap_or(0.5))?;
            let mut w = Writer::new(cfg, out)?;
            w.sweep_table("sweep_defect.csv", &table)?;
            w.csv(
                "defect_reports.csv",
                REPORT_HEADER,
                reports.iter().map(|r| report_row(r.b, r.z, Ok(r))),
            )?;
            w.fit("fit_defect.json", &table, &fit)?;
            Ok(w.written)
        }
        SweepQuantity::Theorem2 => {
            let spec = cfg.model_spec()?;
            if spec.kind != ModelKind::MagSchrodinger {
                return Err(Error::InvalidArgument(
                    "theorem2 sweeps need a mag_schrodinger model".into(),
                ));
            }
            let t = theorem2_compare(
                &spec,
                &cfg.field.base(),
                &cfg.field.variation(),
                cfg.a_shift()?,
                &b_grid,
                workers,
            )?;
            let gap_fit = fit_holder(&t.spectra, sweep.beta_ref.unwrap_or(0.5))?;
            let rb_fit = fit_holder(&t.operators, 1.0)?;
            let mut w = Writer::new(cfg, out)?;
            w.sweep_table("sweep_resolvent_gap.csv", &t.spectra)?;
            w.fit("fit_resolvent_gap.json", &t.spectra, &gap_fit)?;
            w.sweep_table("sweep_rb_gap.csv", &t.operators)?;
            w.fit("fit_rb_gap.json", &t.operators, &rb_fit)?;
            Ok(w.written)
        }
        SweepQuantity::Alpha0 => {
            let family = harper_of(cfg)?;
            let report = alpha0_pipeline(&family, &b_grid, &sweep.radii, workers)?;
            let mut w = Writer::new(cfg, out)?;
            let rows = report.rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{},{},{}",
                    fmt_num(r.b),
                    fmt_num(r.m),
                    fmt_num(r.uniformity),
                    fmt_num(r.full),
                    fmt_num(r.truncated),
                    fmt_num(r.chain),
                    r.holds
                )
            });
            w.csv(
                "alpha0.csv",
                "b,M,u,d_H_full,d_H_truncated,chain_bound,holds",
                rows,
            )?;
            w.json("alpha0.json", &report)?;
            Ok(w.written)
        }
    }
}

const REPORT_HEADER: &str = "b,re_z,im_z,norm_S,norm_S1,norm_S2,bound_value,certified,status";

fn report_row(b: f64, z: c64, r: std::result::Result<&DefectReport, &Error>) -> String {
    let mut s = format!("{},{},{}", fmt_num(b), fmt_num(z.re), fmt_num(z.im));
    match r {
        Ok(r) => {
            let _ = write!(
                s,
                ",{},{},{},{},{},ok",
                fmt_num(r.norm_s),
                fmt_num(r.norm_s1),
                fmt_num(r.norm_s2),
                fmt_num(r.bound_value),
                r.certified
            );
        }
        Err(e) => {
            let msg = e.to_string().replace([',', '\n'], ";");
            let _ = write!(s, ",,,,,,error: {msg}");
        }
    }
    s
}

/// `count` seeded spectral parameters with real part uniform on
/// `[min σ − 2, max σ + 2]`. Half of them sit on the real axis, the rest get
/// an imaginary part uniform on `[0, ¼)`.
pub fn sample_z_values(spectrum: &Spectrum, count: usize, seed: u64) -> Vec<c64> {
    let lo = spectrum.min().unwrap_or(0.0) - 2.0;
    let hi = spectrum.max().unwrap_or(0.0) + 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let re = rng.gen_range(lo..hi);
            let im = if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(0.0..0.25)
            };
            c64::new(re, im)
        })
        .collect()
}

/// Certifies every (b, z) pair and writes `certify.csv`. Points that fail
/// (for instance z on σ(H)) get an error status instead of aborting the run.
pub fn cmd_certify(
    cfg: &RunConfig,
    b_override: Option<f64>,
    z_override: &[c64],
    out: &Path,
    workers: usize,
) -> Result<Vec<PathBuf>> {
    let family = harper_of(cfg)?;
    let block = cfg.certify.clone().unwrap_or(super::config::CertifyBlock {
        b: Vec::new(),
        z: Vec::new(),
        z_random: 0,
    });
    let bs = match b_override {
        Some(b) => vec![b],
        None => block.b.clone(),
    };
    if bs.is_empty() {
        return Err(Error::InvalidArgument(
            "certify needs --b or certify.b".into(),
        ));
    }
    for &b in &bs {
        check_b(cfg, b)?;
    }
    let engine = DefectEngine::new(&family.h, &family.phi, family.spec.epsilon())?;
    let zs: Vec<c64> = if !z_override.is_empty() {
        z_override.to_vec()
    } else {
        let mut zs: Vec<c64> = block.z.iter().map(z_of).collect();
        zs.extend(sample_z_values(engine.spectrum(), block.z_random, cfg.seed));
        if zs.is_empty() {
            zs = default_z_values(engine.spectrum());
        }
        zs
    };
    let partitions: Vec<PartitionOfUnity> = bs
        .iter()
        .map(|&b| {
            if b == 0.0 {
                Ok(PartitionOfUnity::trivial(family.h.grid(), 0.0))
            } else {
                build_partition(family.h.grid(), b.abs())
            }
        })
        .collect::<Result<_>>()?;
    let points = run_jobs(zs.len(), workers, |k| Ok(engine.at(zs[k])))?;
    let nz = zs.len();
    let rows = run_jobs(bs.len() * nz, workers, |k| {
        let (ib, iz) = (k / nz, k % nz);
        let r = points[iz]
            .as_ref()
            .map_err(clone_error)
            .and_then(|rp| engine.report(rp, bs[ib], &partitions[ib]));
        Ok(report_row(bs[ib], zs[iz], r.as_ref()))
    })?;
    let mut w = Writer::new(cfg, out)?;
    w.csv("certify.csv", REPORT_HEADER, rows)?;
    Ok(w.written)
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::TooCloseToSpectrum {
            z,
            distance,
            required,
        } => Error::TooCloseToSpectrum {
            z: *z,
            distance: *distance,
            required: *required,
        },
        Error::NearSingular { z, residual } => Error::NearSingular {
            z: *z,
            residual: *residual,
        },
        other => Error::InvalidArgument(other.to_string()),
    }
}
