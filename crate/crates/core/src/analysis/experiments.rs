use faer::c64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::fit::{Quantity, SweepTable};
use super::jobs::run_jobs;
use crate::certificate::{build_partition, DefectEngine, DefectReport};
use crate::error::{Error, Result};
use crate::models::{
    build_harper, build_mag_schrodinger, magnetic_phase, resolvent, Embedding, MagneticField,
    ModelSpec,
};
use crate::operators::{
    truncate, twist, twist_tabulated, uniformity_defect, Grid, KernelOperator, PhaseFunction,
    PhaseTable,
};
use crate::spectral::{eigvalsh, hausdorff, op_norm, Spectrum};

/// Hex SHA-256 of the JSON serialization of `value`.
pub fn hash_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let text = serde_json::to_string(value)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// Checks that `b_grid` is strictly increasing and nonnegative, and, when
/// `partition` is set, that every positive b lies in `[(8/L)², 1]`.
pub fn check_b_grid(grid: &Grid, b_grid: &[f64], partition: bool) -> Result<()> {
    if b_grid.is_empty() {
        return Err(Error::InvalidArgument("b grid is empty".into()));
    }
    for w in b_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!(
                "b grid must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
    }
    let lo = grid.min_partition_b();
    for &b in b_grid {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "b = {b} must be finite and nonnegative"
            )));
        }
        if partition && b > 0.0 && !(b >= lo && b <= 1.0) {
            return Err(Error::InadmissibleB { b, lo, hi: 1.0 });
        }
    }
    Ok(())
}

/// A Harper-like family `b ↦ twist(H, φ, b)`: H is built from the model and
/// already twisted by the base field, φ is the phase of the varying field.
#[derive(Debug, Clone)]
pub struct HarperFamily {
    pub spec: ModelSpec,
    pub h: KernelOperator,
    pub phi: PhaseFunction,
    pub model_hash: String,
}

pub fn harper_family(
    spec: &ModelSpec,
    base: &MagneticField,
    variation: &MagneticField,
) -> Result<HarperFamily> {
    let (h, phi) = build_harper(spec, variation)?;
    let h = if base.terms().is_empty() {
        h
    } else {
        twist(&h, &magnetic_phase(base, spec.embedding), 1.0)
    };
    Ok(HarperFamily {
        spec: spec.clone(),
        h,
        phi,
        model_hash: hash_json(&(spec, base, variation))?,
    })
}

impl HarperFamily {
    /// H_b = twist(H, φ, b).
    pub fn at(&self, b: f64) -> KernelOperator {
        twist(&self.h, &self.phi, b)
    }
}

/// d_H(σ(H_b), σ(H)) over `b_grid`.
pub fn sweep_hausdorff(
    family: &HarperFamily,
    b_grid: &[f64],
    workers: usize,
) -> Result<SweepTable> {
    check_b_grid(family.h.grid(), b_grid, true)?;
    let reference = eigvalsh(&family.h)?;
    let table = PhaseTable::new(family.h.grid(), &family.phi);
    let values = run_jobs(b_grid.len(), workers, |k| {
        let hb = twist_tabulated(&family.h, &table, b_grid[k]);
        hausdorff(&eigvalsh(&hb)?, &reference)
    })?;
    SweepTable::from_rows(
        Quantity::HausdorffDistance,
        family.model_hash.clone(),
        b_grid.iter().copied().zip(values).collect(),
    )
}

/// Sweep of δ ↦ d_H(σ(H′_δ), σ(H′)) for the family re-based at b₀,
/// i.e. with H′ = twist(H, φ, b₀).
pub fn sweep_hausdorff_from(
    family: &HarperFamily,
    b0: f64,
    deltas: &[f64],
    workers: usize,
) -> Result<SweepTable> {
    let rebased = HarperFamily {
        h: family.at(b0),
        ..family.clone()
    };
    sweep_hausdorff(&rebased, deltas, workers)
}

/// ‖S(z)‖ over `b_grid`, with the full defect report of every row.
pub fn sweep_defect(
    family: &HarperFamily,
    z: c64,
    b_grid: &[f64],
    workers: usize,
) -> Result<(SweepTable, Vec<DefectReport>)> {
    check_b_grid(family.h.grid(), b_grid, true)?;
    let engine = DefectEngine::new(&family.h, &family.phi, family.spec.epsilon())?;
    let rp = engine.at(z)?;
    let reports = run_jobs(b_grid.len(), workers, |k| {
        let b = b_grid[k];
        if b == 0.0 {
            let p = crate::certificate::PartitionOfUnity::trivial(family.h.grid(), 0.0);
            return engine.report(&rp, 0.0, &p);
        }
        let p = build_partition(family.h.grid(), b)?;
        engine.report(&rp, b, &p)
    })?;
    let table = SweepTable::from_rows(
        Quantity::DefectNorm,
        family.model_hash.clone(),
        reports.iter().map(|r| (r.b, r.norm_s)).collect(),
    )?;
    Ok((table, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Tables {
    /// d_H(σ(R), σ(R′)).
    pub spectra: SweepTable,
    /// ‖R′ − R_b‖.
    pub operators: SweepTable,
}

/// Compares R = H⁻¹ for the field `base` with R′ = H′⁻¹ for `base + b·variation`
/// and with the twisted resolvent R_b = twist(R, φ, b), φ the line phase of
/// the transverse gauge of `variation`. Both H and H′ include `a_shift`.
pub fn theorem2_compare(
    spec: &ModelSpec,
    base: &MagneticField,
    variation: &MagneticField,
    a_shift: f64,
    b_grid: &[f64],
    workers: usize,
) -> Result<Theorem2Tables> {
    check_b_grid(&spec.grid, b_grid, false)?;
    let model_hash = hash_json(&(spec, base, variation, a_shift))?;
    let h = build_mag_schrodinger(spec, base, a_shift)?;
    let r = resolvent(&h, c64::new(0.0, 0.0))?;
    let sigma_r = eigvalsh(&r)?;
    let table = PhaseTable::new(h.grid(), &magnetic_phase(variation, Embedding::Plane));
    let rows = run_jobs(b_grid.len(), workers, |k| {
        let b = b_grid[k];
        if b == 0.0 {
            return Ok((0.0, 0.0));
        }
        let hp = build_mag_schrodinger(spec, &base.plus_scaled(b, variation), a_shift)?;
        let rp = resolvent(&hp, c64::new(0.0, 0.0))?;
        let gap = hausdorff(&sigma_r, &eigvalsh(&rp)?)?;
        let rb = twist_tabulated(&r, &table, b);
        Ok((gap, op_norm(&rp.sub(&rb)?)?))
    })?;
    let spectra = SweepTable::from_rows(
        Quantity::ResolventGap,
        model_hash.clone(),
        b_grid.iter().zip(&rows).map(|(&b, r)| (b, r.0)).collect(),
    )?;
    let operators = SweepTable::from_rows(
        Quantity::TwistedResolventGap,
        model_hash,
        b_grid.iter().zip(&rows).map(|(&b, r)| (b, r.1)).collect(),
    )?;
    Ok(Theorem2Tables { spectra, operators })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alpha0Row {
    pub b: f64,
    pub m: f64,
    /// u(M) = ‖H − H_M‖₁,₀.
    pub uniformity: f64,
    /// d_H(σ(H_b), σ(H)).
    pub full: f64,
    /// d_H(σ((H_b)_M), σ(H_M)).
    pub truncated: f64,
    /// 2 u(M) + d_H(σ((H_b)_M), σ(H_M)).
    pub chain: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha0Report {
    pub model_hash: String,
    pub rows: Vec<Alpha0Row>,
    pub uniformity_monotone: bool,
    pub all_hold: bool,
}

/// Slack of the triangle chain.
pub const CHAIN_SLACK: f64 = 1e-8;

/// Truncation argument for heavy tails: for every (b, M),
/// d_H(σ(H_b), σ(H)) ≤ 2u(M) + d_H(σ((H_b)_M), σ(H_M)), since twisting
/// commutes with truncation and leaves u(M) unchanged.
pub fn alpha0_pipeline(
    family: &HarperFamily,
    b_grid: &[f64],
    m_grid: &[f64],
    workers: usize,
) -> Result<Alpha0Report> {
    check_b_grid(family.h.grid(), b_grid, false)?;
    if m_grid.is_empty() || m_grid.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(
            "truncation radii must be positive".into(),
        ));
    }
    let h = &family.h;
    let table = PhaseTable::new(h.grid(), &family.phi);
    let sigma_h = eigvalsh(h)?;
    let per_m: Vec<(f64, Spectrum)> = run_jobs(m_grid.len(), workers, |k| {
        Ok((
            uniformity_defect(h, m_grid[k])?,
            eigvalsh(&truncate(h, m_grid[k])?)?,
        ))
    })?;
    let nm = m_grid.len();
    let rows = run_jobs(b_grid.len() * nm, workers, |k| {
        let (ib, im) = (k / nm, k % nm);
        let (b, m) = (b_grid[ib], m_grid[im]);
        let hb = twist_tabulated(h, &table, b);
        let full = hausdorff(&eigvalsh(&hb)?, &sigma_h)?;
        let truncated = hausdorff(&eigvalsh(&truncate(&hb, m)?)?, &per_m[im].1)?;
        let uniformity = per_m[im].0;
        let chain = 2.0 * uniformity + truncated;
        Ok(Alpha0Row {
            b,
            m,
            uniformity,
            full,
            truncated,
            chain,
            holds: full <= chain + CHAIN_SLACK,
        })
    })?;
    let mut order: Vec<usize> = (0..nm).collect();
    order.sort_by(|&a, &b| m_grid[a].total_cmp(&m_grid[b]));
    let uniformity_monotone = order.windows(2).all(|w| per_m[w[1]].0 <= per_m[w[0]].0);
    Ok(Alpha0Report {
        model_hash: family.model_hash.clone(),
        all_hold: rows.iter().all(|r| r.holds),
        rows,
        uniformity_monotone,
    })
}
