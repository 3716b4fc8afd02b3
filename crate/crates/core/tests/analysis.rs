use magspec::analysis::{
    alpha0_pipeline, fit_holder, harper_family, log_spaced, sweep_defect, sweep_hausdorff,
    sweep_hausdorff_from, theorem2_compare, HarperFamily,
};
use magspec::certificate::default_z_values;
use magspec::models::{MagneticField, ModelSpec};
use magspec::operators::{twist, Grid};
use magspec::spectral::{eigvalsh, hausdorff};

fn family(grid: Grid) -> HarperFamily {
    let spec = ModelSpec::harper(grid, -1.0, 1.0);
    harper_family(&spec, &MagneticField::zero(), &MagneticField::uniform(2.5)).unwrap()
}

#[test]
fn rebasing_the_family_does_not_change_the_sweep() {
    let f = family(Grid::chain(150).unwrap());
    let b0 = 0.3;
    let deltas = log_spaced(3e-3, 0.2, 7).unwrap();
    let rebased = sweep_hausdorff_from(&f, b0, &deltas, 1).unwrap();
    let reference = eigvalsh(&f.at(b0)).unwrap();
    for (&(d, v), &delta) in rebased.rows().iter().zip(&deltas) {
        assert_eq!(d, delta);
        let direct = hausdorff(
            &eigvalsh(&twist(&f.h, &f.phi, b0 + delta)).unwrap(),
            &reference,
        )
        .unwrap();
        assert!((v - direct).abs() <= 1e-9, "δ = {delta}: {v} vs {direct}");
    }
}

#[test]
fn sweeps_do_not_depend_on_the_worker_count() {
    let f = family(Grid::chain(120).unwrap());
    let bs = log_spaced(5e-3, 0.5, 6).unwrap();
    assert_eq!(
        sweep_hausdorff(&f, &bs, 1).unwrap(),
        sweep_hausdorff(&f, &bs, 3).unwrap()
    );
    let z = default_z_values(&eigvalsh(&f.h).unwrap())[3];
    let (one, r1) = sweep_defect(&f, z, &bs, 1).unwrap();
    let (four, r4) = sweep_defect(&f, z, &bs, 4).unwrap();
    assert_eq!(one, four);
    assert_eq!(r1, r4);
}

#[test]
fn halving_the_spacing_keeps_the_slopes() {
    let bs = log_spaced(2e-3, 1e-1, 10).unwrap();
    let slopes = |h: f64| {
        let f = family(Grid::new(1, 200.0, h).unwrap());
        let hd = fit_holder(&sweep_hausdorff(&f, &bs, 1).unwrap(), 0.5)
            .unwrap()
            .slope;
        let z = default_z_values(&eigvalsh(&f.h).unwrap())[0];
        let df = fit_holder(&sweep_defect(&f, z, &bs, 1).unwrap().0, 0.5)
            .unwrap()
            .slope;
        (hd, df)
    };
    let (coarse, fine) = (slopes(1.0), slopes(0.5));
    assert!((coarse.0 - fine.0).abs() < 0.05, "{coarse:?} {fine:?}");
    assert!((coarse.1 - fine.1).abs() < 0.05, "{coarse:?} {fine:?}");
}

#[test]
fn theorem2_tables_start_at_zero() {
    let spec = ModelSpec::mag_schrodinger(Grid::square(10).unwrap());
    let mut bs = vec![0.0];
    bs.extend(log_spaced(1e-3, 1e-1, 5).unwrap());
    let t = theorem2_compare(
        &spec,
        &MagneticField::uniform(0.3),
        &MagneticField::uniform(1.0),
        3.0,
        &bs,
        2,
    )
    .unwrap();
    assert_eq!(t.spectra.rows()[0], (0.0, 0.0));
    assert_eq!(t.operators.rows()[0], (0.0, 0.0));
    assert!(t.operators.rows()[1..].windows(2).all(|w| w[0].1 < w[1].1));
}

#[test]
fn alpha0_chain_holds_on_a_heavy_tail() {
    let spec = ModelSpec::longrange(Grid::chain(150).unwrap(), -1.0, 1.05);
    let f = harper_family(&spec, &MagneticField::zero(), &MagneticField::uniform(2.0)).unwrap();
    let report = alpha0_pipeline(&f, &[3e-3, 3e-2, 0.3], &[2.0, 6.0, 18.0], 2).unwrap();
    assert!(report.all_hold);
    assert!(report.uniformity_monotone);
    assert_eq!(report.rows.len(), 9);
}
