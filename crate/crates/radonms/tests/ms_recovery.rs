//! Ground-truth recovery, energy descent and the stability/regularization
//! experiments for the piecewise-constant reconstruction.

use radonms::grid::ImageGrid;
use radonms::inversion::{fbp_reconstruct, SpectralFilterConfig, SpectralWindow};
use radonms::metrics::sino_norm;
use radonms::ms::{
    evaluate_energy, quantile_init, reconstruct_pc, regularization_experiment,
    stability_experiment, MSConfig, PCFunction, Partition, ProjectionCache,
};
use radonms::phantom::{PhantomComponent, PhantomSpec};
use radonms::radon::{forward_project, ProjectionGeometry};
use radonms::{add_noise, ImageND, NoiseConfig};

/// Two-level phantom: ellipse of value 1.0 on a 0.2 background.
fn two_level_image(grid: &ImageGrid) -> ImageND {
    let spec = PhantomSpec::new(vec![PhantomComponent::ellipse(
        [0.05, -0.1],
        [0.45, 0.3],
        0.5,
        0.8,
    )]);
    let mut img = spec.rasterize(grid).unwrap();
    for v in img.values_mut() {
        *v += 0.2;
    }
    img
}

fn truth_labels(img: &ImageND) -> Vec<u32> {
    img.values()
        .iter()
        .map(|&v| if v > 0.5 { 1 } else { 0 })
        .collect()
}

#[test]
fn noiseless_two_region_recovery_from_fbp_warm_start() {
    let grid = ImageGrid::centered(2, 64, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(93, grid.circumradius() * 1.02, 90).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let g = forward_project(&f, &geom).unwrap();

    let warm = fbp_reconstruct(
        &g,
        &grid,
        &SpectralFilterConfig::new(0.0, 0.9, SpectralWindow::Cosine).unwrap(),
    )
    .unwrap();
    let cfg = MSConfig {
        beta: 1e-4,
        m: 2,
        delta: None,
        max_outer_iters: 300,
        sweep_seed: 12,
        value_solver_ridge: None,
    };
    let init = quantile_init(&warm, 2, cfg.delta_for(&grid)).unwrap();
    let rec = reconstruct_pc(&g, &cfg, &init, &cache).unwrap();
    assert!(rec.converged);

    // Energy descent, step by step.
    for w in rec.trace.windows(2) {
        assert!(w[1].total <= w[0].total, "trace not monotone");
    }

    // Align recovered labels with the truth by value order.
    let truth = truth_labels(&f);
    let hi = if rec.pc.values[0] > rec.pc.values[1] { 0u32 } else { 1u32 };
    let correct = rec
        .pc
        .partition
        .labels()
        .iter()
        .zip(&truth)
        .filter(|(&l, &t)| (l == hi) == (t == 1))
        .count();
    let frac = correct as f64 / grid.len() as f64;
    assert!(frac >= 0.99, "only {frac} of cells labeled correctly");

    let (lo_val, hi_val) = if hi == 0 {
        (rec.pc.values[1], rec.pc.values[0])
    } else {
        (rec.pc.values[0], rec.pc.values[1])
    };
    assert!((lo_val - 0.2).abs() / 0.2 < 0.01, "background value {lo_val}");
    assert!((hi_val - 1.0).abs() < 0.01, "inclusion value {hi_val}");

    // Exact recovery property: the final energy does not exceed the
    // ground truth's.
    let truth_pc = PCFunction::new(
        Partition::new(truth, 2, cfg.delta_for(&grid)).unwrap(),
        vec![0.2, 1.0],
    )
    .unwrap();
    let truth_energy = evaluate_energy(&truth_pc, &g, cfg.beta, &grid).unwrap();
    assert!(rec.trace.last().unwrap().total <= truth_energy.total * (1.0 + 1e-9));
}

#[test]
fn huge_beta_minimizes_perimeter_among_visited_configurations() {
    let grid = ImageGrid::centered(2, 32, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(47, grid.circumradius() * 1.02, 24).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let g = forward_project(&f, &geom).unwrap();
    let cfg = MSConfig {
        beta: 1e3,
        m: 2,
        delta: None,
        max_outer_iters: 200,
        sweep_seed: 4,
        value_solver_ridge: None,
    };
    // Speckled corruption of the truth labels: plenty of
    // perimeter-reducing moves exist.
    let mut labels = truth_labels(&f);
    for (i, l) in labels.iter_mut().enumerate() {
        if (i * 7 + i / 32 * 3) % 11 == 0 {
            *l = 1 - *l;
        }
    }
    let init = Partition::new(labels, 2, cfg.delta_for(&grid)).unwrap();
    let init_pc = PCFunction::new(init.clone(), vec![0.0, 0.0]).unwrap();
    let init_perim = evaluate_energy(&init_pc, &g, cfg.beta, &grid).unwrap().perimeter;
    let rec = reconstruct_pc(&g, &cfg, &init, &cache).unwrap();
    // The energy is dominated by beta * perimeter, so monotone descent
    // makes the output's perimeter minimal among the visited iterates;
    // single-cell moves cannot shrink a flat-sided blob further, so the
    // floor itself need not be reached.
    let perims: Vec<f64> = rec.trace.iter().map(|e| e.perimeter).collect();
    for w in perims.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "perimeter went up: {perims:?}");
    }
    let final_perim = rec.trace.last().unwrap().perimeter;
    assert!(
        final_perim < 0.5 * init_perim,
        "perimeter {final_perim} vs initial {init_perim}"
    );
    // The nondegeneracy constraint held throughout.
    rec.pc.partition.check_admissible(&grid).unwrap();
}

#[test]
fn label_permutation_equivariance() {
    let grid = ImageGrid::centered(2, 24, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(35, grid.circumradius() * 1.02, 20).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let g = forward_project(&f, &geom).unwrap();
    let cfg = MSConfig {
        beta: 1e-4,
        m: 2,
        delta: None,
        max_outer_iters: 120,
        sweep_seed: 9,
        value_solver_ridge: Some(0.0),
    };
    let init = quantile_init(&f, 2, cfg.delta_for(&grid)).unwrap();
    let swapped = Partition::new(
        init.labels().iter().map(|&l| 1 - l).collect(),
        2,
        init.delta(),
    )
    .unwrap();
    let rec_a = reconstruct_pc(&g, &cfg, &init, &cache).unwrap();
    let rec_b = reconstruct_pc(&g, &cfg, &swapped, &cache).unwrap();
    for (la, lb) in rec_a
        .pc
        .partition
        .labels()
        .iter()
        .zip(rec_b.pc.partition.labels())
    {
        assert_eq!(*la, 1 - *lb, "labels are not a pure permutation");
    }
    for k in 0..2 {
        let (a, b) = (rec_a.pc.values[k], rec_b.pc.values[1 - k]);
        assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "values {a} vs {b}");
    }
}

#[test]
fn stability_sequence_settles() {
    let grid = ImageGrid::centered(2, 48, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(69, grid.circumradius() * 1.02, 60).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let g = forward_project(&f, &geom).unwrap();
    let gn = sino_norm(&g);
    let cfg = MSConfig {
        beta: 1e-3,
        m: 2,
        delta: None,
        max_outer_iters: 200,
        sweep_seed: 3,
        value_solver_ridge: None,
    };
    let init = quantile_init(&f, 2, cfg.delta_for(&grid)).unwrap();

    // Constant sequence: identical reconstructions (determinism).
    let fixed = add_noise(&g, &NoiseConfig { epsilon: 0.05 * gn, seed: 77 }).unwrap();
    let rep = stability_experiment(
        &[fixed.clone(), fixed.clone()],
        &g,
        &cfg,
        &init,
        &cache,
    )
    .unwrap();
    assert_eq!(rep.rows[1].value_dist_prev, Some(0.0));
    assert_eq!(rep.rows[1].label_dist_prev, Some(0.0));

    // Shrinking noise: value vectors Cauchy-like, label distance to the
    // exact-data reconstruction decreasing.
    let data: Vec<_> = (0..4)
        .map(|n| {
            add_noise(
                &g,
                &NoiseConfig {
                    epsilon: 0.1 * 0.5f64.powi(n) * gn,
                    seed: 100 + n as u64,
                },
            )
            .unwrap()
        })
        .collect();
    let report = stability_experiment(&data, &g, &cfg, &init, &cache).unwrap();
    let vdists: Vec<f64> = report
        .rows
        .iter()
        .filter_map(|r| r.value_dist_prev)
        .collect();
    for w in vdists.windows(2) {
        assert!(w[1] <= w[0], "value distances not settling: {vdists:?}");
    }
    let ldists: Vec<f64> = report.rows.iter().map(|r| r.label_dist_ref).collect();
    for w in ldists.windows(2) {
        assert!(w[1] <= w[0], "label distances not settling: {ldists:?}");
    }
}

#[test]
fn regularization_schedule_beats_the_negative_control() {
    // Few angles: the geometry is genuinely underdetermined, so the
    // perimeter weight matters and the schedule premise has teeth.
    let grid = ImageGrid::centered(2, 48, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(69, grid.circumradius() * 1.02, 10).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let truth = PCFunction::new(
        Partition::new(truth_labels(&f), 2, 4.0 * grid.cell_volume()).unwrap(),
        vec![0.2, 1.0],
    )
    .unwrap();
    let g = cache.project_image(&f).unwrap();
    let gn = sino_norm(&g);
    let cfg = MSConfig {
        beta: 1.0,
        m: 2,
        delta: None,
        max_outer_iters: 250,
        sweep_seed: 3,
        value_solver_ridge: None,
    };
    let init = quantile_init(&f, 2, cfg.delta_for(&grid)).unwrap();
    let eps: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|e| e * gn).collect();
    let e0 = eps[0];
    // The dimensional constant converts a data-norm eps into a perimeter
    // weight; both schedules share it and start from the same beta.
    let c = 0.003;

    let good =
        regularization_experiment(&truth, &eps, |e| c * e, &cfg, &init, &cache, 500).unwrap();
    assert!(!good.schedule_flagged);
    let ge: Vec<f64> = good.rows.iter().map(|r| r.l2_error).collect();
    for w in ge.windows(2) {
        assert!(w[1] < w[0], "good schedule not decreasing: {ge:?}");
    }

    let bad = regularization_experiment(&truth, &eps, |e| c * e * e / e0, &cfg, &init, &cache, 500)
        .unwrap();
    assert!(bad.schedule_flagged, "eps^2 schedule must be flagged");
    let be: Vec<f64> = bad.rows.iter().map(|r| r.l2_error).collect();
    assert!(
        be.last().unwrap() > &(3.0 * ge.last().unwrap()),
        "negative control converged anyway: good {ge:?} bad {be:?}"
    );
}

#[test]
fn exact_data_limit_reaches_the_discretization_floor() {
    let grid = ImageGrid::centered(2, 48, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(69, grid.circumradius() * 1.02, 60).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let f = two_level_image(&grid);
    let truth = PCFunction::new(
        Partition::new(truth_labels(&f), 2, 4.0 * grid.cell_volume()).unwrap(),
        vec![0.2, 1.0],
    )
    .unwrap();
    let cfg = MSConfig {
        beta: 1.0,
        m: 2,
        delta: None,
        max_outer_iters: 250,
        sweep_seed: 3,
        value_solver_ridge: None,
    };
    let init = quantile_init(&f, 2, cfg.delta_for(&grid)).unwrap();
    // Small but structured beta: at this scale the perimeter term is four
    // orders below the fidelity yet still steers the greedy descent out
    // of ragged local minima; the exact-data reconstruction lands at the
    // discretization floor.
    let report =
        regularization_experiment(&truth, &[0.0], |_| 1e-4, &cfg, &init, &cache, 500).unwrap();
    assert!(
        report.rows[0].l2_error < 1e-6,
        "exact-data error {}",
        report.rows[0].l2_error
    );
}
