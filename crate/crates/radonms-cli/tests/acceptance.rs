//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line with its measured numbers. Run with
//!
//! ```text
//! cargo test -p radonms-cli --test acceptance -- --nocapture
//! ```

use std::path::Path;
use std::process::Command;

use radonms::electro::{
    fidelity_equivalence, potential_from_density, verify_divergence_identity,
    verify_norm_identity,
};
use radonms::grid::{ImageGrid, ImageND};
use radonms::inversion::{
    convergence_sweep, fbp_reconstruct, RegMethod, RegularizerContext, SpectralFilterConfig,
    SpectralWindow,
};
use radonms::metrics::{image_inner, relative_l2_error, sino_inner, sino_norm};
use radonms::ms::{
    quantile_init, reconstruct_pc, regularization_experiment, stability_experiment, MSConfig,
    PCFunction, Partition, ProjectionCache,
};
use radonms::phantom::{PhantomComponent, PhantomSpec};
use radonms::radon::{
    back_project, build_dense_operator, check_range_moments, forward_project,
    ProjectionGeometry, DEFAULT_DENSE_CAP,
};
use radonms::{add_noise, NoiseConfig, Sinogram};

fn verdict(criterion: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{tag}] {name}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_adjoint_oracle() {
    // 16^2 grid, 24 angles; offsets at roughly the cell spacing.
    let grid = ImageGrid::centered(2, 16, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(24, grid.circumradius() * 1.02, 24).unwrap();
    let op = build_dense_operator(&geom, &grid, DEFAULT_DENSE_CAP).unwrap();

    // Dense matrix reproduces the matrix-free projector.
    let f_smooth = ImageND::from_fn(grid.clone(), |p| {
        (-((p[0] - 0.15).powi(2) + (p[1] + 0.1).powi(2)) / 0.1).exp()
            + 0.7 * (-((p[0] + 0.2).powi(2) + (p[1] - 0.15).powi(2)) / 0.08).exp()
    });
    let direct = forward_project(&f_smooth, &geom).unwrap();
    let via_matrix = op.apply(&f_smooth).unwrap();
    let scale = direct.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let matrix_vs_op = direct
        .values()
        .iter()
        .zip(via_matrix.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / scale;

    // Matrix-level adjoint identity through the rescaled transpose,
    // exercised on rough deterministic data.
    let mut state = 0x243f6a8885a308d3u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let f_rough =
        ImageND::from_values(grid.clone(), (0..grid.len()).map(|_| next()).collect()).unwrap();
    let g_rough = Sinogram::from_values(
        geom.clone(),
        (0..geom.n_samples()).map(|_| next()).collect(),
    )
    .unwrap();
    let lhs = sino_inner(&op.apply(&f_rough).unwrap(), &g_rough).unwrap();
    let rhs = geom.full_sphere_measure()
        * image_inner(&f_rough, &op.adjoint_back_project(&g_rough).unwrap()).unwrap();
    let matrix_defect = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());

    // Matrix-free pair on smooth data.
    let g_smooth = forward_project(
        &ImageND::from_fn(grid.clone(), |p| {
            (-((p[0] + 0.1).powi(2) + (p[1] + 0.15).powi(2)) / 0.09).exp()
        }),
        &geom,
    )
    .unwrap();
    let lhs2 = sino_inner(&forward_project(&f_smooth, &geom).unwrap(), &g_smooth).unwrap();
    let bp = back_project(&g_smooth, &grid).unwrap();
    let rhs2 = geom.full_sphere_measure() * image_inner(&f_smooth, &bp.image).unwrap();
    let pair_defect = (lhs2 - rhs2).abs() / lhs2.abs().max(rhs2.abs());

    verdict(
        1,
        "adjoint oracle",
        matrix_vs_op < 1e-12 && matrix_defect < 1e-10 && pair_defect < 1e-3,
        format!(
            "matrix vs projector {matrix_vs_op:.2e} (< 1e-12), \
             matrix-level adjoint defect {matrix_defect:.2e} (< 1e-10), \
             matrix-free pair defect {pair_defect:.2e} (< 1e-3)"
        ),
    );
}

#[test]
fn criterion_2_analytic_sinograms() {
    // Unit disk: chord length 2 sqrt(1 - X^2) within 2 cell spacings.
    let grid = ImageGrid::centered(2, 256, 1.05).unwrap();
    let h = grid.spacing()[0];
    let disk = PhantomSpec::new(vec![PhantomComponent::disk([0.0, 0.0], 1.0, 1.0)])
        .rasterize(&grid)
        .unwrap();
    let geom = ProjectionGeometry::new_2d(201, grid.circumradius() * 1.01, 12).unwrap();
    let g = forward_project(&disk, &geom).unwrap();
    let mut disk_err = 0.0f64;
    for d in 0..geom.n_directions() {
        for o in 0..geom.n_offsets() {
            let x = geom.offset(o);
            let expect = if x.abs() <= 1.0 {
                2.0 * (1.0 - x * x).sqrt()
            } else {
                0.0
            };
            disk_err = disk_err.max((g.value(d, o) - expect).abs());
        }
    }

    // Gaussian: profile sqrt(pi) exp(-X^2).
    let grid_g = ImageGrid::centered(2, 256, 4.5).unwrap();
    let gauss = ImageND::from_fn(grid_g.clone(), |p| (-(p[0] * p[0] + p[1] * p[1])).exp());
    let geom_g = ProjectionGeometry::new_2d(161, grid_g.circumradius() * 1.01, 10).unwrap();
    let gg = forward_project(&gauss, &geom_g).unwrap();
    let mut gauss_err = 0.0f64;
    for d in 0..geom_g.n_directions() {
        for o in 0..geom_g.n_offsets() {
            let x = geom_g.offset(o);
            let expect = std::f64::consts::PI.sqrt() * (-x * x).exp();
            gauss_err = gauss_err.max((gg.value(d, o) - expect).abs());
        }
    }

    verdict(
        2,
        "analytic sinograms",
        disk_err < 2.0 * h && gauss_err < 2e-3,
        format!(
            "disk max abs err {disk_err:.4} (< {:.4}), gaussian max abs err {gauss_err:.2e} (< 2e-3)",
            2.0 * h
        ),
    );
}

#[test]
fn criterion_3_inversion_formula() {
    let grid = ImageGrid::centered(2, 128, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(185, grid.circumradius() * 1.01, 180).unwrap();
    let cfg = SpectralFilterConfig::new(0.0, 0.9, SpectralWindow::Cosine).unwrap();

    let smooth = ImageND::from_fn(grid.clone(), |p| {
        (-(p[0] * p[0] + p[1] * p[1]) / 0.08).exp()
    });
    let rec = fbp_reconstruct(&forward_project(&smooth, &geom).unwrap(), &grid, &cfg).unwrap();
    let smooth_err = relative_l2_error(&rec, &smooth).unwrap();

    let pc = PhantomSpec::new(vec![
        PhantomComponent::ellipse([0.0, 0.0], [0.72, 0.56], 0.3, 1.0),
        PhantomComponent::ellipse([0.15, -0.1], [0.3, 0.2], -0.4, 0.4),
        PhantomComponent::disk([-0.25, 0.2], 0.12, -0.3),
        PhantomComponent::disk([0.3, 0.25], 0.08, 0.5),
    ])
    .rasterize(&grid)
    .unwrap();
    let rec_pc = fbp_reconstruct(&forward_project(&pc, &geom).unwrap(), &grid, &cfg).unwrap();
    let pc_err = relative_l2_error(&rec_pc, &pc).unwrap();

    verdict(
        3,
        "inversion formula round trip",
        smooth_err < 0.03 && pc_err < 0.15,
        format!("gaussian {smooth_err:.4} (< 0.03), piecewise {pc_err:.4} (< 0.15)"),
    );
}

#[test]
fn criterion_4_range_moments() {
    let grid = ImageGrid::centered(2, 128, 1.0).unwrap();
    let spec = PhantomSpec::new(vec![
        PhantomComponent::disk([0.25, -0.15], 0.4, 1.0),
        PhantomComponent::disk([-0.3, 0.25], 0.25, 0.7),
    ]);
    let f = spec.rasterize(&grid).unwrap();
    let geom = ProjectionGeometry::new_2d(161, grid.circumradius() * 1.02, 36).unwrap();
    let g = forward_project(&f, &geom).unwrap();
    let report = check_range_moments(&g, 1);
    let mass_dev = report.mass_max_rel_dev;
    let degree1 = report.fits[1].residual.unwrap();

    let noise = add_noise(
        &Sinogram::zeros(geom),
        &NoiseConfig {
            epsilon: 1.0,
            seed: 2024,
        },
    )
    .unwrap();
    let control = check_range_moments(&noise, 1).fits[1].residual.unwrap();

    verdict(
        4,
        "range moments",
        mass_dev < 1e-3 && degree1 < 1e-2 && control > 0.1,
        format!(
            "mass constancy {mass_dev:.2e} (< 1e-3), degree-1 residual {degree1:.2e} (< 1e-2), \
             white-noise control {control:.3} (> 0.1)"
        ),
    );
}

#[test]
fn criterion_5_ill_posedness() {
    let grid = ImageGrid::centered(2, 16, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(25, grid.circumradius() * 1.02, 24).unwrap();
    let op = build_dense_operator(&geom, &grid, DEFAULT_DENSE_CAP).unwrap();
    let ctx = RegularizerContext::new(op);

    // Spectrum decay: sigma_k / sigma_1 drops below 0.1 beyond a recorded
    // index (regression fixture for this geometry).
    let sv = ctx.singular_values();
    let decay_index = sv.iter().position(|&s| s < 0.1 * sv[0]).unwrap();
    let decay_ok = decay_index <= 210 && sv.windows(2).all(|w| w[0] >= w[1]);

    let f_true = ImageND::from_fn(grid, |p| {
        (-((p[0] - 0.2).powi(2) + p[1] * p[1]) / 0.12).exp()
            + 0.6 * (-((p[0] + 0.25).powi(2) + (p[1] - 0.2).powi(2)) / 0.08).exp()
    });
    let g_norm = sino_norm(&ctx.operator().apply(&f_true).unwrap());
    let eps: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|e| e * g_norm).collect();

    // gamma(eps) = eps (relative to the data norm): errors decrease
    // monotonically.
    let good = convergence_sweep(&f_true, &ctx, RegMethod::Tikhonov, &eps, |e| e / g_norm, 41)
        .unwrap();
    let good_errs: Vec<f64> = good.rows.iter().map(|r| r.relative_error).collect();
    let good_monotone = good_errs.windows(2).all(|w| w[1] < w[0]) && !good.schedule_flagged;

    // gamma(eps) = eps^3: flagged, and the error fails to converge.
    let bad = convergence_sweep(
        &f_true,
        &ctx,
        RegMethod::Tikhonov,
        &eps,
        |e| (e / g_norm).powi(3),
        41,
    )
    .unwrap();
    let bad_errs: Vec<f64> = bad.rows.iter().map(|r| r.relative_error).collect();
    let bad_fails = bad.schedule_flagged
        && bad_errs.last().unwrap() > &(5.0 * good_errs.last().unwrap());

    verdict(
        5,
        "ill-posedness and regularization",
        decay_ok && good_monotone && bad_fails,
        format!(
            "decay index {decay_index} (<= 210), schedule errors {good_errs:.4?} decreasing, \
             cubic control {bad_errs:.3?} non-convergent"
        ),
    );
}

#[test]
fn criterion_6_electrostatics() {
    // Point-charge far field: log-log slope of the potential.
    let grid = ImageGrid::centered(3, 32, 1.0).unwrap();
    let h = grid.spacing()[0];
    let s = 2.5 * h;
    let blob = ImageND::from_fn(grid.clone(), |p| {
        (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (s * s)).exp()
    });
    let phi = potential_from_density(&blob).unwrap();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut idx = [0usize; 3];
    let mut p = [0.0f64; 3];
    for flat in 0..grid.len() {
        grid.unflat(flat, &mut idx);
        grid.center_of_flat(flat, &mut p);
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r > 4.0 * s && r < 0.85 {
            pts.push((r.ln(), phi.values()[flat].ln()));
        }
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|q| q.0).sum();
    let sy: f64 = pts.iter().map(|q| q.1).sum();
    let sxx: f64 = pts.iter().map(|q| q.0 * q.0).sum();
    let sxy: f64 = pts.iter().map(|q| q.0 * q.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let slope_ok = (slope + 1.0).abs() < 0.05;

    // Norm identity at 32^3 / 256 directions, decreasing under
    // refinement of the direction quadrature.
    let gauss = ImageND::from_fn(grid.clone(), |p| {
        (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 0.0225).exp()
    });
    let geom_of = |nd: usize| {
        let x_max = 2.5 * 3.0f64.sqrt() * 1.02;
        let n_off = (((2.0 * x_max / h).round() as usize) | 1).max(3);
        ProjectionGeometry::fibonacci_3d(n_off, x_max, nd).unwrap()
    };
    let norm_fine = verify_norm_identity(&gauss, &geom_of(256), 1.5).unwrap();
    let norm_coarse = verify_norm_identity(&gauss, &geom_of(128), 1.5).unwrap();
    let norm_ok =
        norm_fine.rel_mismatch < 0.10 && norm_fine.rel_mismatch < norm_coarse.rel_mismatch;

    // Source identities at 48^3.
    let grid48 = ImageGrid::centered(3, 48, 1.0).unwrap();
    let gauss48 = ImageND::from_fn(grid48, |p| {
        (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 0.0625).exp()
    });
    let div = verify_divergence_identity(&gauss48).unwrap();
    let div_ok = div.laplacian_residual < 0.05
        && div.divergence_residual < 0.05
        && div.stencil_gap < 1e-10;

    // Fidelity equivalence, decreasing under refinement.
    let fid_of = |nn: usize, nd: usize| {
        let grid = ImageGrid::centered(3, nn, 1.0).unwrap();
        let h = grid.spacing()[0];
        let f = ImageND::from_fn(grid.clone(), |p| {
            (-((p[0] - 0.12).powi(2) + p[1] * p[1] + (p[2] + 0.05).powi(2)) / 0.03).exp()
        });
        let f0 = ImageND::from_fn(grid.clone(), |p| {
            (-((p[0] + 0.1).powi(2) + (p[1] - 0.08).powi(2) + p[2] * p[2]) / 0.03).exp()
        });
        let x_max = 2.0 * 3.0f64.sqrt() * 1.02;
        let n_off = (((2.0 * x_max / h).round() as usize) | 1).max(3);
        let geom = ProjectionGeometry::fibonacci_3d(n_off, x_max, nd).unwrap();
        let g = forward_project(&f0, &geom).unwrap();
        fidelity_equivalence(&f, &g, 1.0).unwrap().rel_gap
    };
    let fid_fine = fid_of(32, 256);
    let fid_coarse = fid_of(24, 144);
    let fid_ok = fid_fine < 0.10 && fid_fine < fid_coarse;

    verdict(
        6,
        "electrostatic identities",
        slope_ok && norm_ok && div_ok && fid_ok,
        format!(
            "far-field slope {slope:.3} (-1 +- 0.05), \
             norm mismatch {:.3} (< 0.10, refine {:.3}), \
             source residuals {:.3}/{:.3} (< 0.05), \
             fidelity gap {fid_fine:.4} (< 0.10, refine {fid_coarse:.3})",
            norm_fine.rel_mismatch,
            norm_coarse.rel_mismatch,
            div.laplacian_residual,
            div.divergence_residual
        ),
    );
}

#[test]
fn criterion_7_ms_piecewise_constant() {
    // Exact recovery on 64^2 with 90 angles from an FBP warm start.
    let grid = ImageGrid::centered(2, 64, 1.0).unwrap();
    let geom = ProjectionGeometry::new_2d(93, grid.circumradius() * 1.02, 90).unwrap();
    let cache = ProjectionCache::build(&grid, &geom).unwrap();
    let spec = PhantomSpec::new(vec![PhantomComponent::ellipse(
        [0.05, -0.1],
        [0.45, 0.3],
        0.5,
        0.8,
    )]);
    let mut f = spec.rasterize(&grid).unwrap();
    for v in f.values_mut() {
        *v += 0.2;
    }
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
    let monotone = rec.trace.windows(2).all(|w| w[1].total <= w[0].total);
    let truth: Vec<u32> = f
        .values()
        .iter()
        .map(|&v| if v > 0.5 { 1 } else { 0 })
        .collect();
    let hi = if rec.pc.values[0] > rec.pc.values[1] { 0u32 } else { 1 };
    let frac = rec
        .pc
        .partition
        .labels()
        .iter()
        .zip(&truth)
        .filter(|(&l, &t)| (l == hi) == (t == 1))
        .count() as f64
        / grid.len() as f64;
    let (lo_val, hi_val) = if hi == 0 {
        (rec.pc.values[1], rec.pc.values[0])
    } else {
        (rec.pc.values[0], rec.pc.values[1])
    };
    let values_ok = (lo_val - 0.2).abs() / 0.2 < 0.01 && (hi_val - 1.0).abs() < 0.01;
    let recovery_ok = rec.converged && monotone && frac >= 0.99 && values_ok;

    // Stability: shrinking-noise reconstructions settle.
    let grid48 = ImageGrid::centered(2, 48, 1.0).unwrap();
    let geom48 = ProjectionGeometry::new_2d(69, grid48.circumradius() * 1.02, 60).unwrap();
    let cache48 = ProjectionCache::build(&grid48, &geom48).unwrap();
    let mut f48 = PhantomSpec::new(vec![PhantomComponent::ellipse(
        [0.05, -0.1],
        [0.45, 0.3],
        0.5,
        0.8,
    )])
    .rasterize(&grid48)
    .unwrap();
    for v in f48.values_mut() {
        *v += 0.2;
    }
    let g48 = forward_project(&f48, &geom48).unwrap();
    let gn48 = sino_norm(&g48);
    let cfg48 = MSConfig {
        beta: 1e-3,
        m: 2,
        delta: None,
        max_outer_iters: 200,
        sweep_seed: 3,
        value_solver_ridge: None,
    };
    let init48 = quantile_init(&f48, 2, cfg48.delta_for(&grid48)).unwrap();
    let data: Vec<_> = (0..4)
        .map(|n| {
            add_noise(
                &g48,
                &NoiseConfig {
                    epsilon: 0.1 * 0.5f64.powi(n) * gn48,
                    seed: 100 + n as u64,
                },
            )
            .unwrap()
        })
        .collect();
    let stability = stability_experiment(&data, &g48, &cfg48, &init48, &cache48).unwrap();
    let vdists: Vec<f64> = stability
        .rows
        .iter()
        .filter_map(|r| r.value_dist_prev)
        .collect();
    let ldists: Vec<f64> = stability.rows.iter().map(|r| r.label_dist_ref).collect();
    let stability_ok = vdists.windows(2).all(|w| w[1] <= w[0])
        && ldists.windows(2).all(|w| w[1] <= w[0]);

    // Regularization schedule vs negative control on a limited-angle
    // geometry, where the perimeter weight has teeth.
    let geom10 = ProjectionGeometry::new_2d(69, grid48.circumradius() * 1.02, 10).unwrap();
    let cache10 = ProjectionCache::build(&grid48, &geom10).unwrap();
    let truth48 = PCFunction::new(
        Partition::new(
            f48.values()
                .iter()
                .map(|&v| if v > 0.5 { 1 } else { 0 })
                .collect(),
            2,
            4.0 * grid48.cell_volume(),
        )
        .unwrap(),
        vec![0.2, 1.0],
    )
    .unwrap();
    let g10 = cache10.project_image(&f48).unwrap();
    let gn10 = sino_norm(&g10);
    let eps: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|e| e * gn10).collect();
    let e0 = eps[0];
    let c = 0.003;
    let good =
        regularization_experiment(&truth48, &eps, |e| c * e, &cfg48, &init48, &cache10, 500)
            .unwrap();
    let bad = regularization_experiment(
        &truth48,
        &eps,
        |e| c * e * e / e0,
        &cfg48,
        &init48,
        &cache10,
        500,
    )
    .unwrap();
    let ge: Vec<f64> = good.rows.iter().map(|r| r.l2_error).collect();
    let be: Vec<f64> = bad.rows.iter().map(|r| r.l2_error).collect();
    let sched_ok = !good.schedule_flagged
        && bad.schedule_flagged
        && ge.windows(2).all(|w| w[1] < w[0])
        && be.last().unwrap() > &(3.0 * ge.last().unwrap());

    verdict(
        7,
        "piecewise-constant reconstruction",
        recovery_ok && stability_ok && sched_ok,
        format!(
            "recovery {:.1}% cells, values ({lo_val:.4}, {hi_val:.4}), trace monotone {monotone}; \
             stability value dists {vdists:?}, label dists {ldists:?}; \
             schedule errors {ge:.3?} vs control {be:.3?}",
            100.0 * frac
        ),
    );
}

#[test]
fn criterion_8_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_radonms");
    let run_all = |dir: &Path| {
        let spec = dir.join("spec.json");
        std::fs::write(
            &spec,
            r#"[{"center": [0.1, -0.05], "semi_axes": [0.5, 0.35], "angle": 0.4, "value": 1.0}]"#,
        )
        .unwrap();
        let run = |args: &[&str]| {
            let out = Command::new(bin)
                .current_dir(dir)
                .args(args)
                .output()
                .expect("spawn radonms");
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let mut transcripts = Vec::new();
        transcripts.push(run(&[
            "phantom", "--spec", "spec.json", "--grid", "48", "--out", "f.csv", "--pgm",
        ]));
        transcripts.push(run(&[
            "project", "--in", "f.csv", "--angles", "40", "--out", "g.csv",
        ]));
        transcripts.push(run(&[
            "noise", "--in", "g.csv", "--epsilon", "0.05", "--relative", "--seed", "9",
            "--out", "gn.csv",
        ]));
        transcripts.push(run(&[
            "fbp", "--in", "gn.csv", "--grid", "48", "--out", "rec.csv", "--compare", "f.csv",
        ]));
        transcripts.push(run(&[
            "mspc", "--in", "gn.csv", "--grid", "32", "--m", "2", "--beta", "1e-3", "--seed",
            "5", "--out", "labels.csv", "--trace", "trace.csv",
        ]));
        transcripts.push(run(&[
            "sweep", "--grid", "12", "--angles", "14", "--out", "sweep.csv", "--seed", "21",
        ]));
        transcripts
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let out_a = run_all(dir_a.path());
    let out_b = run_all(dir_b.path());
    assert_eq!(out_a, out_b, "stdout summaries differ between runs");

    let artifacts = [
        "f.csv", "f.pgm", "g.csv", "gn.csv", "rec.csv", "labels.csv", "trace.csv", "sweep.csv",
    ];
    let mut all_equal = true;
    for name in artifacts {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        if a != b {
            all_equal = false;
            println!("artifact {name} differs between identical runs");
        }
    }
    verdict(
        8,
        "CLI determinism",
        all_equal,
        format!(
            "{} artifacts byte-identical across repeated seeded runs",
            artifacts.len()
        ),
    );
}
