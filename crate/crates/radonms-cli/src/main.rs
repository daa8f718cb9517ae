//! Command-line front end: phantoms, projection, noise, reconstruction
//! and the verification suites, as reproducible file-to-file runs.
//!
//! Every command is a pure function of its configuration, input files and
//! seed; artifacts are written atomically and a one-line JSON summary
//! goes to standard output. Exit codes: 0 success, 1 runtime fault,
//! 2 configuration or parse error, 3 numerical verification failure.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "radonms", version, about = "Desk-scale tomography toolkit")]
struct Cli {
    /// RNG seed (fallback: RADONMS_SEED environment variable, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (fallback: RADONMS_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rasterize a phantom spec (JSON list of ellipse components).
    Phantom {
        /// Phantom spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Cells per axis.
        #[arg(long)]
        grid: usize,
        /// Dimension (2 or 3).
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Half extent of the grid per axis.
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        /// Output image CSV.
        #[arg(long)]
        out: PathBuf,
        /// Also write an 8-bit PGM preview next to the CSV.
        #[arg(long)]
        pgm: bool,
    },

    /// Forward-project an image CSV to a sinogram CSV.
    Project {
        #[arg(long, value_name = "IMAGE_CSV")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Uniform 2D angle count.
        #[arg(long)]
        angles: Option<usize>,
        /// 3D Fibonacci hemisphere direction count.
        #[arg(long)]
        dirs: Option<usize>,
        /// Offset count (default: about one per cell spacing).
        #[arg(long)]
        offsets: Option<usize>,
        /// Offset range bound (default: 1.02 x grid circumradius).
        #[arg(long)]
        xmax: Option<f64>,
        /// Geometry JSON overriding the flags above.
        #[arg(long)]
        geometry: Option<PathBuf>,
    },

    /// Add calibrated Gaussian noise to a sinogram.
    Noise {
        #[arg(long, value_name = "SINO_CSV")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Target L2 data-error level.
        #[arg(long)]
        epsilon: f64,
        /// Interpret epsilon as a fraction of the data norm.
        #[arg(long)]
        relative: bool,
    },

    /// Filtered back-projection reconstruction.
    Fbp {
        #[arg(long, value_name = "SINO_CSV")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cells per axis of the reconstruction grid.
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        /// Reconstruction config JSON ({"band_fraction", "window",
        /// "margin", "prefiltered"}); explicit flags win over it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Band cutoff as a fraction of Nyquist (default 0.9).
        #[arg(long)]
        band: Option<f64>,
        /// Taper above the cutoff: cosine or none (default cosine).
        #[arg(long)]
        window: Option<String>,
        /// Filter the profiles before back-projecting instead of after.
        #[arg(long)]
        prefiltered: bool,
        /// Padding margin for the spectral step (>= 0.25).
        #[arg(long)]
        margin: Option<f64>,
        /// Reference image CSV; adds relative_l2_error to the summary.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        pgm: bool,
    },

    /// Piecewise-constant reconstruction by alternating minimization.
    Mspc {
        #[arg(long, value_name = "SINO_CSV")]
        r#in: PathBuf,
        /// Output labels CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
        /// Reconstruction config JSON (the MSConfig schema); explicit
        /// flags win over it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Region count.
        #[arg(long)]
        m: Option<usize>,
        /// Perimeter weight.
        #[arg(long)]
        beta: Option<f64>,
        /// Nondegeneracy bound (default: 4 cell volumes).
        #[arg(long)]
        delta: Option<f64>,
        /// Outer iteration budget (default 300).
        #[arg(long)]
        iters: Option<usize>,
        /// Value-fit ridge (default: 1e-10 trace(G)/m).
        #[arg(long)]
        ridge: Option<f64>,
        /// Initial labels CSV (default: warm start from a filtered
        /// back-projection split at rank quantiles).
        #[arg(long)]
        init: Option<PathBuf>,
        /// Energy trace CSV (step, fidelity, perimeter, total).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Region values JSON.
        #[arg(long)]
        values_out: Option<PathBuf>,
        #[arg(long)]
        pgm: bool,
    },

    /// Check the offset-moment range conditions of a sinogram.
    VerifyRange {
        #[arg(long, value_name = "SINO_CSV")]
        r#in: PathBuf,
        #[arg(long, default_value_t = 2)]
        kmax: usize,
        /// Bound on the homogeneous-fit residuals for degrees >= 1.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Bound on the degree-0 mass-constancy defect.
        #[arg(long, default_value_t = 1e-3)]
        mass_tol: f64,
        /// Report JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run the 3D electrostatic identity suite on built-in fixtures.
    VerifyElectro {
        /// Charge grid cells per axis.
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Hemisphere direction count.
        #[arg(long, default_value_t = 256)]
        dirs: usize,
        /// Grid for the source-identity checks.
        #[arg(long, default_value_t = 48)]
        divergence_n: usize,
        /// Norm-identity mismatch tolerance.
        #[arg(long, default_value_t = 0.10)]
        norm_tol: f64,
        /// Source-identity residual tolerance.
        #[arg(long, default_value_t = 0.05)]
        divergence_tol: f64,
        /// Fidelity-equivalence gap tolerance.
        #[arg(long, default_value_t = 0.10)]
        fidelity_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Singular spectrum and family norms of the dense operator.
    Spectrum {
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 24)]
        angles: usize,
        #[arg(long)]
        offsets: Option<usize>,
        /// Comma-separated regularization parameters.
        #[arg(long, default_value = "1e-6,1e-5,1e-4,1e-3,1e-2,1e-1")]
        gammas: String,
        /// Singular-value CSV (k, sigma_k).
        #[arg(long)]
        out: PathBuf,
        /// Family-norm CSV (gamma, truncated_svd, tikhonov).
        #[arg(long)]
        norms_out: Option<PathBuf>,
    },

    /// Noise-vs-regularization convergence sweep on a built-in fixture.
    Sweep {
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 24)]
        angles: usize,
        #[arg(long)]
        offsets: Option<usize>,
        /// truncated-svd or tikhonov.
        #[arg(long, default_value = "tikhonov")]
        method: String,
        /// Comma-separated noise levels, as fractions of the data norm.
        #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
        eps: String,
        /// Parameter schedule: eps, eps2 or eps3 (power of the relative
        /// noise level).
        #[arg(long, default_value = "eps")]
        schedule: String,
        /// Sweep table CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("RADONMS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let seed = cli.seed.unwrap_or_else(|| {
        std::env::var("RADONMS_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    });

    match commands::run(cli.command, seed) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("radonms: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
