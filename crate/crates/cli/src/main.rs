//! `conewedge`: reproducible runs of the cone-edge Gibbons–Hawking computations.
//!
//! Every subcommand writes a CSV table and a JSON summary carrying the full
//! parameter set. Exit codes: 0 success, 1 usage or evaluation error, 2 when
//! `--check` finds a tolerance breach.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod sampling;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conewedge::Complex64;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "conewedge", version, about = "Gibbons–Hawking metrics with a cone edge: numerical runs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Cone angle parameter, 0 < β ≤ 1.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub beta: f64,
    /// Potential; defaults to reflection when 1/β is an integer, series otherwise.
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Constant `c` of the Taub-NUT potential 2c + 1/(2β|x|).
    #[arg(long = "tn-c", global = true, default_value_t = 0.5)]
    pub tn_c: f64,
    /// Tolerance for `--check`; each run has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Existing directory for `<run>.csv` and `<run>.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 if a checked quantity misses its tolerance.
    #[arg(long, global = true)]
    pub check: bool,
    /// Seed of random sample grids.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Size of random sample grids (used when no --point is given).
    #[arg(long, global = true, default_value_t = 50)]
    pub samples: usize,
    /// Worker threads.
    #[arg(long, global = true, env = "CONEWEDGE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Series,
    Reflection,
    Flat,
    Taubnut,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Green's function Γ = f/2π and the smooth part F at points.
    Greens {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec<[f64; 3]>,
    },
    /// Translation, rotation, scaling and symmetry identities; positivity of F.
    Identities,
    /// The metric in the frame (∂r, ∂θ, ∂s, ∂t) and its invariants.
    Metric {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec<[f64; 3]>,
    },
    /// Residual of dα = −⋆df.
    Bogomolony {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec<[f64; 3]>,
    },
    /// Holomorphic chart (z, w).
    Chart {
        #[command(subcommand)]
        op: ChartOp,
    },
    /// Curvature block c_ij and the energy density.
    Curvature {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec<[f64; 3]>,
    },
    /// Total energy against 8π²(1 − β²).
    Energy {
        #[command(subcommand)]
        route: Option<EnergyRoute>,
    },
    /// Deviation from the model metric along a ray, with a log-log fit.
    Decay {
        #[arg(long, default_value_t = 50.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 2000.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Polar angle of the ray from the s-axis.
        #[arg(long, default_value_t = FRAC_PI_4)]
        polar: f64,
        #[arg(long, default_value_t = FRAC_PI_3, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Edge exponents of the angular modes of f.
    Modes {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 0.25)]
        r_max: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Closed-form reference geometries.
    Models {
        #[command(subcommand)]
        model: ModelOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChartOp {
    /// (r, θ, s, t) ↦ (z, w), with the round-trip error.
    Forward {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec<[f64; 3]>,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        t: f64,
    },
    /// (z, w) ↦ (r, θ, s, t).
    Invert {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
    },
    /// Jacobian and volume-density identities.
    Volcheck,
    /// Coefficients of ω in the frame (ε, dz₂) approaching the edge.
    Conecoef {
        #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-6)]
        r_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        r_max: f64,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyRoute {
    /// Boundary fluxes (default).
    Flux,
    /// Volume quadrature of |Rm|².
    Quad,
    /// Both routes.
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EhForm {
    Consistent,
    Unweighted,
}

#[derive(Subcommand, Debug)]
pub enum ModelOp {
    /// Taub-NUT chart round trip and the LeBrun potential (uses --tn-c).
    Taubnut,
    /// Eguchi–Hanson potential at β = 1/2.
    Eh {
        #[arg(long, value_enum, default_value_t = EhForm::Consistent)]
        potential: EhForm,
    },
    /// Series against reflection metric tensors for β = 1/n.
    Quotient,
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        bail!("expected {N} comma-separated numbers, got {:?}", s);
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| anyhow::anyhow!("not a number: {p:?}"))?;
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<[f64; 3]> {
    parse_floats::<3>(s)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let [re, im] = parse_floats::<2>(s)?;
    Ok(Complex64::new(re, im))
}

/// Errors that are the caller's fault rather than the computation's.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            if e.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {e:#}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(1)
        }
    }
}
