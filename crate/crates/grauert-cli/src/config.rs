//! Resolved run configuration: defaults, then the config file, then flags.

use crate::{parse_kernel, read_config_file, Overrides};
use anyhow::{bail, Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelChoice {
    Smoothed,
    Toeplitz,
    Both,
}

/// Fully resolved parameters, echoed verbatim into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: String,
    pub dim: usize,
    pub tau: f64,
    pub eps: f64,
    pub lambda_grid: Vec<f64>,
    pub rho: f64,
    pub kernel: KernelChoice,
    pub out: PathBuf,
    pub seed: u64,
    /// Relative certified-tail budget for kernel windows.
    pub tail_rel: f64,
    /// Chart base point (x, y) on the boundary.
    pub base_x: Vec<f64>,
    pub base_y: Vec<f64>,
}

impl RunConfig {
    pub fn resolve(config_path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut model = "torus".to_string();
        let mut dim = 2usize;
        let mut tau = 0.5f64;
        let mut eps = 2.0f64;
        let mut lambda_grid = vec![50.0, 71.0, 100.0, 141.0, 200.0, 283.0, 400.0];
        let mut rho = 0.8f64;
        let mut kernel = KernelChoice::Both;
        let mut out = PathBuf::from("out");
        let mut seed = 0u64;
        let mut tail_rel = 1e-8f64;
        let mut base: Option<(Vec<f64>, Vec<f64>)> = None;

        if let Some(path) = config_path {
            for (key, value) in read_config_file(path)? {
                match key.as_str() {
                    "model" => model = value,
                    "dim" => dim = value.parse().context("dim")?,
                    "tau" => tau = value.parse().context("tau")?,
                    "eps" => eps = value.parse().context("eps")?,
                    "lambda_grid" => lambda_grid = parse_list(&value)?,
                    "rho" => rho = value.parse().context("rho")?,
                    "kernel" => kernel = parse_kernel(&value)?,
                    "out" => out = PathBuf::from(value),
                    "seed" => seed = value.parse().context("seed")?,
                    "tail_rel" => tail_rel = value.parse().context("tail_rel")?,
                    "base_x" => {
                        let x = parse_list(&value)?;
                        base = Some((x, base.map(|b| b.1).unwrap_or_default()));
                    }
                    "base_y" => {
                        let y = parse_list(&value)?;
                        base = Some((base.map(|b| b.0).unwrap_or_default(), y));
                    }
                    other => bail!("unknown config key '{other}'"),
                }
            }
        }
        if let Some(v) = &overrides.model {
            model = v.clone();
        }
        if let Some(v) = overrides.dim {
            dim = v;
        }
        if let Some(v) = overrides.tau {
            tau = v;
        }
        if let Some(v) = overrides.eps {
            eps = v;
        }
        if let Some(v) = &overrides.lambda_grid {
            lambda_grid = parse_list(v)?;
        }
        if let Some(v) = overrides.rho {
            rho = v;
        }
        if let Some(v) = &overrides.kernel {
            kernel = parse_kernel(v)?;
        }
        if let Some(v) = &overrides.out {
            out = v.clone();
        }
        if let Some(v) = overrides.seed {
            seed = v;
        }

        match model.as_str() {
            "circle" => dim = 1,
            "torus" => {}
            other => bail!("unknown model '{other}' (circle | torus)"),
        }
        if dim == 0 {
            bail!("dim must be at least 1");
        }
        if !(tau > 0.0) {
            bail!("tau must be positive");
        }
        let (base_x, base_y) = match base {
            Some((x, y)) if x.len() == dim && y.len() == dim => (x, y),
            Some(_) => bail!("base_x/base_y must both have {dim} entries"),
            None => default_base(dim, tau),
        };
        Ok(Self {
            model,
            dim,
            tau,
            eps,
            lambda_grid,
            rho,
            kernel,
            out,
            seed,
            tail_rel,
            base_x,
            base_y,
        })
    }
}

fn default_base(dim: usize, tau: f64) -> (Vec<f64>, Vec<f64>) {
    let x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    if dim == 1 {
        y[0] = tau;
    } else {
        // a direction transverse to every lattice axis
        y[0] = 0.6 * tau;
        y[1] = 0.8 * tau;
    }
    (x, y)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("parsing '{p}'"))
        })
        .collect()
}
