//! Resource sweeps: two-qubit depth and gate counts per encoding and problem size.
//!
//! Advection uses upwind differences with the warped-phase pipeline. The Trotter
//! number comes from the dense single-step error of the 1D problem restricted to the
//! code space, doubled for two independent axes. The depth of `r` steps is extrapolated
//! linearly from circuits with one and two steps.
//!
//! The nonlinear model uses the diagonal level-set generator, exact in one step.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::circuits::resources::{search_trotter_number, warped_step_error, RestrictedFragment};
use crate::circuits::{
    compile, inverse_qft, laplace_prep, parallelize_controlled, qft, resource_report, trotter_fragment_circuit, Circuit, Preset,
    ProductFormula, ResourceReport,
};
use crate::discretize::{fourier_frequencies, upwind, Grid1D};
use crate::dynamics::SchrodConfig;
use crate::embed::{codewords, tridiagonal_fragments, EncodingScheme};
use crate::error::{Error, Result};
use crate::experiments::levelset::{levelset_evolution, LevelsetConfig};
use crate::linalg::CMatrix;
use crate::pauli::PauliSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Advection,
    Nonlinear,
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "advection" => Ok(Model::Advection),
            "nonlinear" => Ok(Model::Nonlinear),
            _ => Err(Error::Parse(format!("unknown model '{s}' (expected advection or nonlinear)"))),
        }
    }
}

/// Compilation preset with or without control fan-out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Variant {
    pub preset: Preset,
    pub parallel: bool,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant { preset: Preset::Cx, parallel: false },
        Variant { preset: Preset::Rxx, parallel: false },
        Variant { preset: Preset::Cx, parallel: true },
        Variant { preset: Preset::Rxx, parallel: true },
    ];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.preset, if self.parallel { "+parallel" } else { "" })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceConfig {
    pub model: Model,
    pub sizes: Vec<usize>,
    pub encodings: Vec<EncodingScheme>,
    pub variants: Vec<Variant>,
    pub eps: f64,
    pub t: f64,
    pub n_p: usize,
    pub half_width: f64,
    /// Qubits per spatial axis of the nonlinear model.
    pub n_x: usize,
}

impl ResourceConfig {
    pub fn advection() -> Self {
        ResourceConfig {
            model: Model::Advection,
            sizes: vec![8, 16, 32],
            encodings: vec![EncodingScheme::StdBinary, EncodingScheme::OneHot, EncodingScheme::Unary],
            variants: Variant::ALL.to_vec(),
            eps: 5e-2,
            t: 0.5,
            n_p: 6,
            half_width: 4.0,
            n_x: 5,
        }
    }

    pub fn nonlinear() -> Self {
        ResourceConfig { model: Model::Nonlinear, t: 0.25, sizes: vec![8, 16, 32], ..Self::advection() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.iter().any(|&n| !(8..=256).contains(&n)) {
            return Err(Error::invalid("sizes must lie in 8..=256"));
        }
        if !(self.eps > 0.0) || !(self.t > 0.0) || !(self.half_width > 0.0) || self.n_p < 2 || self.n_x == 0 {
            return Err(Error::invalid("resource parameters must be positive, with at least 2 auxiliary qubits"));
        }
        if self.encodings.contains(&EncodingScheme::CircUnary) && self.model == Model::Advection {
            return Err(Error::invalid("the upwind operator is not circulant; circunary does not apply"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceRow {
    pub encoding: EncodingScheme,
    pub n: usize,
    pub variant: Variant,
    /// Trotter steps behind the counts (1 for the nonlinear model).
    pub steps: usize,
    pub report: ResourceReport,
}

pub const RESOURCE_CSV_HEADER: &str = "encoding,N,depth2q,count2q,count1q,preset";

pub fn resource_csv(rows: &[ResourceRow]) -> String {
    let mut out = format!("{RESOURCE_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.encoding, r.n, r.report.depth_2q, r.report.count_2q, r.report.count_1q, r.variant
        ));
    }
    out
}

/// Least-squares exponent of `depth ∝ N^k` over the rows of one encoding and variant.
pub fn depth_exponent(rows: &[ResourceRow], encoding: EncodingScheme, variant: Variant) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.encoding == encoding && r.variant == variant && r.report.depth_2q > 0)
        .map(|r| ((r.n as f64).ln(), (r.report.depth_2q as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn lower(c: &Circuit, v: Variant, controls: &[usize], targets: &[usize]) -> Result<ResourceReport> {
    let c = if v.parallel { parallelize_controlled(c, controls, targets)? } else { c.clone() };
    resource_report(&compile(&c, v.preset)?)
}

struct Upwind1d {
    h1: Vec<PauliSum>,
    h2: Vec<PauliSum>,
    q: usize,
}

fn upwind_1d(enc: EncodingScheme, n: usize) -> Result<Upwind1d> {
    let grid = Grid1D::inflow(0.0, 1.0, n)?;
    let (h1, h2) = upwind(&grid, |_| 1.0)?.cartesian();
    Ok(Upwind1d { h1: tridiagonal_fragments(enc, &h1)?, h2: tridiagonal_fragments(enc, &h2)?, q: enc.qubits(n) })
}

/// Trotter number for the 2D warped-phase evolution at error `eps`.
pub fn advection_trotter_number(enc: EncodingScheme, n: usize, cfg: &ResourceConfig, formula: &ProductFormula) -> Result<usize> {
    let ops = upwind_1d(enc, n)?;
    let sub = codewords(enc, n)?.subspace();
    let restrict = |frags: &[PauliSum]| -> Result<(Vec<RestrictedFragment>, CMatrix)> {
        let mats = frags.iter().map(|f| sub.restrict(f)).collect::<Result<Vec<_>>>()?;
        let total = mats.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m);
        Ok((mats.iter().map(RestrictedFragment::dense).collect(), total))
    };
    let (f1, d1) = restrict(&ops.h1)?;
    let (f2, d2) = restrict(&ops.h2)?;
    let mut xis = SchrodConfig::new(cfg.n_p, cfg.half_width).hf_diagonal();
    xis.sort_by(f64::total_cmp);
    xis.dedup();
    search_trotter_number(cfg.eps, |r| {
        let tau = cfg.t / r as f64;
        Ok(2.0 * r as f64 * warped_step_error(&f1, &d1, &f2, &d2, &xis, tau, formula))
    })
}

/// Warped-phase circuit for 2D upwind advection with `r` steps: `p` low, then `x`, then `y`.
pub fn advection_schrod_circuit(enc: EncodingScheme, n: usize, cfg: &ResourceConfig, r: usize, formula: &ProductFormula) -> Result<Circuit> {
    let ops = upwind_1d(enc, n)?;
    let (np, q) = (cfg.n_p, ops.q);
    let total = np + 2 * q;
    let hf = fourier_frequencies(np).scale_real(std::f64::consts::PI / cfg.half_width);
    let id = PauliSum::identity(np, -1.0);
    let both = |f: &PauliSum, aux: &PauliSum| -> PauliSum {
        let u = 2 * q;
        let x = f.place(0, u).tensor(aux);
        let y = f.place(q, u).tensor(aux);
        debug_assert_eq!(x.n_qubits(), total);
        &x + &y
    };
    let frags: Vec<PauliSum> = ops.h1.iter().map(|f| both(f, &hf)).chain(ops.h2.iter().map(|f| both(f, &id))).collect();
    let mut c = Circuit::new(total).with_register("p", 0, np).with_register("x", np, q).with_register("y", np + q, q);
    c.append_at(&laplace_prep(np, cfg.half_width)?, 0);
    c.append_at(&inverse_qft(np), 0);
    c.append(&trotter_fragment_circuit(&frags, cfg.t, formula, r)?);
    c.append_at(&qft(np), 0);
    Ok(c)
}

fn advection_rows(enc: EncodingScheme, n: usize, cfg: &ResourceConfig) -> Result<Vec<ResourceRow>> {
    let formula = ProductFormula::second_order();
    let r = advection_trotter_number(enc, n, cfg, &formula)?;
    let one = advection_schrod_circuit(enc, n, cfg, 1, &formula)?;
    let two = advection_schrod_circuit(enc, n, cfg, 2, &formula)?;
    let controls: Vec<usize> = (0..cfg.n_p).collect();
    let targets: Vec<usize> = (cfg.n_p..one.n_qubits).collect();
    let extend = |a: usize, b: usize| a + (r - 1) * (b - a);
    cfg.variants
        .iter()
        .map(|&v| {
            let (a, b) = (lower(&one, v, &controls, &targets)?, lower(&two, v, &controls, &targets)?);
            let report = ResourceReport {
                depth_2q: extend(a.depth_2q, b.depth_2q),
                count_2q: extend(a.count_2q, b.count_2q),
                count_1q: extend(a.count_1q, b.count_1q),
            };
            Ok(ResourceRow { encoding: enc, n, variant: v, steps: r, report })
        })
        .collect()
}

fn nonlinear_rows(enc: EncodingScheme, n_q: usize, cfg: &ResourceConfig) -> Result<Vec<ResourceRow>> {
    let lcfg = LevelsetConfig { n_x: cfg.n_x, n_q, t: cfg.t, encoding: enc, ..LevelsetConfig::default() };
    let c = levelset_evolution(&lcfg)?;
    let controls: Vec<usize> = (0..2 * cfg.n_x).collect();
    let targets: Vec<usize> = (2 * cfg.n_x..c.n_qubits).collect();
    cfg.variants
        .iter()
        .map(|&v| Ok(ResourceRow { encoding: enc, n: n_q, variant: v, steps: 1, report: lower(&c, v, &controls, &targets)? }))
        .collect()
}

/// All rows, ordered by encoding then size then variant.
pub fn run_resources(cfg: &ResourceConfig) -> Result<Vec<ResourceRow>> {
    cfg.validate()?;
    let cells: Vec<(EncodingScheme, usize)> =
        cfg.encodings.iter().flat_map(|&e| cfg.sizes.iter().map(move |&n| (e, n))).collect();
    let rows: Vec<Vec<ResourceRow>> = cells
        .par_iter()
        .map(|&(e, n)| match cfg.model {
            Model::Advection => advection_rows(e, n, cfg),
            Model::Nonlinear => nonlinear_rows(e, n, cfg),
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
