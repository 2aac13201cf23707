//! Every verification exposed as a chain report.

use std::sync::Arc;

use affine_hls::geometry::{check_dual_mixed_inequality, SphereGrid};
use affine_hls::hls::{
    check_representation_identity, riesz_rearrangement_check, verify_corollary_sconcave, verify_theorem_1_1,
    verify_theorem_1_2, verify_theorem_1_3,
};
use affine_hls::quad::Estimate;
use affine_hls::report::{ChainReport, Direction};
use affine_hls::salpha::{check_correlation_closed_forms, check_inclusion_monotone, check_sn_volume_identity};
use affine_hls::specialfns::{gamma_fn, Concavity, HlsParams};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{config_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Chain {
    #[value(name = "thm11")]
    #[serde(rename = "thm11")]
    Thm11,
    #[value(name = "thm12")]
    #[serde(rename = "thm12")]
    Thm12,
    #[value(name = "thm13")]
    #[serde(rename = "thm13")]
    Thm13,
    #[value(name = "corollary-s")]
    #[serde(rename = "corollary-s")]
    CorollaryS,
    #[value(name = "riesz")]
    #[serde(rename = "riesz")]
    Riesz,
    #[value(name = "identity-3a")]
    #[serde(rename = "identity-3a")]
    Identity3a,
    #[value(name = "identity-3b")]
    #[serde(rename = "identity-3b")]
    Identity3b,
    #[value(name = "inclusion")]
    #[serde(rename = "inclusion")]
    Inclusion,
    #[value(name = "closed-forms")]
    #[serde(rename = "closed-forms")]
    ClosedForms,
    #[value(name = "dual-mixed")]
    #[serde(rename = "dual-mixed")]
    DualMixed,
}

impl Chain {
    pub fn name(&self) -> &'static str {
        match self {
            Chain::Thm11 => "thm11",
            Chain::Thm12 => "thm12",
            Chain::Thm13 => "thm13",
            Chain::CorollaryS => "corollary-s",
            Chain::Riesz => "riesz",
            Chain::Identity3a => "identity-3a",
            Chain::Identity3b => "identity-3b",
            Chain::Inclusion => "inclusion",
            Chain::ClosedForms => "closed-forms",
            Chain::DualMixed => "dual-mixed",
        }
    }
}

fn params(cfg: &RunConfig, alpha: f64) -> Result<HlsParams> {
    Ok(match (cfg.p, cfg.r) {
        (None, None) => HlsParams::diagonal(cfg.n, alpha)?,
        (Some(p), Some(r)) => HlsParams::new(cfg.n, alpha, p, r)?,
        _ => return config_err("give both p and r, or neither"),
    })
}

pub fn run_chain(chain: Chain, cfg: &RunConfig) -> Result<ChainReport> {
    let n = cfg.n;
    let q = &cfg.quad;
    let grid = Arc::new(SphereGrid::new(n, cfg.grid)?);
    let pair = |alpha: Option<f64>| -> Result<_> { Ok((cfg.f.build(n, alpha)?, cfg.h.build(n, alpha)?)) };
    let rep = match chain {
        Chain::Thm11 => {
            let a = cfg.alpha()?;
            let (f, h) = pair(Some(a))?;
            verify_theorem_1_1(&f, &h, &params(cfg, a)?, grid, q)?
        }
        Chain::Thm12 => {
            let a = cfg.alpha()?;
            let (f, h) = pair(Some(a))?;
            verify_theorem_1_2(&f, &h, &params(cfg, a)?, grid, q)?
        }
        Chain::Thm13 => {
            let a = cfg.alpha()?;
            let (f, h) = pair(Some(a))?;
            verify_theorem_1_3(&f, &h, a, grid, q)?
        }
        Chain::CorollaryS => {
            let a = cfg.alpha()?;
            let Some(s) = cfg.s else {
                return config_err("corollary-s needs --s");
            };
            let (f, h) = pair(Some(a))?;
            verify_corollary_sconcave(&f, &h, a, s, grid, q)?
        }
        Chain::Riesz => {
            let (a, b) = pair(cfg.alpha)?;
            let c = cfg.c.build(n, cfg.alpha)?;
            riesz_rearrangement_check(&a, &b, &c, q)?
        }
        Chain::Identity3a => {
            let a = cfg.alpha()?;
            let (f, h) = pair(Some(a))?;
            check_representation_identity(&f, &h, &cfg.k.build(n)?, a, grid, q)?
        }
        Chain::Identity3b => {
            let (f, h) = pair(Some(cfg.alpha.unwrap_or(n as f64)))?;
            check_sn_volume_identity(&f, &h, grid, q)?
        }
        Chain::Inclusion => inclusion(cfg, grid)?,
        Chain::ClosedForms => closed_forms(cfg)?,
        Chain::DualMixed => check_dual_mixed_inequality(&cfg.k.build(n)?, &cfg.l.build(n)?, cfg.alpha()?, &grid)?,
    };
    Ok(rep)
}

fn inclusion(cfg: &RunConfig, grid: Arc<SphereGrid>) -> Result<ChainReport> {
    let (f, h) = (cfg.f.build(cfg.n, cfg.alpha)?, cfg.h.build(cfg.n, cfg.alpha)?);
    let class = match cfg.s {
        Some(s) => Concavity::S { s },
        None => Concavity::Log,
    };
    let ir = check_inclusion_monotone(&f, &h, &cfg.alphas, class, grid, &cfg.quad)?;
    let worst = if ir.worst_margin.is_finite() { ir.worst_margin } else { 0.0 };
    let mut rep = ChainReport::new("inclusion");
    let w = rep.term("worst nodewise margin", Estimate::exact(worst));
    let t = rep.term("-tolerance", Estimate::exact(-ir.tolerance));
    rep.require(w, Direction::Ge, t);
    let mut prev = None;
    for (a, ratios) in ir.alphas.iter().zip(&ir.ratios) {
        let v = ratios[0];
        let i = rep.term(format!("ratio(alpha={a})"), Estimate::new(v, v * ir.tolerance));
        if let Some(p) = prev {
            rep.require(p, Direction::Ge, i);
        }
        prev = Some(i);
    }
    if class == Concavity::Log {
        let closed: Vec<f64> = ir
            .alphas
            .iter()
            .map(|a| Ok((a + 1.0).powf(-1.0 / a) / gamma_fn(a + 1.0)?.powf(1.0 / a)))
            .collect::<affine_hls::Result<_>>()?;
        rep.meta("interval_indicator_ratio", closed);
    }
    rep.meta("alphas", &ir.alphas);
    rep.meta("constants", &ir.constants);
    rep.meta("class", class);
    rep.meta("max_ratio_spread", ir.max_ratio_spread);
    rep.meta("f", f.describe());
    rep.meta("h", h.describe());
    Ok(rep)
}

fn closed_forms(cfg: &RunConfig) -> Result<ChainReport> {
    let s = cfg.s.unwrap_or(1.0);
    let cr = check_correlation_closed_forms(cfg.n, s, &cfg.quad)?;
    let mut rep = ChainReport::new("closed-forms");
    let e = rep.term("max error, exponential", Estimate::exact(cr.max_error_exponential));
    let te = rep.term("threshold, exponential", Estimate::exact(cr.threshold_exponential));
    let p = rep.term("max error, peak", Estimate::exact(cr.max_error_peak));
    let tp = rep.term("threshold, peak", Estimate::exact(cr.threshold_peak));
    rep.require(e, Direction::Le, te);
    rep.require(p, Direction::Le, tp);
    rep.meta("n", cr.n);
    rep.meta("s", s);
    rep.meta("exponential", &cr.exponential);
    rep.meta("peak", &cr.peak);
    Ok(rep)
}
