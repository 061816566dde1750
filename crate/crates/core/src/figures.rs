//! The four standard figure datasets, as plain (s, value) series.
//!
//! Two figures per variant: a convergence panel (coarse truncation at two
//! valuation times, fine truncation at maturity, payoff for reference) and a
//! comparison panel against the standard closed form. Assembly is pure and
//! deterministic — identical inputs give byte-identical CSV — which the
//! validation suite relies on.
//!
//! The spot range defaults to [0, 2K] with 121 samples; neither is dictated
//! by the models, it is a presentation choice. Series that are undefined at
//! s = 0 (the supra expansion, the closed form) simply start at the first
//! positive sample.

use crate::coefficients::build_spectral;
use crate::models::{EvalPoint, ModelParams, ModelVariant};
use crate::pricing::{bs_put, payoff_put, price_spectral};
use crate::{Error, Result};

/// Coarse truncation order shared by all "low order" series.
pub const COARSE_ORDER: usize = 20;
/// Converged truncation order for the sub expansion.
pub const SUB_FINE_ORDER: usize = 2000;
/// Converged truncation order for the supra expansion.
pub const SUPRA_FINE_ORDER: usize = 300;

/// Spot sampling for figure data.
#[derive(Debug, Clone, Copy)]
pub struct FigureGrid {
    pub s_lo: f64,
    pub s_hi: f64,
    pub samples: usize,
}

impl Default for FigureGrid {
    fn default() -> Self {
        Self {
            s_lo: 0.0,
            s_hi: 6.0,
            samples: 121,
        }
    }
}

impl FigureGrid {
    fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "figure grid needs at least 2 samples, got {}",
                self.samples
            )));
        }
        if !(self.s_lo.is_finite() && self.s_hi.is_finite() && self.s_lo >= 0.0 && self.s_lo < self.s_hi)
        {
            return Err(Error::InvalidParameter(format!(
                "figure spot range must satisfy 0 <= lo < hi, got [{}, {}]",
                self.s_lo, self.s_hi
            )));
        }
        Ok(())
    }

    fn spots(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| self.s_lo + (self.s_hi - self.s_lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct FigureSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub name: &'static str,
    pub series: Vec<FigureSeries>,
}

fn spectral_series(
    label: String,
    solution: &crate::coefficients::SpectralSolution,
    t: f64,
    spots: &[f64],
) -> Result<FigureSeries> {
    let needs_positive = solution.variant() == ModelVariant::Supra;
    let mut points = Vec::with_capacity(spots.len());
    for &s in spots {
        if needs_positive && s <= 0.0 {
            continue;
        }
        points.push((s, price_spectral(solution, EvalPoint { t, s })?.value));
    }
    Ok(FigureSeries { label, points })
}

fn standard_series(params: &ModelParams, t: f64, spots: &[f64]) -> Result<FigureSeries> {
    let mut points = Vec::with_capacity(spots.len());
    for &s in spots {
        if s <= 0.0 {
            continue;
        }
        points.push((s, bs_put(EvalPoint { t, s }, params)?));
    }
    Ok(FigureSeries {
        label: format!("standard t={t}"),
        points,
    })
}

fn payoff_series(params: &ModelParams, spots: &[f64]) -> FigureSeries {
    FigureSeries {
        label: "payoff".into(),
        points: spots.iter().map(|&s| (s, payoff_put(s, params.strike))).collect(),
    }
}

/// Build all four figures. The valuation times are 0, 0.6T and T (0, 3, 5
/// at the default parameters).
///
/// # Errors
///
/// `Error::InvalidParameter` for a degenerate grid; construction/pricing
/// errors propagated.
pub fn build_figures(params: &ModelParams, grid: &FigureGrid) -> Result<Vec<Figure>> {
    grid.validate()?;
    let spots = grid.spots();
    let t_early = 0.0;
    let t_mid = 0.6 * params.maturity;
    let t_late = params.maturity;

    let sub_coarse = build_spectral(ModelVariant::Sub, params, COARSE_ORDER)?;
    let sub_fine = build_spectral(ModelVariant::Sub, params, SUB_FINE_ORDER)?;
    let supra_coarse = build_spectral(ModelVariant::Supra, params, COARSE_ORDER)?;
    let supra_fine = build_spectral(ModelVariant::Supra, params, SUPRA_FINE_ORDER)?;

    let label = |variant: ModelVariant, order: usize, t: f64| format!("{variant} order {order} t={t}");

    let sub_convergence = Figure {
        name: "sub_convergence",
        series: vec![
            spectral_series(label(ModelVariant::Sub, COARSE_ORDER, t_early), &sub_coarse, t_early, &spots)?,
            spectral_series(label(ModelVariant::Sub, COARSE_ORDER, t_mid), &sub_coarse, t_mid, &spots)?,
            spectral_series(label(ModelVariant::Sub, SUB_FINE_ORDER, t_late), &sub_fine, t_late, &spots)?,
            payoff_series(params, &spots),
        ],
    };

    let sub_vs_standard = Figure {
        name: "sub_vs_standard",
        series: vec![
            spectral_series(label(ModelVariant::Sub, COARSE_ORDER, t_early), &sub_coarse, t_early, &spots)?,
            spectral_series(label(ModelVariant::Sub, COARSE_ORDER, t_mid), &sub_coarse, t_mid, &spots)?,
            standard_series(params, t_early, &spots)?,
            standard_series(params, t_mid, &spots)?,
            payoff_series(params, &spots),
        ],
    };

    let supra_convergence = Figure {
        name: "supra_convergence",
        series: vec![
            spectral_series(label(ModelVariant::Supra, COARSE_ORDER, t_early), &supra_coarse, t_early, &spots)?,
            spectral_series(label(ModelVariant::Supra, COARSE_ORDER, t_mid), &supra_coarse, t_mid, &spots)?,
            spectral_series(label(ModelVariant::Supra, SUPRA_FINE_ORDER, t_late), &supra_fine, t_late, &spots)?,
            payoff_series(params, &spots),
        ],
    };

    let supra_vs_standard = Figure {
        name: "supra_vs_standard",
        series: vec![
            spectral_series(label(ModelVariant::Supra, COARSE_ORDER, t_early), &supra_coarse, t_early, &spots)?,
            spectral_series(label(ModelVariant::Supra, COARSE_ORDER, t_mid), &supra_coarse, t_mid, &spots)?,
            standard_series(params, t_early, &spots)?,
            standard_series(params, t_mid, &spots)?,
            payoff_series(params, &spots),
        ],
    };

    Ok(vec![sub_convergence, sub_vs_standard, supra_convergence, supra_vs_standard])
}

/// Render one figure as CSV: header `s,series,value`, series-major rows,
/// shortest round-trip float formatting.
pub fn to_csv(figure: &Figure) -> String {
    let mut out = String::from("s,series,value\n");
    for series in &figure.series {
        for &(s, v) in &series.points {
            out.push_str(&format!("{s},{},{v}\n", series.label));
        }
    }
    out
}
