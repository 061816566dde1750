//! Crank-Nicolson finite-difference oracle for all three PDEs.
//!
//! This solver shares nothing with the spectral machinery — no Laguerre
//! evaluations, no projection integrals — so agreement between the two is
//! evidence for both. It marches `V_t + rS V_S + ½σ²S^p V_SS − rV = 0`
//! (p = 2 standard, 1 sub, 3 supra) backward from the put payoff on a
//! uniform (t, S) grid.
//!
//! Scheme: θ = ½ with Rannacher startup — the first step is replaced by two
//! half-steps of implicit Euler, which damps the oscillation Crank-Nicolson
//! otherwise rings off the payoff kink. Interior rows solve a tridiagonal
//! system per step (Thomas algorithm); the systems are diagonally dominant
//! for every grid this crate uses, so no pivoting is needed.
//!
//! Boundary conditions are an explicit, recorded choice (the models
//! themselves do not dictate far-field data): either the discounted strike
//! at S = 0 with zero at S = s_max, or rows copied from a series solution
//! when probing the spectral expansion on its own terms.

use crate::coefficients::SpectralSolution;
use crate::models::{EvalPoint, ModelParams, ModelVariant};
use crate::pricing::{payoff_put, series_eval};
use crate::{Error, Result};

/// Dirichlet data for the backward solve.
pub enum BoundaryChoice<'a> {
    /// V(t, 0) = K e^{−r(T−t)} (the exact value of the degenerate S = 0
    /// limit of all three PDEs), V(t, s_max) = 0.
    DiscountedStrike,
    /// Boundary rows evaluated from a series solution, isolating interior
    /// PDE behavior from the far-field choice. The supra series is singular
    /// at S = 0, so its lower row falls back to the discounted strike.
    SpectralMatched(&'a SpectralSolution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    DiscountedStrike,
    SpectralMatched,
}

/// Auditable record of the boundary data a grid was solved with.
#[derive(Debug, Clone)]
pub struct BcRecord {
    pub kind: BcKind,
    pub lower: String,
    pub upper: String,
}

/// Finite-difference value surface, times ascending, spots ascending.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub variant: ModelVariant,
    pub params: ModelParams,
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    /// values[k][i] = V(t_nodes[k], s_nodes[i]); the last row is the payoff.
    pub values: Vec<Vec<f64>>,
    pub bc_spec: BcRecord,
}

fn diffusion_power(variant: ModelVariant) -> i32 {
    match variant {
        ModelVariant::Standard => 2,
        ModelVariant::Sub => 1,
        ModelVariant::Supra => 3,
    }
}

/// Tridiagonal solve, destroying its inputs. `diag` is pre-checked for the
/// (near-)zero pivots that would signal a non-dominant system.
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    for i in 1..m {
        let pivot = diag[i - 1];
        if pivot.abs() < 1e-300 {
            return Err(Error::Instability(format!(
                "tridiagonal pivot collapsed at row {i}"
            )));
        }
        let w = sub[i] / pivot;
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if diag[m - 1].abs() < 1e-300 {
        return Err(Error::Instability("tridiagonal pivot collapsed at last row".into()));
    }
    let mut x = vec![0.0; m];
    x[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    }
    Ok(x)
}

/// Backward Crank-Nicolson solve of the chosen variant's pricing PDE.
///
/// The grid is uniform: n_s spot intervals on [0, s_max], n_t time intervals
/// on [0, T]. The terminal row is the payoff exactly (no smoothing); the
/// payoff kink is handled by the Rannacher startup instead.
///
/// # Errors
///
/// `Error::InvalidParameter` for grids smaller than 16×16, s_max ≤ K, or a
/// spectral-matched boundary whose solution disagrees with (variant,
/// params); `Error::Instability` if the march produces non-finite values.
pub fn solve_fd(
    variant: ModelVariant,
    params: &ModelParams,
    s_max: f64,
    n_s: usize,
    n_t: usize,
    bc: BoundaryChoice<'_>,
) -> Result<GridSolution> {
    if n_s < 16 || n_t < 16 {
        return Err(Error::InvalidParameter(format!(
            "grid must be at least 16×16, got {n_s}×{n_t}"
        )));
    }
    if !(s_max.is_finite() && s_max > params.strike) {
        return Err(Error::InvalidParameter(format!(
            "s_max must exceed the strike {}, got {s_max}",
            params.strike
        )));
    }
    if let BoundaryChoice::SpectralMatched(sol) = &bc {
        if sol.variant() != variant || sol.params() != params {
            return Err(Error::InvalidParameter(
                "spectral-matched boundary requires a solution for the same variant and parameters"
                    .into(),
            ));
        }
    }

    let ds = s_max / n_s as f64;
    let dt = params.maturity / n_t as f64;
    let s_nodes: Vec<f64> = (0..=n_s).map(|i| i as f64 * ds).collect();
    let t_nodes: Vec<f64> = (0..=n_t).map(|k| k as f64 * dt).collect();

    let lower_bc = |t: f64| -> Result<f64> {
        match &bc {
            BoundaryChoice::DiscountedStrike => {
                Ok(params.strike * (-params.rate * (params.maturity - t)).exp())
            }
            BoundaryChoice::SpectralMatched(sol) => match variant {
                ModelVariant::Supra => {
                    Ok(params.strike * (-params.rate * (params.maturity - t)).exp())
                }
                _ => Ok(series_eval(sol, t, 0.0)?.value),
            },
        }
    };
    let upper_bc = |t: f64| -> Result<f64> {
        match &bc {
            BoundaryChoice::DiscountedStrike => Ok(0.0),
            BoundaryChoice::SpectralMatched(sol) => Ok(series_eval(sol, t, s_max)?.value),
        }
    };

    // Spatial operator L: (LV)_i = a_i V_{i−1} + b_i V_i + c_i V_{i+1}
    // from central differences of rS V_S + ½σ²S^p V_SS − rV.
    let power = diffusion_power(variant);
    let interior = n_s - 1;
    let mut op_a = vec![0.0; interior];
    let mut op_b = vec![0.0; interior];
    let mut op_c = vec![0.0; interior];
    for i in 1..n_s {
        let s = s_nodes[i];
        let diff = 0.5 * params.sigma * params.sigma * s.powi(power) / (ds * ds);
        let conv = params.rate * s / (2.0 * ds);
        op_a[i - 1] = diff - conv;
        op_b[i - 1] = -2.0 * diff - params.rate;
        op_c[i - 1] = diff + conv;
    }

    // One θ-step from the known row at t_from down to t_to = t_from − dt_step:
    // (I − dt·θ·L) V_new = (I + dt·(1−θ)·L) V_old, Dirichlet rows folded
    // into the right-hand side.
    let step = |old: &[f64], t_to: f64, dt_step: f64, theta: f64| -> Result<Vec<f64>> {
        let lower = lower_bc(t_to)?;
        let upper = upper_bc(t_to)?;
        let expl = dt_step * (1.0 - theta);
        let impl_ = dt_step * theta;

        let sub: Vec<f64> = op_a.iter().map(|a| -impl_ * a).collect();
        let sup: Vec<f64> = op_c.iter().map(|c| -impl_ * c).collect();
        let mut diag: Vec<f64> = op_b.iter().map(|b| 1.0 - impl_ * b).collect();
        let mut rhs = vec![0.0; interior];
        for j in 0..interior {
            let i = j + 1;
            rhs[j] = old[i] + expl * (op_a[j] * old[i - 1] + op_b[j] * old[i] + op_c[j] * old[i + 1]);
        }
        rhs[0] += impl_ * op_a[0] * lower;
        rhs[interior - 1] += impl_ * op_c[interior - 1] * upper;

        let x = thomas(&sub, &mut diag, &sup, &mut rhs)?;
        let mut row = Vec::with_capacity(n_s + 1);
        row.push(lower);
        row.extend_from_slice(&x);
        row.push(upper);
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Instability(format!(
                "non-finite grid values at t = {t_to}"
            )));
        }
        Ok(row)
    };

    let mut values = vec![Vec::new(); n_t + 1];
    values[n_t] = s_nodes.iter().map(|&s| payoff_put(s, params.strike)).collect();

    for k in (0..n_t).rev() {
        values[k] = if k == n_t - 1 {
            // Rannacher startup: two implicit-Euler half-steps kill the
            // high-frequency content the kink injects.
            let half = step(&values[n_t], t_nodes[k] + 0.5 * dt, 0.5 * dt, 1.0)?;
            step(&half, t_nodes[k], 0.5 * dt, 1.0)?
        } else {
            step(&values[k + 1], t_nodes[k], dt, 0.5)?
        };
    }

    let bc_spec = match &bc {
        BoundaryChoice::DiscountedStrike => BcRecord {
            kind: BcKind::DiscountedStrike,
            lower: "V(t,0) = K e^{-r(T-t)}".into(),
            upper: format!("V(t,{s_max}) = 0"),
        },
        BoundaryChoice::SpectralMatched(sol) => BcRecord {
            kind: BcKind::SpectralMatched,
            lower: if variant == ModelVariant::Supra {
                "V(t,0) = K e^{-r(T-t)} (series singular at 0)".into()
            } else {
                format!("V(t,0) from series order {}", sol.order())
            },
            upper: format!("V(t,{s_max}) from series order {}", sol.order()),
        },
    };

    Ok(GridSolution {
        variant,
        params: *params,
        s_nodes,
        t_nodes,
        values,
        bc_spec,
    })
}

/// Central-difference residual of the full PDE applied to a series
/// solution, relative to max(1, |rV|).
///
/// The truncated series is an exact solution of its PDE (a finite sum of
/// exact separated solutions), so everything this measures is stencil error
/// O(h²) plus floating-point noise — a direct, Laguerre-free audit of the
/// eigenpair algebra.
///
/// # Errors
///
/// `Error::InvalidParameter` for nonpositive steps; `Error::Domain` unless
/// the stencil fits: h_s < s and t + h_t < T.
pub fn pde_residual_of_spectral(
    solution: &SpectralSolution,
    point: EvalPoint,
    h_s: f64,
    h_t: f64,
) -> Result<f64> {
    let EvalPoint { t, s } = point;
    if !(h_s > 0.0 && h_t > 0.0 && h_s.is_finite() && h_t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "stencil steps must be positive and finite, got h_s={h_s}, h_t={h_t}"
        )));
    }
    let params = solution.params();
    if h_s >= s || t + h_t >= params.maturity {
        return Err(Error::Domain(format!(
            "stencil does not fit at interior point (t={t}, s={s}) with h_s={h_s}, h_t={h_t}"
        )));
    }

    let v0 = series_eval(solution, t, s)?.value;
    let v_tp = series_eval(solution, t + h_t, s)?.value;
    let v_tm = series_eval(solution, t - h_t, s)?.value;
    let v_sp = series_eval(solution, t, s + h_s)?.value;
    let v_sm = series_eval(solution, t, s - h_s)?.value;

    let v_t = (v_tp - v_tm) / (2.0 * h_t);
    let v_s = (v_sp - v_sm) / (2.0 * h_s);
    let v_ss = (v_sp - 2.0 * v0 + v_sm) / (h_s * h_s);

    let diff = 0.5
        * params.sigma
        * params.sigma
        * s.powi(diffusion_power(solution.variant()))
        * v_ss;
    let raw = v_t + params.rate * s * v_s + diff - params.rate * v0;
    Ok(raw / (params.rate * v0).abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::build_spectral;
    use crate::pricing::{bs_put, price_spectral};

    /// Max |grid − reference| over interior nodes with s in [s_lo, s_hi],
    /// at the given time rows.
    fn max_gap_against<F: Fn(f64, f64) -> f64>(
        grid: &GridSolution,
        rows: &[usize],
        s_lo: f64,
        s_hi: f64,
        reference: F,
    ) -> f64 {
        let mut worst = 0.0f64;
        for &k in rows {
            let t = grid.t_nodes[k];
            for (i, &s) in grid.s_nodes.iter().enumerate() {
                if s < s_lo || s > s_hi {
                    continue;
                }
                let gap = (grid.values[k][i] - reference(t, s)).abs();
                worst = worst.max(gap);
            }
        }
        worst
    }

    #[test]
    fn grid_shape_and_terminal_row() {
        let p = ModelParams::default();
        let g = solve_fd(ModelVariant::Standard, &p, 12.0, 64, 32, BoundaryChoice::DiscountedStrike)
            .unwrap();
        assert_eq!(g.s_nodes.len(), 65);
        assert_eq!(g.t_nodes.len(), 33);
        assert_eq!(g.values.len(), 33);
        // terminal row is the payoff bit-for-bit
        for (i, &s) in g.s_nodes.iter().enumerate() {
            assert_eq!(g.values[32][i], payoff_put(s, p.strike));
        }
        assert_eq!(g.bc_spec.kind, BcKind::DiscountedStrike);
    }

    #[test]
    fn rejects_degenerate_grids() {
        let p = ModelParams::default();
        assert!(matches!(
            solve_fd(ModelVariant::Standard, &p, 12.0, 8, 64, BoundaryChoice::DiscountedStrike),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_fd(ModelVariant::Standard, &p, 12.0, 64, 8, BoundaryChoice::DiscountedStrike),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_fd(ModelVariant::Standard, &p, 2.0, 64, 64, BoundaryChoice::DiscountedStrike),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rejects_mismatched_spectral_boundary() {
        let p = ModelParams::default();
        let sol = build_spectral(ModelVariant::Sub, &p, 10).unwrap();
        assert!(matches!(
            solve_fd(
                ModelVariant::Supra,
                &p,
                12.0,
                64,
                64,
                BoundaryChoice::SpectralMatched(&sol)
            ),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn standard_fd_matches_closed_form() {
        let p = ModelParams::default();
        let g = solve_fd(ModelVariant::Standard, &p, 36.0, 200, 200, BoundaryChoice::DiscountedStrike)
            .unwrap();
        // rows t = 0 and t = 2.5
        let err = max_gap_against(&g, &[0, 100], 1.5, 6.0, |t, s| {
            bs_put(EvalPoint { t, s }, &p).unwrap()
        });
        assert!(err < 1.5e-3, "200×200 error vs closed form: {err:.3e}");
    }

    #[test]
    fn refinement_contracts_error() {
        let p = ModelParams::default();
        let err_of = |n: usize| {
            let g =
                solve_fd(ModelVariant::Standard, &p, 36.0, n, n, BoundaryChoice::DiscountedStrike)
                    .unwrap();
            max_gap_against(&g, &[0, n / 2], 1.5, 6.0, |t, s| {
                bs_put(EvalPoint { t, s }, &p).unwrap()
            })
        };
        let coarse = err_of(100);
        let fine = err_of(200);
        assert!(
            coarse / fine >= 2.0,
            "contraction {:.2}× (errors {coarse:.3e} → {fine:.3e})",
            coarse / fine
        );
    }

    #[test]
    fn sub_fd_with_matched_boundaries_tracks_series() {
        let p = ModelParams::default();
        let sol = build_spectral(ModelVariant::Sub, &p, 2000).unwrap();
        let g = solve_fd(
            ModelVariant::Sub,
            &p,
            12.0,
            400,
            400,
            BoundaryChoice::SpectralMatched(&sol),
        )
        .unwrap();
        // Terminal data differ (grid: payoff; series: its truncation), so
        // compare away from t = T where that mismatch has been damped. The
        // comparison also starts at s = strike/2: the √s diffusion
        // degenerates at s = 0, where the series limit (0) and the payoff
        // corner fight over a thin layer — measured gaps decay from ~5e−2
        // near s = 0.3 to ~1e−4 by s = 1.5 and stay at discretization scale
        // beyond, so the interior is where the two methods validate each
        // other.
        let err = max_gap_against(&g, &[0, 200], 1.5, 10.0, |t, s| {
            price_spectral(&sol, EvalPoint { t, s }).unwrap().value
        });
        assert!(err < 1e-3, "sub FD vs series: {err:.3e}");
    }

    #[test]
    fn supra_fd_with_matched_boundaries_tracks_series() {
        let p = ModelParams::default();
        let sol = build_spectral(ModelVariant::Supra, &p, 300).unwrap();
        let g = solve_fd(
            ModelVariant::Supra,
            &p,
            12.0,
            400,
            400,
            BoundaryChoice::SpectralMatched(&sol),
        )
        .unwrap();
        assert_eq!(g.bc_spec.kind, BcKind::SpectralMatched);
        // Lower boundary is the discounted-strike fallback, not the series,
        // so stay away from small s as well as from t = T.
        let err = max_gap_against(&g, &[0, 200], 1.5, 10.0, |t, s| {
            price_spectral(&sol, EvalPoint { t, s }).unwrap().value
        });
        assert!(err < 5e-3, "supra FD vs series: {err:.3e}");
    }

    #[test]
    fn pde_residual_small_at_interior_points() {
        let p = ModelParams::default();
        for variant in [ModelVariant::Sub, ModelVariant::Supra] {
            let sol = build_spectral(variant, &p, 20).unwrap();
            let res =
                pde_residual_of_spectral(&sol, EvalPoint { t: 1.0, s: 2.0 }, 1e-3, 1e-3).unwrap();
            assert!(res.abs() < 1e-4, "{variant}: residual {res:.3e}");
        }
    }

    #[test]
    fn pde_residual_shrinks_with_stencil() {
        let p = ModelParams::default();
        let sol = build_spectral(ModelVariant::Sub, &p, 20).unwrap();
        let at = |h: f64| {
            pde_residual_of_spectral(&sol, EvalPoint { t: 1.0, s: 2.0 }, h, h)
                .unwrap()
                .abs()
        };
        let coarse = at(4e-2);
        let fine = at(1e-2);
        // O(h²) stencil: 4× step refinement is ~16× until the noise floor
        assert!(
            coarse / fine > 4.0,
            "residuals {coarse:.3e} → {fine:.3e} under h/4"
        );
    }

    #[test]
    fn pde_residual_stencil_validation() {
        let p = ModelParams::default();
        let sol = build_spectral(ModelVariant::Sub, &p, 10).unwrap();
        let pt = EvalPoint { t: 1.0, s: 2.0 };
        assert!(matches!(
            pde_residual_of_spectral(&sol, pt, -1e-3, 1e-3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            pde_residual_of_spectral(&sol, EvalPoint { t: 1.0, s: 1e-4 }, 1e-3, 1e-3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            pde_residual_of_spectral(&sol, EvalPoint { t: 4.9999, s: 2.0 }, 1e-3, 1e-3),
            Err(Error::Domain(_))
        ));
    }
}
