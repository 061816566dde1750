//! Associated Laguerre polynomials and the terminating hypergeometric sum
//! appearing in the put-coefficient closed form.
//!
//! Everything here is built on the three-term upward recurrence
//!
//! ```text
//! (n+1) L_{n+1}^k(x) = (2n + k + 1 − x) L_n^k(x) − (n + k) L_{n−1}^k(x),
//! L_0^k(x) = 1,   L_1^k(x) = k + 1 − x,
//! ```
//!
//! which is forward-stable on the x ≥ 0, n ≤ 2000 envelope this crate uses
//! (verified against exact monomial expansion and a high-precision oracle in
//! the test suite). Derivatives are obtained analytically through
//! `d/dx L_n^k = −L_{n−1}^{k+1}`, never by differencing.
//!
//! The Kummer function M(a, 2, x) is only ever needed at non-positive
//! integer a = −n, where it degenerates to a polynomial:
//! `M(−n, 2, x) = L_n^1(x) / (n+1)`. No general confluent-hypergeometric
//! machinery is provided, deliberately.

use crate::kahan::NeumaierSum;
use crate::{Error, Result};

/// Record of a single orthogonal-polynomial evaluation: `L_degree^order`
/// evaluated at `argument`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub value: f64,
    pub degree: usize,
    pub order: usize,
    pub argument: f64,
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "polynomial argument must be finite, got {x}"
        )));
    }
    Ok(())
}

/// Upward-recurrence kernel. `seed0`/`seed1` are the degree-0 and degree-1
/// starting values; pre-scaled seeds give pre-scaled results since the
/// recurrence is linear (used for the damped variant below).
#[inline]
fn laguerre_recurrence(n: usize, k: usize, x: f64, seed0: f64, seed1: f64) -> f64 {
    match n {
        0 => seed0,
        1 => seed1,
        _ => {
            let (mut prev, mut curr) = (seed0, seed1);
            for j in 1..n {
                let jf = j as f64;
                let kf = k as f64;
                let next = ((2.0 * jf + kf + 1.0 - x) * curr - (jf + kf) * prev) / (jf + 1.0);
                prev = curr;
                curr = next;
            }
            curr
        }
    }
}

/// Associated Laguerre polynomial L_n^k(x).
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite.
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(laguerre_recurrence(n, k, x, 1.0, k as f64 + 1.0 - x))
}

/// Plain Laguerre polynomial L_n(x) = L_n^0(x).
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite.
pub fn laguerre_plain(n: usize, x: f64) -> Result<f64> {
    laguerre_assoc(n, 0, x)
}

/// [`laguerre_assoc`] packaged with its inputs.
///
/// # Errors
///
/// `Error::Domain` for non-finite `x`; `Error::Instability` if the
/// evaluation overflowed (possible for large `x^n`).
pub fn laguerre_assoc_eval(n: usize, k: usize, x: f64) -> Result<PolyEval> {
    let value = laguerre_assoc(n, k, x)?;
    if !value.is_finite() {
        return Err(Error::Instability(format!(
            "L_{n}^{k}({x}) overflowed f64"
        )));
    }
    Ok(PolyEval {
        value,
        degree: n,
        order: k,
        argument: x,
    })
}

/// All of L_0^k(x) ... L_nmax^k(x) in one recurrence sweep.
///
/// Series evaluation and coefficient construction need every degree at a
/// fixed argument; a single O(nmax) pass replaces nmax calls of O(n) each.
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite.
pub fn laguerre_assoc_seq(nmax: usize, k: usize, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax == 0 {
        return Ok(out);
    }
    out.push(k as f64 + 1.0 - x);
    for j in 1..nmax {
        let jf = j as f64;
        let kf = k as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * out[j] - (jf + kf) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Exponentially damped sequence e^{−x} L_n^k(x) for n = 0..=nmax, x ≥ 0.
///
/// Obtained by running the (linear) recurrence from pre-damped seeds, which
/// is exact and avoids the overflow of evaluating L_n^k(x) and e^{−x}
/// separately at large x. Once e^{−x} underflows (x ≳ 745) every damped
/// value is below the smallest subnormal — |e^{−x} L_n^k(x)| is bounded by
/// C(n+k,k) e^{−x/2} — so the sequence short-circuits to exact zeros.
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite or `x < 0`.
pub fn laguerre_damped_seq(nmax: usize, k: usize, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "damped Laguerre sequence requires x >= 0, got {x}"
        )));
    }
    let damp = (-x).exp();
    if damp == 0.0 {
        return Ok(vec![0.0; nmax + 1]);
    }
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(damp);
    if nmax == 0 {
        return Ok(out);
    }
    out.push((k as f64 + 1.0 - x) * damp);
    for j in 1..nmax {
        let jf = j as f64;
        let kf = k as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * out[j] - (jf + kf) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Validation-free damped kernel for inner loops that have already
/// established x ≥ 0 and finite (e.g. quadrature nodes on [a, ∞)).
#[inline]
pub(crate) fn laguerre_damped_raw(n: usize, k: usize, x: f64) -> f64 {
    let damp = (-x).exp();
    if damp == 0.0 {
        return 0.0;
    }
    laguerre_recurrence(n, k, x, damp, (k as f64 + 1.0 - x) * damp)
}

/// Validation-free undamped kernel, same contract as [`laguerre_damped_raw`].
#[inline]
pub(crate) fn laguerre_assoc_raw(n: usize, k: usize, x: f64) -> f64 {
    laguerre_recurrence(n, k, x, 1.0, k as f64 + 1.0 - x)
}

/// Single damped value e^{−x} L_n^k(x); see [`laguerre_damped_seq`].
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite or `x < 0`.
pub fn laguerre_damped(n: usize, k: usize, x: f64) -> Result<f64> {
    check_argument(x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "damped Laguerre requires x >= 0, got {x}"
        )));
    }
    let damp = (-x).exp();
    if damp == 0.0 {
        return Ok(0.0);
    }
    Ok(laguerre_recurrence(
        n,
        k,
        x,
        damp,
        (k as f64 + 1.0 - x) * damp,
    ))
}

/// Terminating hypergeometric sum ₃F₂-style kernel
///
/// ```text
/// hypergeom([1, −m], [2, 2], x) = Σ_{j=0}^{m} (1)_j (−m)_j / ((2)_j (2)_j) · x^j / j!
///                               = Σ_{j=0}^{m} (−m)_j x^j / ((j+1)!)²
/// ```
///
/// The upper parameter −m truncates the series at degree m, so this is a
/// polynomial, summed in ascending j with compensated accumulation. The
/// term ratio is `(j − m)·x / (j + 2)²`.
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite.
pub fn hyper_1_negm_2_2(m: usize, x: f64) -> Result<f64> {
    check_argument(x)?;
    let mut acc = NeumaierSum::new();
    let mut term = 1.0;
    for j in 0..=m {
        acc.add(term);
        term *= (j as f64 - m as f64) * x / ((j as f64 + 2.0) * (j as f64 + 2.0));
    }
    Ok(acc.value())
}

/// Kummer M(−n, 2, x), via its Laguerre reduction L_n^1(x)/(n+1).
///
/// Only the non-positive-integer first parameter is supported — that is the
/// only case the eigenfunction construction produces (anything else would
/// not be polynomial and is out of scope).
///
/// # Errors
///
/// `Error::Domain` if `x` is not finite.
pub fn kummer_m_reduced(n: usize, x: f64) -> Result<f64> {
    Ok(laguerre_assoc(n, 1, x)? / (n as f64 + 1.0))
}
