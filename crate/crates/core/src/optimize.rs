//! One-dimensional maximization: golden section over segments, then a
//! root-finding polish on the derivative when one is available.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of a bracketed 1-D search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Converges to a local maximum; endpoints are compared at the end so a
/// monotone objective returns the better endpoint.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> LineSearch {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 500 {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    LineSearch { x: best.0, value: best.1, iterations, bracket: (lo, hi) }
}

/// Splits `[lo, hi]` into `starts` equal segments, runs golden section in
/// each concurrently, and returns the best result (smallest `x` on ties)
/// along with all per-segment results.
pub fn multistart_max<F>(f: &F, lo: f64, hi: f64, starts: usize, tol: f64) -> (LineSearch, Vec<LineSearch>)
where
    F: Fn(f64) -> f64 + Sync,
{
    let width = (hi - lo) / starts as f64;
    let runs: Vec<LineSearch> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == starts { hi } else { a + width };
            golden_section_max(f, a, b, tol)
        })
        .collect();
    let mut best = runs[0];
    for r in &runs[1..] {
        if r.value > best.value {
            best = *r;
        }
    }
    (best, runs)
}

/// Refines a stationary point of a smooth function from its derivative `g`
/// near `x0`, by bracketing a sign change and applying Illinois regula falsi.
/// Returns `None` when no sign change is found within `[lo, hi]`.
pub fn polish_root<G: Fn(f64) -> f64>(g: &G, x0: f64, lo: f64, hi: f64) -> Option<f64> {
    let g0 = g(x0);
    if g0 == 0.0 {
        return Some(x0);
    }
    let mut h = 1e-6 * (1.0 + x0.abs());
    let mut bracket = None;
    for _ in 0..60 {
        let (a, b) = ((x0 - h).max(lo), (x0 + h).min(hi));
        let (ga, gb) = (g(a), g(b));
        if ga.signum() != g0.signum() {
            bracket = Some((a, x0, ga, g0));
            break;
        }
        if gb.signum() != g0.signum() {
            bracket = Some((x0, b, g0, gb));
            break;
        }
        if a <= lo && b >= hi {
            break;
        }
        h *= 2.0;
    }
    let (mut a, mut b, mut ga, mut gb) = bracket?;
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * gb - b * ga) / (gb - ga);
        let c = if c.is_finite() && c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let gc = g(c);
        if gc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + c.abs()) {
            return Some(c);
        }
        if gc.signum() == gb.signum() {
            b = c;
            gb = gc;
            if side == -1 {
                ga /= 2.0;
            }
            side = -1;
        } else {
            a = c;
            ga = gc;
            if side == 1 {
                gb /= 2.0;
            }
            side = 1;
        }
    }
    Some(0.5 * (a + b))
}

/// Maximizes `f` on `[lo, hi]` with multistart golden section and, when a
/// derivative is supplied, a polish whose value must agree with the golden
/// result to relative `agree_tol`.
pub fn maximize<F, G>(f: &F, deriv: Option<&G>, lo: f64, hi: f64, starts: usize, agree_tol: f64) -> Result<LineSearch>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64,
{
    let (best, _) = multistart_max(f, lo, hi, starts, 1e-10);
    let Some(g) = deriv else { return Ok(best) };
    let Some(x) = polish_root(g, best.x, lo, hi) else { return Ok(best) };
    let value = f(x);
    let scale = best.value.abs().max(value.abs()).max(f64::MIN_POSITIVE);
    if (value - best.value).abs() > agree_tol * scale || (x - best.x).abs() > 1e-3 * (1.0 + best.x.abs()) {
        return Err(Error::Optimization(format!(
            "golden section (x={}, f={}) and derivative polish (x={x}, f={value}) disagree",
            best.x, best.value
        )));
    }
    if value >= best.value || (value - best.value).abs() <= agree_tol * scale {
        Ok(LineSearch { x, value: value.max(best.value), ..best })
    } else {
        Ok(best)
    }
}
