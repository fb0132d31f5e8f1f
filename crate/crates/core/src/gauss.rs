//! Composite Gauss-Legendre helpers shared by the quadrature builders.

use gauss_quad::legendre::GaussLegendre;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of the `deg`-point Gauss-Legendre rule on [-1, 1],
/// sorted by node.
pub fn reference(deg: usize) -> Vec<(f64, f64)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<(f64, f64)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    guard
        .entry(deg)
        .or_insert_with(|| {
            let mut pairs = GaussLegendre::new(deg.max(2))
                .expect("degree >= 2")
                .into_node_weight_pairs();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs
        })
        .clone()
}

/// Composite rule on [a, b] with `panels` equal panels of `deg` points each.
pub fn composite(a: f64, b: f64, panels: usize, deg: usize) -> Vec<(f64, f64)> {
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| a + (b - a) * k as f64 / panels as f64)
        .collect();
    on_breaks(&breaks, deg)
}

/// Composite rule over consecutive intervals given by `breaks`.
pub fn on_breaks(breaks: &[f64], deg: usize) -> Vec<(f64, f64)> {
    let reference = reference(deg);
    let mut out = Vec::with_capacity(breaks.len().saturating_sub(1) * deg);
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in &reference {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

/// Breakpoints on [a, b]: `panels` uniform panels, with the last panel split
/// geometrically `grading` more times towards `b`.
pub fn graded_breaks(a: f64, b: f64, panels: usize, grading: usize) -> Vec<f64> {
    let mut breaks: Vec<f64> = (0..panels)
        .map(|k| a + (b - a) * k as f64 / panels as f64)
        .collect();
    let last_lo = *breaks.last().unwrap_or(&a);
    let mut width = b - last_lo;
    let mut lo = last_lo;
    for _ in 0..grading {
        width *= 0.5;
        lo += width;
        breaks.push(lo);
    }
    breaks.push(b);
    breaks
}

/// Uniform periodic trapezoid nodes on [0, 2*pi).
pub fn trapezoid_periodic(count: usize) -> Vec<(f64, f64)> {
    let h = std::f64::consts::TAU / count as f64;
    (0..count).map(|k| (k as f64 * h, h)).collect()
}
