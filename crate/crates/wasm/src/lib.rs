//! Browser bindings. Everything runs single-threaded.

use harper_core::{bands_rational, dos_counting_derivative, dos_elliptic, render_butterfly, DosCurve, OperatorSpec};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Butterfly {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    fluxes: Vec<f64>,
}

#[wasm_bindgen]
impl Butterfly {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major RGBA, top row highest energy.
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// Flux p/q of each column, ascending.
    pub fn fluxes(&self) -> Vec<f64> {
        self.fluxes.clone()
    }
}

fn butterfly_impl(q_max: u32, bins: u32) -> Result<Butterfly, String> {
    let r = render_butterfly(q_max as u64, bins as usize, 1).map_err(|e| e.to_string())?;
    let (w, h) = (r.width(), r.height());
    let mut rgba = vec![0u8; w * h * 4];
    for x in 0..w {
        for (bin, &v) in r.row(x).iter().enumerate() {
            let px = ((h - 1 - bin) * w + x) * 4;
            let c = if v > 0 { [20, 40, 120, 255] } else { [250, 250, 245, 255] };
            rgba[px..px + 4].copy_from_slice(&c);
        }
    }
    Ok(Butterfly { width: w, height: h, rgba, fluxes: r.fluxes.iter().map(|f| f.value()).collect() })
}

/// Band intervals at flux p/q, flattened `[lo0, hi0, lo1, hi1, ...]`.
fn bands_impl(p: u32, q: u32) -> Result<Vec<f64>, String> {
    let b = bands_rational(p as u64, q as u64).map_err(|e| e.to_string())?;
    Ok(b.intervals.iter().flat_map(|&(lo, hi)| [lo, hi]).collect())
}

/// Flattened `[λ0, v0, λ1, v1, ...]`; divergent points become NaN.
fn flatten(curve: &DosCurve) -> Vec<f64> {
    curve.points.iter().flat_map(|p| [p.lambda, if p.value.is_finite() { p.value } else { f64::NAN }]).collect()
}

fn dos_elliptic_impl(a: u32, b: u32, steps: u32) -> Result<Vec<f64>, String> {
    let curve = harper_core::dos::dos_elliptic_curve(a, b, steps as usize).map_err(|e| e.to_string())?;
    Ok(flatten(&curve))
}

fn dos_counting_impl(a: u32, b: u32, alpha: f64, beta: f64, n: u32, bins: u32) -> Result<Vec<f64>, String> {
    let spec = OperatorSpec::new(a, b, alpha, beta).map_err(|e| e.to_string())?;
    let curve = dos_counting_derivative(&spec, n as usize, bins as usize, 1).map_err(|e| e.to_string())?;
    Ok(flatten(&curve))
}

fn dos_at_impl(lambda: f64, a: u32, b: u32) -> Result<f64, String> {
    dos_elliptic(lambda, a, b).map(|p| p.value).map_err(|e| e.to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn butterfly(q_max: u32, bins: u32) -> Result<Butterfly, JsError> {
    js(butterfly_impl(q_max, bins))
}

#[wasm_bindgen]
pub fn flux_bands(p: u32, q: u32) -> Result<Vec<f64>, JsError> {
    js(bands_impl(p, q))
}

#[wasm_bindgen]
pub fn dos_elliptic_curve(a: u32, b: u32, steps: u32) -> Result<Vec<f64>, JsError> {
    js(dos_elliptic_impl(a, b, steps))
}

#[wasm_bindgen]
pub fn dos_counting_curve(a: u32, b: u32, alpha: f64, beta: f64, n: u32, bins: u32) -> Result<Vec<f64>, JsError> {
    js(dos_counting_impl(a, b, alpha, beta, n, bins))
}

/// Elliptic density at one energy; `Infinity` at the band centre.
#[wasm_bindgen]
pub fn dos_at(lambda: f64, a: u32, b: u32) -> Result<f64, JsError> {
    js(dos_at_impl(lambda, a, b))
}
