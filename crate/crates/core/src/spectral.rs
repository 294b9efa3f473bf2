//! Spectral zeta and partition functions.
//!
//! Harper moments come from the elliptic density of states; almost Mathieu
//! moments from counting constant Fourier coefficients ("winding numbers"),
//! with a trapezoid quadrature over the Floquet circle as an independent
//! check.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::elliptic::complete_k_from_complement;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::quad::integrate;

pub const MAX_HARPER_ORDER: u32 = 40;
pub const MAX_AM_ORDER: u32 = 30;
pub const MAX_PARTITION_ORDER: u32 = 20;
pub const MAX_PARTITION_T: f64 = 10.0;

/// `∫₀¹ ln(4/√(1-k²)) / (1+k) dk = (3/2) ln²2 + π²/24`.
const LOG_TERM_INTEGRAL: f64 = 1.131_913_037_589_358_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaMethod {
    HarperElliptic,
    AmWinding,
    AmQuadrature,
}

impl ZetaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ZetaMethod::HarperElliptic => "harper_elliptic",
            ZetaMethod::AmWinding => "am_winding",
            ZetaMethod::AmQuadrature => "am_quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaRow {
    pub s: u32,
    pub value: f64,
    pub method: ZetaMethod,
    /// Component label, e.g. `k=0;l=0;m=1;n=1` or `l=0;j=2` or `window=-1..1`.
    pub component: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZetaTable {
    pub rows: Vec<ZetaRow>,
}

impl ZetaTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "s,value,method,component")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.s, fmt_f64(r.value), r.method.as_str(), r.component)?;
        }
        Ok(())
    }
}

fn k_unguarded(k: f64) -> f64 {
    complete_k_from_complement(((1.0 - k) * (1.0 + k)).sqrt())
}

/// `ζ_H(s) = 4^{s+1}/(π² ab) ∫₀¹ ((1-k)/(1+k))^s K(k)/(1+k) dk` for even `s`;
/// odd moments vanish by electron–hole symmetry and are returned as exact 0.
pub fn zeta_harper(s: u32, a: u32, b: u32) -> Result<f64> {
    if s > MAX_HARPER_ORDER {
        return Err(Error::UnsupportedOrder { order: s, max: MAX_HARPER_ORDER });
    }
    if a == 0 || b == 0 {
        return Err(Error::invalid("a and b must be positive"));
    }
    if s % 2 == 1 {
        return Ok(0.0);
    }
    let integral = if s == 0 {
        // split off the logarithmic singularity of K at k = 1
        let rem = integrate(
            |k| (k_unguarded(k) - (4.0 / ((1.0 - k) * (1.0 + k)).sqrt()).ln()) / (1.0 + k),
            0.0,
            1.0,
            1e-14,
            1e-14,
        );
        rem.value + LOG_TERM_INTEGRAL
    } else {
        integrate(|k| ((1.0 - k) / (1.0 + k)).powi(s as i32) * k_unguarded(k) / (1.0 + k), 0.0, 1.0, 0.0, 1e-13).value
    };
    Ok(4f64.powi(s as i32 + 1) / (PI * PI * a as f64 * b as f64) * integral)
}

pub fn zeta_harper_table(max_order: u32, a: u32, b: u32) -> Result<ZetaTable> {
    let rows = (0..=max_order)
        .map(|s| {
            Ok(ZetaRow {
                s,
                value: zeta_harper(s, a, b)?,
                method: ZetaMethod::HarperElliptic,
                component: "k=0;l=0;m=1;n=1".into(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ZetaTable { rows })
}

/// A truncated series with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the last included term.
    pub truncation: f64,
    /// `truncation ≤ 1e-10 |value|`.
    pub converged: bool,
}

fn finish(value: f64, last: f64) -> SeriesValue {
    SeriesValue { value, truncation: last.abs(), converged: last.abs() <= 1e-10 * value.abs() }
}

/// `Z(t) = 1/(2ab) + Σ_{k=1}^{order} ζ_H(2k) t^{2k} / (2k)!`.
pub fn partition_harper(t: f64, a: u32, b: u32, order: u32) -> Result<SeriesValue> {
    if order > MAX_PARTITION_ORDER {
        return Err(Error::UnsupportedOrder { order, max: MAX_PARTITION_ORDER });
    }
    if t.is_nan() || t.abs() > MAX_PARTITION_T {
        return Err(Error::Domain { what: "t", value: t, domain: "[-10, 10]" });
    }
    let mut sum = zeta_harper(0, a, b)?;
    let mut last = sum;
    let mut factor = 1.0; // t^{2k} / (2k)!
    for k in 1..=order {
        let n = 2 * k;
        factor *= t * t / ((n - 1) as f64 * n as f64);
        last = zeta_harper(n, a, b)? * factor;
        sum += last;
    }
    Ok(finish(sum, last))
}

fn check_am(n: u32, a: usize) -> Result<()> {
    if n > MAX_AM_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_AM_ORDER });
    }
    if a == 0 {
        return Err(Error::invalid("a must be positive"));
    }
    Ok(())
}

/// `2cos 2πα(j+ℓa)`.
fn am_shift(a: usize, alpha: f64, comp_l: i64, j: i64) -> f64 {
    let x = alpha * (j as f64 + (comp_l * a as i64) as f64);
    2.0 * (2.0 * PI * (x - x.floor())).cos()
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Constant Fourier coefficient of `(ξ + ξ⁻¹ + c)ⁿ`:
/// `Σ_{2k≤n} n!/((k!)²(n-2k)!) cⁿ⁻²ᵏ` with `c = 2cos 2πα(j+ℓa)`.
pub fn zeta_am_winding(n: u32, a: usize, alpha: f64, comp_l: i64, j: i64) -> Result<f64> {
    check_am(n, a)?;
    let c = am_shift(a, alpha, comp_l, j);
    Ok((0..=n / 2)
        .map(|k| (binomial(n, 2 * k) * binomial(2 * k, k)) as f64 * c.powi((n - 2 * k) as i32))
        .sum())
}

/// `∫₀¹ (2cos 2πθ + c)ⁿ dθ` by the periodic trapezoid rule on `4n + 64`
/// points, which is exact for trigonometric polynomials of this degree.
pub fn zeta_am_quadrature(n: u32, a: usize, alpha: f64, comp_l: i64, j: i64) -> Result<f64> {
    check_am(n, a)?;
    let c = am_shift(a, alpha, comp_l, j);
    let pts = 4 * n as usize + 64;
    let sum: f64 = (0..pts).map(|i| (2.0 * (2.0 * PI * i as f64 / pts as f64).cos() + c).powi(n as i32)).sum();
    Ok(sum / pts as f64)
}

type AmComponentFn = fn(u32, usize, f64, i64, i64) -> Result<f64>;

fn am_method(method: ZetaMethod) -> Result<AmComponentFn> {
    match method {
        ZetaMethod::AmWinding => Ok(zeta_am_winding),
        ZetaMethod::AmQuadrature => Ok(zeta_am_quadrature),
        ZetaMethod::HarperElliptic => Err(Error::invalid("not an almost Mathieu method")),
    }
}

/// `Σ_{ℓ∈window} Σ_{j=1}^{a} ζ^{ℓ,j}(n)`, summed in window order.
pub fn zeta_am_window(n: u32, a: usize, alpha: f64, window: &[i64], method: ZetaMethod) -> Result<f64> {
    let f = am_method(method)?;
    let mut sum = 0.0;
    for &l in window {
        for j in 1..=a as i64 {
            sum += f(n, a, alpha, l, j)?;
        }
    }
    Ok(sum)
}

fn window_label(window: &[i64]) -> String {
    let parts: Vec<String> = window.iter().map(i64::to_string).collect();
    format!("window={}", parts.join(";"))
}

pub fn zeta_am_table(max_order: u32, a: usize, alpha: f64, window: &[i64], methods: &[ZetaMethod]) -> Result<ZetaTable> {
    let mut rows = Vec::new();
    for s in 0..=max_order {
        for &m in methods {
            rows.push(ZetaRow { s, value: zeta_am_window(s, a, alpha, window, m)?, method: m, component: window_label(window) });
        }
    }
    Ok(ZetaTable { rows })
}

/// `Z'(t) = Σ_{n=0}^{order} ζ(n) (-t)ⁿ / n!` over a component window.
pub fn partition_am(t: f64, a: usize, alpha: f64, window: &[i64], order: u32) -> Result<SeriesValue> {
    if order > MAX_AM_ORDER {
        return Err(Error::UnsupportedOrder { order, max: MAX_AM_ORDER });
    }
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut factor = 1.0;
    for n in 0..=order {
        if n > 0 {
            factor *= -t / n as f64;
        }
        last = zeta_am_window(n, a, alpha, window, ZetaMethod::AmWinding)? * factor;
        sum += last;
    }
    Ok(finish(sum, last))
}
