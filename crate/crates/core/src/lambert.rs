//! Principal-branch Lambert W via Halley iteration.

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / std::f64::consts::E;

/// `W_0(x)` for `x >= -1/e`, to relative accuracy ~1e-12.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !(x >= -INV_E) {
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if (x + INV_E).abs() < 1e-300 {
        return Ok(-1.0);
    }

    // Branch-appropriate initial guess.
    let mut w = if x < -0.25 {
        // Series around the branch point x = -1/e.
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < std::f64::consts::E {
        // Pade-like rational start near zero.
        x * (1.0 + 4.0 / 3.0 * x) / (1.0 + x * (7.0 / 3.0 + 5.0 / 6.0 * x))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-14 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
