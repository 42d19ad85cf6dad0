use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::observables::CorrelationField;

/// Real spatial window applied to both arguments of the correlation kernel.
/// All built-in windows are separable: `g(r1, r2) = g(r1) g(r2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialFilter {
    /// Normalized Gaussian `(2 pi sigma^2)^(-1/2) exp(-(r - center)^2 / (2 sigma^2))`.
    Gaussian { center: f64, sigma: f64 },
    /// Unity on `[r_min, r_max]`, zero elsewhere.
    Boxcar { r_min: f64, r_max: f64 },
    Unit,
}

impl SpatialFilter {
    pub fn validate(&self, length: f64) -> Result<()> {
        match *self {
            SpatialFilter::Gaussian { center, sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) || !center.is_finite() {
                    return Err(invalid(format!("gaussian filter needs finite center and sigma > 0, got sigma = {sigma}")));
                }
            }
            SpatialFilter::Boxcar { r_min, r_max } => {
                if !(0.0 <= r_min && r_min < r_max && r_max <= length) {
                    return Err(invalid(format!("boxcar needs 0 <= r_min < r_max <= {length}, got [{r_min}, {r_max}]")));
                }
            }
            SpatialFilter::Unit => {}
        }
        Ok(())
    }

    pub fn weight(&self, r: f64) -> f64 {
        match *self {
            SpatialFilter::Gaussian { center, sigma } => {
                let d = r - center;
                (2.0 * PI * sigma * sigma).powf(-0.5) * (-d * d / (2.0 * sigma * sigma)).exp()
            }
            SpatialFilter::Boxcar { r_min, r_max } => {
                if (r_min..=r_max).contains(&r) {
                    1.0
                } else {
                    0.0
                }
            }
            SpatialFilter::Unit => 1.0,
        }
    }

    pub fn is_separable(&self) -> bool {
        true
    }

    /// Short human-readable label used in provenance strings.
    pub fn label(&self) -> String {
        match *self {
            SpatialFilter::Gaussian { center, sigma } => format!("gaussian(center={center}, sigma={sigma})"),
            SpatialFilter::Boxcar { r_min, r_max } => format!("boxcar({r_min}, {r_max})"),
            SpatialFilter::Unit => "unit".to_string(),
        }
    }
}

/// `W_F(r1, r2) = g(r1) g(r2) W(r1, r2)`.
pub fn apply_filter(field: &CorrelationField, filter: &SpatialFilter) -> Result<CorrelationField> {
    filter.validate(field.grid.length())?;
    let g: Vec<f64> = field.grid.points().iter().map(|&r| filter.weight(r)).collect();
    let n = field.n();
    let mut values = field.values.clone();
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] *= g[i] * g[j];
        }
    }
    Ok(CorrelationField { grid: field.grid.clone(), values, time: field.time })
}
