//! Ship size and carrying capacity from imagery.
//!
//! Length comes from the bounding-box diagonal. DWT follows a power law
//! in length, `ln(dwt) = a + b·ln(L)`, fitted by ordinary least squares.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("invalid model record: {0}")]
    InvalidRecord(String),
}

/// Regressor used for the length axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelForm {
    /// `ln(dwt) = a + b·ln(L)`
    #[default]
    LogLog,
    /// `ln(dwt) = a + b·L`
    LogLinear,
}

impl ModelForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelForm::LogLog => "log-log",
            ModelForm::LogLinear => "log-linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log-log" | "loglog" => Some(ModelForm::LogLog),
            "log-linear" | "loglinear" => Some(ModelForm::LogLinear),
            _ => None,
        }
    }

    fn regressor(self, length_m: f64) -> f64 {
        match self {
            ModelForm::LogLog => length_m.ln(),
            ModelForm::LogLinear => length_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthDwtModel {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub n: usize,
    pub form: ModelForm,
}

impl LengthDwtModel {
    /// A model with fixed coefficients, as if fitted perfectly.
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            r_squared: 1.0,
            n: 3,
            form: ModelForm::LogLog,
        }
    }
}

/// `a=…, b=…, r_squared=…, n=…, form=…` on one line.
impl fmt::Display for LengthDwtModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} b={} r_squared={} n={} form={}",
            self.a,
            self.b,
            self.r_squared,
            self.n,
            self.form.as_str()
        )
    }
}

impl FromStr for LengthDwtModel {
    type Err = CapacityError;

    fn from_str(s: &str) -> Result<Self, CapacityError> {
        let bad = || CapacityError::InvalidRecord(s.to_owned());
        let (mut a, mut b, mut r2, mut n, mut form) = (None, None, None, None, ModelForm::LogLog);
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(bad)?;
            match k {
                "a" => a = v.parse().ok(),
                "b" => b = v.parse().ok(),
                "r_squared" => r2 = v.parse().ok(),
                "n" => n = v.parse().ok(),
                "form" => form = ModelForm::parse(v).ok_or_else(bad)?,
                _ => return Err(bad()),
            }
        }
        Ok(Self {
            a: a.ok_or_else(bad)?,
            b: b.ok_or_else(bad)?,
            r_squared: r2.ok_or_else(bad)?,
            n: n.ok_or_else(bad)?,
            form,
        })
    }
}

/// Bounding-box diagonal in meters.
pub fn estimate_length(w_px: f64, h_px: f64, resolution_m: f64) -> f64 {
    w_px.hypot(h_px) * resolution_m
}

pub fn fit_loglinear(samples: &[(f64, f64)]) -> Result<LengthDwtModel, CapacityError> {
    fit(samples, ModelForm::LogLog)
}

pub fn fit(samples: &[(f64, f64)], form: ModelForm) -> Result<LengthDwtModel, CapacityError> {
    let n = samples.len();
    if n < 3 {
        return Err(CapacityError::DegenerateInput("fewer than 3 samples"));
    }
    if samples
        .iter()
        .any(|&(l, d)| !(l > 0.0 && d > 0.0 && l.is_finite() && d.is_finite()))
    {
        return Err(CapacityError::DegenerateInput("non-positive length or dwt"));
    }
    let xs: Vec<f64> = samples.iter().map(|&(l, _)| form.regressor(l)).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, d)| d.ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * nf {
        return Err(CapacityError::DegenerateInput("all lengths equal"));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r_squared = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LengthDwtModel {
        a,
        b,
        r_squared,
        n,
        form,
    })
}

pub fn estimate_dwt(length_m: f64, model: &LengthDwtModel) -> f64 {
    (model.a + model.b * model.form.regressor(length_m)).exp()
}

/// Exact product, no rounding.
pub fn cargo_value(barrels: f64, price_per_barrel: f64) -> f64 {
    barrels * price_per_barrel
}
