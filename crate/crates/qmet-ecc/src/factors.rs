//! Single-qubit propagator factors over one interval of length d.
//!
//! The anti-diagonal block of one qubit evolves as
//! e^{-γd} [[x₋, y], [y, x₊]] with x± = cos(Δd) ± iω sin(Δd)/Δ,
//! y = γ sin(Δd)/Δ and Δ² = ω² − γ². Both cos(Δd) and sin(Δd)/Δ are entire
//! in Δ², so everything is evaluated from u = (Δd)² with a trigonometric
//! branch for u > 0, a hyperbolic branch for u < 0 and a series near 0.

use num_complex::Complex64 as C64;

use crate::dual::Dual;
use crate::{EccError, Result};

/// |u| below which the power series replace the closed forms.
const SERIES_U: f64 = 0.1;
/// γd above which e^{-γd} is folded into the hyperbolic functions.
const FOLD_GD: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionFactors {
    /// cosh(γd)
    pub c_gamma: f64,
    /// sinh(γd)
    pub s_gamma: f64,
    /// √(ω² − γ²), imaginary when γ > |ω|.
    pub delta: C64,
    pub x_plus: C64,
    pub x_minus: C64,
    pub y: C64,
    /// r e^{±iφ} = e^{-γd}(x± + y)
    pub r: f64,
    pub phi: f64,
}

/// Unscaled factors for one interval. Overflows for γd beyond ~700, like
/// cosh itself; the evaluators use the scaled leaves instead.
pub fn factors(omega: f64, gamma: f64, duration: f64) -> Result<EvolutionFactors> {
    if !(duration >= 0.0) || !(gamma >= 0.0) || !omega.is_finite() {
        return Err(EccError::InvalidParams(format!("factors(ω={omega}, γ={gamma}, d={duration})")));
    }
    let d = duration;
    let u = (omega * omega - gamma * gamma) * d * d;
    let c = cos_root(u);
    let s = d * sinc_root(u);
    let lv = leaves(omega, gamma, d);
    Ok(EvolutionFactors {
        c_gamma: (gamma * d).cosh(),
        s_gamma: (gamma * d).sinh(),
        delta: C64::new(omega * omega - gamma * gamma, 0.0).sqrt(),
        x_plus: C64::new(c, omega * s),
        x_minus: C64::new(c, -omega * s),
        y: C64::new(gamma * s, 0.0),
        r: lv.ln_r.exp(),
        phi: lv.unit.v.arg(),
    })
}

/// cos(√u), cosh(√-u) for u < 0.
fn cos_root(u: f64) -> f64 {
    if u.abs() < SERIES_U {
        series(u, 0)
    } else if u > 0.0 {
        u.sqrt().cos()
    } else {
        (-u).sqrt().cosh()
    }
}

/// sin(√u)/√u, sinh(√-u)/√-u for u < 0.
fn sinc_root(u: f64) -> f64 {
    if u.abs() < SERIES_U {
        series(u, 1)
    } else if u > 0.0 {
        let a = u.sqrt();
        a.sin() / a
    } else {
        let a = (-u).sqrt();
        a.sinh() / a
    }
}

/// Σ_k (-u)^k / (2k + off)!
fn series(u: f64, off: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = term;
    for k in 1..14u32 {
        let a = (2 * k - 1 + off) as f64;
        let b = (2 * k + off) as f64;
        term *= -u / (a * b);
        sum += term;
    }
    sum
}

/// (cos√u − sinc√u)/u, finite at u = 0.
fn kernel(u: f64) -> f64 {
    if u.abs() < SERIES_U {
        // Σ_{k≥1} (-1)^k u^{k-1} 2k/(2k+1)!
        let mut fact = 6.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..14u32 {
            if k > 1 {
                fact *= (2 * k) as f64 * (2 * k + 1) as f64;
                pow *= -u;
            }
            sum -= pow * (2 * k) as f64 / fact;
        }
        sum
    } else {
        (cos_root(u) - sinc_root(u)) / u
    }
}

/// sinc√w − 1
fn sinc_m1(w: f64) -> f64 {
    if w.abs() < 1.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..16u32 {
            term *= -w / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        sinc_root(w) - 1.0
    }
}

/// e^b − 1 − b − b²/2
fn expm1_tail3(b: f64) -> f64 {
    if b < 1.0 {
        let mut term = b * b / 2.0;
        let mut sum = 0.0;
        for k in 3..24u32 {
            term *= b / k as f64;
            sum += term;
        }
        sum
    } else {
        b.exp_m1() - b - 0.5 * b * b
    }
}

/// Scaled single-interval quantities with ω-derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Leaves {
    /// e^{-γd} cosh γd
    pub c: f64,
    /// e^{-γd} sinh γd
    pub s: f64,
    pub xm: Dual,
    pub xp: Dual,
    pub y: Dual,
    pub ln_r: f64,
    pub dln_r: f64,
    /// e^{iφ}
    pub unit: Dual,
}

impl Leaves {
    pub fn dphi(&self) -> f64 {
        (self.unit.d / self.unit.v).im
    }
}

pub(crate) fn leaves(omega: f64, gamma: f64, d: f64) -> Leaves {
    let gd = gamma * d;
    let u = (omega * omega - gamma * gamma) * d * d;
    let (ch, sh, kh) = if gd > FOLD_GD && u < -SERIES_U {
        let a = (-u).sqrt();
        let ep = (a - gd).exp();
        let em = (-a - gd).exp();
        let ch = 0.5 * (ep + em);
        let sh = d * 0.5 * (ep - em) / a;
        (ch, sh, d * d * (d * ch - sh) / u)
    } else {
        let e = (-gd).exp();
        (e * cos_root(u), e * d * sinc_root(u), e * d * d * d * kernel(u))
    };
    let i = C64::new(0.0, 1.0);
    let w = omega;
    let dc = -w * d * sh;
    let ds = w * kh;
    let xp = Dual::new(C64::new(ch, w * sh), C64::new(dc, 0.0) + i * (sh + w * ds));
    let xm = Dual::new(C64::new(ch, -w * sh), C64::new(dc, 0.0) - i * (sh + w * ds));
    let y = Dual::new(C64::new(gamma * sh, 0.0), C64::new(gamma * ds, 0.0));
    let ap = xp + y;
    let mag = ap.v.norm();
    let (unit, dln_r) = if mag > 0.0 {
        let ld = ap.log_derivative();
        let uv = ap.v / mag;
        (Dual::new(uv, i * ld.im * uv), ld.re)
    } else {
        (Dual::one(), 0.0)
    };
    let ln_r = if gd <= 1.0 {
        let b = 2.0 * gd;
        let diff = 2.0 * gd * sinc_m1(4.0 * u) + 2.0 * gd * gd * sinc_m1(u) * (sinc_m1(u) + 2.0) - expm1_tail3(b);
        0.5 * ((-b).exp() * diff).ln_1p()
    } else {
        mag.ln()
    };
    let e2 = (-2.0 * gd).exp();
    Leaves { c: 0.5 * (1.0 + e2), s: -0.5 * (-2.0 * gd).exp_m1(), xm, xp, y, ln_r, dln_r, unit }
}
