//! Central finite differences shared by every module that differentiates
//! with respect to a parameter.

use num_complex::Complex64 as C64;

use crate::matrix::CMatrix;
use crate::tolerances::{FD_BASE_STEP, FD_SWITCH_REL};

/// Default step `1e-5 * max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    FD_BASE_STEP * x.abs().max(1.0)
}

/// Values that can be combined linearly and measured in max norm.
pub trait Linear: Sized {
    fn combo(terms: &[(&Self, f64)]) -> Self;
    fn max_norm(&self) -> f64;
}

impl Linear for f64 {
    fn combo(terms: &[(&Self, f64)]) -> Self {
        terms.iter().map(|(v, c)| **v * c).sum()
    }
    fn max_norm(&self) -> f64 {
        self.abs()
    }
}

impl Linear for C64 {
    fn combo(terms: &[(&Self, f64)]) -> Self {
        terms.iter().map(|(v, c)| **v * c).sum()
    }
    fn max_norm(&self) -> f64 {
        self.norm()
    }
}

impl Linear for Vec<f64> {
    fn combo(terms: &[(&Self, f64)]) -> Self {
        let n = terms[0].0.len();
        (0..n).map(|i| terms.iter().map(|(v, c)| v[i] * c).sum()).collect()
    }
    fn max_norm(&self) -> f64 {
        self.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

impl Linear for Vec<C64> {
    fn combo(terms: &[(&Self, f64)]) -> Self {
        let n = terms[0].0.len();
        (0..n).map(|i| terms.iter().map(|(v, c)| v[i] * c).sum()).collect()
    }
    fn max_norm(&self) -> f64 {
        self.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Linear for CMatrix {
    fn combo(terms: &[(&Self, f64)]) -> Self {
        let d = terms[0].0.dim();
        let mut out = CMatrix::zeros(d);
        for (m, c) in terms {
            for (o, x) in out.data_mut().iter_mut().zip(m.data()) {
                *o += x * c;
            }
        }
        out
    }
    fn max_norm(&self) -> f64 {
        self.max_abs()
    }
}

/// Central derivative of `f` at `x` with step `h`.
///
/// The 2-point estimate is returned unless it disagrees with the 5-point
/// stencil by more than `FD_SWITCH_REL` relative, in which case the 5-point
/// value is used.
pub fn derivative<T: Linear>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let fp = f(x + h);
    let fm = f(x - h);
    let d2 = T::combo(&[(&fp, 0.5 / h), (&fm, -0.5 / h)]);
    let fp2 = f(x + 2.0 * h);
    let fm2 = f(x - 2.0 * h);
    let d5 = T::combo(&[
        (&fp, 8.0 / (12.0 * h)),
        (&fm, -8.0 / (12.0 * h)),
        (&fp2, -1.0 / (12.0 * h)),
        (&fm2, 1.0 / (12.0 * h)),
    ]);
    let gap = T::combo(&[(&d2, 1.0), (&d5, -1.0)]).max_norm();
    if gap > FD_SWITCH_REL * d5.max_norm().max(f64::MIN_POSITIVE) {
        d5
    } else {
        d2
    }
}
