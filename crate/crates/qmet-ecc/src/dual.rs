//! Complex dual numbers v + d·ε with ε² = 0, carrying a value and its
//! ω-derivative through the recurrences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: C64,
    pub d: C64,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// z^k by binary powering with a 64-bit exponent.
pub fn cpow(z: C64, mut k: u64) -> C64 {
    let mut acc = ONE;
    let mut base = z;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        k >>= 1;
        if k > 0 {
            base *= base;
        }
    }
    acc
}

/// a/b without forming |b|², which underflows for |b| below ~1e-154.
pub fn cdiv(a: C64, b: C64) -> C64 {
    let s = b.norm();
    (a / s) * (b.conj() / s)
}

impl Dual {
    pub fn new(v: C64, d: C64) -> Self {
        Self { v, d }
    }

    pub fn constant(v: C64) -> Self {
        Self { v, d: ZERO }
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn conj(self) -> Self {
        Self { v: self.v.conj(), d: self.d.conj() }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { v: self.v * s, d: self.d * s }
    }

    pub fn powu(self, k: u64) -> Self {
        match k {
            0 => Self::one(),
            1 => self,
            _ => {
                let p = cpow(self.v, k - 1);
                Self { v: p * self.v, d: p * self.d * k as f64 }
            }
        }
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d = if s == ZERO { ZERO } else { cdiv(self.d, s * 2.0) };
        Self { v: s, d }
    }

    /// ż/z
    pub fn log_derivative(self) -> C64 {
        cdiv(self.d, self.v)
    }

    pub fn norm(self) -> f64 {
        self.v.norm()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, s: f64) -> Dual {
        self.scale(s)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = cdiv(self.v, o.v);
        Dual { v: q, d: cdiv(self.d - q * o.d, o.v) }
    }
}

/// Row-major 2x2 matrix of duals.
pub type Mat2 = [[Dual; 2]; 2];

pub fn mat_identity() -> Mat2 {
    [[Dual::one(), Dual::zero()], [Dual::zero(), Dual::one()]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Dual::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_vec(a: &Mat2, v: [Dual; 2]) -> [Dual; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat_pow_binary(m: &Mat2, mut k: u64) -> Mat2 {
    let mut acc = mat_identity();
    let mut base = *m;
    while k > 0 {
        if k & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mat_mul(&base, &base);
        }
    }
    acc
}

/// Relative eigenvalue gap below which the spectral form is not used.
pub const EIGEN_GAP_REL: f64 = 1e-3;

/// M^k = α I + β M with β = (μ₊^k − μ₋^k)/(μ₊ − μ₋) and
/// α = (μ₊μ₋^k − μ₋μ₊^k)/(μ₊ − μ₋). Returns `None` when the eigenvalues are
/// too close for the divided differences to be accurate.
pub fn mat_pow_eigen(m: &Mat2, k: u64) -> Option<Mat2> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = tr.scale(0.5);
    let disc = (half * half - det).sqrt();
    let mp = half + disc;
    let mm = half - disc;
    let scale = mp.norm().max(mm.norm());
    if scale == 0.0 || 2.0 * disc.norm() <= EIGEN_GAP_REL * scale {
        return None;
    }
    let gap = mp - mm;
    let pk = mp.powu(k);
    let mk = mm.powu(k);
    let beta = (pk - mk) / gap;
    let alpha = (mp * mk - mm * pk) / gap;
    let mut out = [[Dual::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = m[i][j] * beta;
            if i == j {
                out[i][j] = out[i][j] + alpha;
            }
        }
    }
    Some(out)
}

/// Spectral form when the eigenvalues are well separated, binary powering
/// otherwise.
pub fn mat_pow(m: &Mat2, k: u64) -> Mat2 {
    mat_pow_eigen(m, k).unwrap_or_else(|| mat_pow_binary(m, k))
}
