#![allow(dead_code)]

use qmet_dense::{hermitian_eig, CMatrix, DensityMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen::<f64>().max(1e-300);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let vals: Vec<C64> = (0..d * d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let g = CMatrix::from_vec(d, vals);
    (&g + &g.dagger()).scale_re(0.5)
}

/// Ginibre-style random state of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DensityMatrix {
    let mut m = CMatrix::zeros(d);
    for _ in 0..rank {
        let v: Vec<C64> = (0..d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
        m += &CMatrix::outer(&v, &v);
    }
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(m.scale_re(1.0 / tr))
}

/// exp(-i t G) for Hermitian G via its eigendecomposition.
pub fn unitary(g: &CMatrix, t: f64) -> CMatrix {
    let s = hermitian_eig(g).unwrap();
    let d = g.dim();
    let v = &s.vectors;
    CMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| v[(i, k)] * C64::from_polar(1.0, -t * s.values[k]) * v[(j, k)].conj()).sum()
    })
}
