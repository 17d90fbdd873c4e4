use std::cell::Cell;

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::eig::hermitian_eig;
use crate::fd::{default_step, derivative};
use crate::matrix::{inner, norm, CMatrix};
use crate::tolerances::SUPPORT_CUT;
use crate::{DenseError, Result};

type Evaluator<'a> = Box<dyn Fn(f64) -> DensityMatrix + Send + Sync + 'a>;

/// A one-parameter family of density matrices ρ_θ.
pub struct ThetaFamily<'a> {
    eval: Evaluator<'a>,
    step: Option<f64>,
}

impl<'a> ThetaFamily<'a> {
    pub fn new(eval: impl Fn(f64) -> DensityMatrix + Send + Sync + 'a) -> Self {
        Self { eval: Box::new(eval), step: None }
    }

    /// Overrides the default finite-difference step.
    pub fn with_step(mut self, h: f64) -> Self {
        assert!(h > 0.0, "finite-difference step must be positive");
        self.step = Some(h);
        self
    }

    pub fn evaluate(&self, theta: f64) -> DensityMatrix {
        (self.eval)(theta)
    }

    pub fn step_at(&self, theta: f64) -> f64 {
        self.step.unwrap_or_else(|| default_step(theta))
    }

    /// ρ_θ and its central-difference derivative.
    pub fn value_and_derivative(&self, theta: f64) -> Result<(CMatrix, CMatrix)> {
        let rho = self.evaluate(theta).into_matrix();
        let d = rho.dim();
        let bad = Cell::new(false);
        let drho = derivative(
            |x| {
                let m = self.evaluate(x).into_matrix();
                if m.dim() != d {
                    bad.set(true);
                    CMatrix::zeros(d)
                } else {
                    m
                }
            },
            theta,
            self.step_at(theta),
        );
        if bad.get() {
            return Err(DenseError::DegenerateFamily);
        }
        Ok((rho, drho))
    }
}

/// Connected components of the joint nonzero pattern of the given matrices.
/// Components are returned sorted by their smallest index.
pub fn block_structure(mats: &[&CMatrix]) -> Vec<Vec<usize>> {
    let d = mats[0].dim();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for m in mats {
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if a.re != 0.0 || a.im != 0.0 || b.re != 0.0 || b.im != 0.0 {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn sub_block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// 2 Σ_{j,k} |<j|ρ̇|k>|² / (λ_j + λ_k) over pairs touching the support.
///
/// Block-diagonal structure shared by ρ and ρ̇ is detected and each block is
/// diagonalized separately.
pub fn qfi_from_derivative(rho: &CMatrix, drho: &CMatrix) -> Result<f64> {
    if rho.dim() != drho.dim() {
        return Err(DenseError::DimMismatch(rho.dim(), drho.dim()));
    }
    let mut total = 0.0;
    for idx in block_structure(&[rho, drho]) {
        let rb = sub_block(rho, &idx);
        let db = sub_block(drho, &idx);
        if db.max_abs() == 0.0 {
            continue;
        }
        let spec = hermitian_eig(&rb)?;
        let v = &spec.vectors;
        let dv = db.matmul(v);
        let k = idx.len();
        let lam: Vec<f64> = spec.values.iter().map(|l| l.max(0.0)).collect();
        for a in 0..k {
            for b in 0..k {
                if lam[a].max(lam[b]) <= SUPPORT_CUT {
                    continue;
                }
                let mut elem = C64::new(0.0, 0.0);
                for r in 0..k {
                    elem += v[(r, a)].conj() * dv[(r, b)];
                }
                total += 2.0 * elem.norm_sqr() / (lam[a] + lam[b]);
            }
        }
    }
    Ok(total)
}

/// Spectral QFI with central-difference ρ̇.
pub fn qfi_spectral(fam: &ThetaFamily, theta: f64) -> Result<f64> {
    let (rho, drho) = fam.value_and_derivative(theta)?;
    qfi_from_derivative(&rho, &drho)
}

fn root_fidelity_block(r: &CMatrix, s: &CMatrix) -> Result<f64> {
    let sr = hermitian_eig(r)?;
    let top = sr.values.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return Ok(0.0);
    }
    let cut = 1e-14 * top;
    let root = sr.map(|l| if l > cut { l.sqrt() } else { 0.0 });
    let m = root.matmul(s).matmul(&root);
    let sm = hermitian_eig(&m)?;
    let mtop = sm.values.iter().cloned().fold(0.0, f64::max);
    let mcut = 1e-14 * mtop.max(f64::MIN_POSITIVE);
    Ok(sm.values.iter().filter(|&&l| l > mcut).map(|l| l.sqrt()).sum())
}

/// Root fidelity Tr sqrt(sqrt(ρ) σ sqrt(ρ)) evaluated blockwise.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(DenseError::DimMismatch(rho.dim(), sigma.dim()));
    }
    if rho.is_pure() || sigma.is_pure() {
        return Ok(rho.matrix().matmul(sigma.matrix()).trace().re.max(0.0).sqrt());
    }
    let mut total = 0.0;
    for idx in block_structure(&[rho.matrix(), sigma.matrix()]) {
        total += root_fidelity_block(&sub_block(rho.matrix(), &idx), &sub_block(sigma.matrix(), &idx))?;
    }
    Ok(total)
}

/// 8 (1 - sqrt F) / δθ² with F the fidelity between ρ at θ ∓ δθ/2.
///
/// The symmetric placement cancels the odd term of the expansion, which makes
/// the estimate second-order accurate in δθ.
pub fn qfi_fidelity_limit(fam: &ThetaFamily, theta: f64, dtheta: f64) -> Result<f64> {
    let a = fam.evaluate(theta - 0.5 * dtheta);
    let b = fam.evaluate(theta + 0.5 * dtheta);
    if a.dim() != b.dim() {
        return Err(DenseError::DegenerateFamily);
    }
    let rf = root_fidelity(&a, &b)?.min(1.0);
    Ok(8.0 * (1.0 - rf) / (dtheta * dtheta))
}

/// 4(<ψ̇|ψ̇> - |<ψ̇|ψ>|²) for a pure-state family.
pub fn qfi_pure(psi: impl Fn(f64) -> Vec<C64>, theta: f64) -> Result<f64> {
    qfi_pure_with_step(psi, theta, default_step(theta))
}

pub fn qfi_pure_with_step(psi: impl Fn(f64) -> Vec<C64>, theta: f64, h: f64) -> Result<f64> {
    let v = psi(theta);
    let nv = norm(&v);
    if (nv - 1.0).abs() > 1e-10 {
        return Err(DenseError::NotNormalized(nv));
    }
    let dv = derivative(&psi, theta, h);
    let a = inner(&dv, &dv).re;
    let b = inner(&dv, &v).norm_sqr();
    Ok(4.0 * (a - b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz_phase(n: usize, theta: f64) -> Vec<C64> {
        let d = 1 << n;
        let r = 0.5f64.sqrt();
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[0] = C64::from_polar(r, -(n as f64) * theta / 2.0);
        v[d - 1] = C64::from_polar(r, (n as f64) * theta / 2.0);
        v
    }

    #[test]
    fn ghz3_spectral_is_nine() {
        let fam = ThetaFamily::new(|th| DensityMatrix::from_pure(&ghz_phase(3, th)));
        let q = qfi_spectral(&fam, 0.4).unwrap();
        assert!((q - 9.0).abs() < 1e-8, "q = {q}");
    }

    #[test]
    fn constant_family_has_zero_qfi() {
        let fam = ThetaFamily::new(|_| DensityMatrix::maximally_mixed(4));
        assert_eq!(qfi_spectral(&fam, 0.1).unwrap(), 0.0);
        assert!(qfi_fidelity_limit(&fam, 0.1, 1e-3).unwrap().abs() < 1e-8);
    }

    #[test]
    fn ghz3_fidelity_limit() {
        let fam = ThetaFamily::new(|th| DensityMatrix::from_pure(&ghz_phase(3, th)));
        let q = qfi_fidelity_limit(&fam, 0.4, 1e-3).unwrap();
        assert!((q - 9.0).abs() < 9e-3, "q = {q}");
    }

    #[test]
    fn global_phase_is_invisible() {
        let q = qfi_pure(|th| vec![C64::from_polar(1.0, th), C64::new(0.0, 0.0)], 0.2).unwrap();
        assert!(q.abs() < 1e-9);
    }

    #[test]
    fn block_structure_finds_pairs() {
        let mut m = CMatrix::identity(4);
        m[(0, 3)] = C64::new(0.1, 0.0);
        m[(3, 0)] = C64::new(0.1, 0.0);
        let b = block_structure(&[&m]);
        assert_eq!(b, vec![vec![0, 3], vec![1], vec![2]]);
    }
}
