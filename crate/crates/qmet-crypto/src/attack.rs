//! Adversarial channels and their Pauli weights.
//!
//! Text form: `id`, `pauli:-XIZ`, `mix:0.9*III,0.1*ZII`, `depol:0.3` and
//! `double:<spec>;<spec>`. Kraus attacks exist only programmatically.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use qmet_dense::CMatrix;
use qmet_pauli::{channel_pauli_coeffs, PauliString};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CryptoError, Result};

const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum AttackSpec {
    Identity,
    FixedPauli(PauliString),
    /// (probability, Pauli) pairs.
    PauliMixture(Vec<(f64, PauliString)>),
    /// ρ → (1-λ)ρ + λ I/2^m on the whole register.
    Depolarizing(f64),
    Kraus(Vec<CMatrix>),
    Double(Box<AttackSpec>, Box<AttackSpec>),
}

fn bad(msg: impl Into<String>) -> CryptoError {
    CryptoError::BadAttack(msg.into())
}

impl AttackSpec {
    pub fn unitary(u: CMatrix) -> Self {
        Self::Kraus(vec![u])
    }

    pub fn double(first: AttackSpec, second: AttackSpec) -> Self {
        Self::Double(Box::new(first), Box::new(second))
    }

    /// Checks the attack against an m-qubit register.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            Self::Identity => Ok(()),
            Self::FixedPauli(p) => check_pauli(p, m),
            Self::PauliMixture(items) => {
                if items.is_empty() {
                    return Err(bad("empty mixture"));
                }
                let mut total = 0.0;
                for (w, p) in items {
                    check_pauli(p, m)?;
                    if !(*w >= 0.0) {
                        return Err(bad(format!("negative or NaN probability {w}")));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > PROB_TOL {
                    return Err(bad(format!("probabilities sum to {total}")));
                }
                Ok(())
            }
            Self::Depolarizing(l) => {
                if (0.0..=1.0).contains(l) {
                    Ok(())
                } else {
                    Err(bad(format!("depolarizing strength {l} outside [0, 1]")))
                }
            }
            Self::Kraus(ops) => {
                let d = 1usize << m;
                if let Some(k) = ops.iter().find(|k| k.dim() != d) {
                    return Err(bad(format!("Kraus operator of dimension {} on {m} qubits", k.dim())));
                }
                channel_pauli_coeffs(ops).map(|_| ()).map_err(|e| bad(e.to_string()))
            }
            Self::Double(a, b) => {
                if matches!(**a, Self::Double(..)) || matches!(**b, Self::Double(..)) {
                    return Err(bad("nested double attack"));
                }
                a.validate(m)?;
                b.validate(m)
            }
        }
    }

    /// Fails on a double attack, which only makes sense for two channel uses.
    pub fn single_use(&self, m: usize) -> Result<&Self> {
        if matches!(self, Self::Double(..)) {
            return Err(bad("double attack given to a single-use protocol"));
        }
        self.validate(m)?;
        Ok(self)
    }

    pub fn is_pauli_mixture(&self) -> bool {
        matches!(self, Self::Identity | Self::FixedPauli(_) | Self::PauliMixture(_) | Self::Depolarizing(_))
    }

    /// Adjoint channel for unitary-type attacks: Kraus operators are
    /// replaced by their adjoints; Pauli channels are self-adjoint.
    pub fn adjoint(&self) -> Self {
        match self {
            Self::Kraus(ops) => Self::Kraus(ops.iter().map(|k| k.dagger()).collect()),
            Self::Double(a, b) => Self::double(b.adjoint(), a.adjoint()),
            other => other.clone(),
        }
    }

    /// Σ_α |a_{α,P}|² for every Pauli with nonzero weight, as (x, z, w).
    pub fn pauli_weights(&self, m: usize) -> Result<Vec<(u64, u64, f64)>> {
        self.single_use(m)?;
        let mut out: Vec<(u64, u64, f64)> = Vec::new();
        let mut push = |x: u64, z: u64, w: f64| match out.iter_mut().find(|e| e.0 == x && e.1 == z) {
            Some(e) => e.2 += w,
            None => out.push((x, z, w)),
        };
        match self {
            Self::Identity => push(0, 0, 1.0),
            Self::FixedPauli(p) => push(p.x_mask(), p.z_mask(), 1.0),
            Self::PauliMixture(items) => {
                for (w, p) in items {
                    push(p.x_mask(), p.z_mask(), *w);
                }
            }
            Self::Depolarizing(l) => {
                if m > 8 {
                    return Err(CryptoError::TooLarge { what: "explicit depolarizing weights", m, max: 8 });
                }
                let each = l / 4f64.powi(m as i32);
                for x in 0..1u64 << m {
                    for z in 0..1u64 << m {
                        push(x, z, each + if x == 0 && z == 0 { 1.0 - l } else { 0.0 });
                    }
                }
            }
            Self::Kraus(ops) => {
                for (p, w) in channel_pauli_coeffs(ops)?.weights() {
                    push(p.x_mask(), p.z_mask(), w);
                }
            }
            Self::Double(..) => unreachable!("rejected by single_use"),
        }
        out.retain(|e| e.2 > 0.0);
        Ok(out)
    }

    /// Total Pauli weight per support pattern (index = support mask).
    pub fn support_weights(&self, m: usize) -> Result<Vec<f64>> {
        self.single_use(m)?;
        let mut w = vec![0.0; 1 << m];
        if let Self::Depolarizing(l) = self {
            // 3^|S| Paulis share each support
            let each = l / 4f64.powi(m as i32);
            for (s, ws) in w.iter_mut().enumerate() {
                *ws = each * 3f64.powi(s.count_ones() as i32);
            }
            w[0] += 1.0 - l;
            return Ok(w);
        }
        for (x, z, pw) in self.pauli_weights(m)? {
            w[(x | z) as usize] += pw;
        }
        Ok(w)
    }

    /// Weight on the identity, a = Σ_α |a_{α,I}|².
    pub fn identity_weight(&self, m: usize) -> Result<f64> {
        Ok(self.support_weights(m)?[0])
    }

    /// Γ(ρ) on a dense m-qubit matrix.
    pub fn apply_dense(&self, rho: &CMatrix) -> Result<CMatrix> {
        let m = rho.dim().trailing_zeros() as usize;
        self.single_use(m)?;
        Ok(match self {
            Self::Identity => rho.clone(),
            Self::FixedPauli(p) => pauli_sandwich(p, rho),
            Self::PauliMixture(items) => {
                let mut out = CMatrix::zeros(rho.dim());
                for (w, p) in items {
                    out += &pauli_sandwich(p, rho).scale_re(*w);
                }
                out
            }
            Self::Depolarizing(l) => {
                let tr = rho.trace();
                let mut out = rho.scale_re(1.0 - l);
                out += &CMatrix::identity(rho.dim()).scale(tr * (*l / rho.dim() as f64));
                out
            }
            Self::Kraus(ops) => {
                let mut out = CMatrix::zeros(rho.dim());
                for k in ops {
                    out += &k.sandwich(rho);
                }
                out
            }
            Self::Double(..) => unreachable!("rejected by single_use"),
        })
    }

    pub(crate) fn sampler(&self, m: usize) -> Result<PauliSampler> {
        self.single_use(m)?;
        Ok(match self {
            Self::Depolarizing(l) => PauliSampler::Depol { lambda: *l, m },
            _ => {
                let weights = self.pauli_weights(m)?;
                let items: Vec<(u64, u64)> = weights.iter().map(|e| (e.0, e.1)).collect();
                let dist = WeightedIndex::new(weights.iter().map(|e| e.2)).map_err(|e| bad(e.to_string()))?;
                PauliSampler::Discrete { items, dist }
            }
        })
    }
}

fn check_pauli(p: &PauliString, m: usize) -> Result<()> {
    if p.n_qubits() != m {
        return Err(bad(format!("Pauli {p} acts on {} qubits, register has {m}", p.n_qubits())));
    }
    Ok(())
}

fn pauli_sandwich(p: &PauliString, rho: &CMatrix) -> CMatrix {
    // the phase of P cancels in P ρ P†
    let h = PauliString::hermitian(p.n_qubits(), p.x_mask(), p.z_mask(), false);
    h.right_mul(&h.left_mul(rho))
}

/// Draws Pauli masks with the attack's weights.
pub(crate) enum PauliSampler {
    Discrete { items: Vec<(u64, u64)>, dist: WeightedIndex<f64> },
    Depol { lambda: f64, m: usize },
}

impl PauliSampler {
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        match self {
            Self::Discrete { items, dist } => items[dist.sample(rng)],
            Self::Depol { lambda, m } => {
                if rng.gen::<f64>() < *lambda {
                    let mask = (1u64 << m) - 1;
                    (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask)
                } else {
                    (0, 0)
                }
            }
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("id"),
            Self::FixedPauli(p) => write!(f, "pauli:{p}"),
            Self::PauliMixture(items) => {
                f.write_str("mix:")?;
                for (i, (w, p)) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w}*{p}")?;
                }
                Ok(())
            }
            Self::Depolarizing(l) => write!(f, "depol:{l}"),
            Self::Kraus(ops) => write!(f, "kraus:{}", ops.len()),
            Self::Double(a, b) => write!(f, "double:{a};{b}"),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = CryptoError;

    fn from_str(s: &str) -> Result<Self> {
        let err = || CryptoError::Parse(s.to_string());
        let s = s.trim();
        if s == "id" {
            return Ok(Self::Identity);
        }
        let (head, body) = s.split_once(':').ok_or_else(err)?;
        match head {
            "pauli" => Ok(Self::FixedPauli(body.parse().map_err(|_| err())?)),
            "depol" => Ok(Self::Depolarizing(body.trim().parse().map_err(|_| err())?)),
            "mix" => {
                let items = body
                    .split(',')
                    .map(|term| {
                        let (w, p) = term.split_once('*').ok_or_else(err)?;
                        Ok((w.trim().parse::<f64>().map_err(|_| err())?, p.parse::<PauliString>().map_err(|_| err())?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::PauliMixture(items))
            }
            "double" => {
                let (a, b) = body.split_once(';').ok_or_else(err)?;
                let (a, b): (AttackSpec, AttackSpec) = (a.parse()?, b.parse()?);
                if matches!(a, Self::Double(..)) || matches!(b, Self::Double(..)) {
                    return Err(err());
                }
                Ok(Self::double(a, b))
            }
            _ => Err(err()),
        }
    }
}

/// Identity, every non-identity fixed Pauli, 20 seeded Pauli mixtures and
/// global depolarizing at four strengths, each with a label.
pub fn attack_battery(m: usize, seed: u64) -> Vec<(String, AttackSpec)> {
    let mut out = vec![("id".to_string(), AttackSpec::Identity)];
    for p in PauliString::all(m).filter(|p| !p.is_identity()) {
        let a = AttackSpec::FixedPauli(p);
        out.push((a.to_string(), a));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = (1u64 << m) - 1;
    for k in 0..20 {
        let terms = rng.gen_range(2..=5);
        let raw: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut items: Vec<(f64, PauliString)> = raw
            .iter()
            .map(|w| (w / total, PauliString::hermitian(m, rng.gen::<u64>() & mask, rng.gen::<u64>() & mask, false)))
            .collect();
        // make the probabilities sum to one exactly
        let head: f64 = items[1..].iter().map(|e| e.0).sum();
        items[0].0 = 1.0 - head;
        out.push((format!("mixture-{k}"), AttackSpec::PauliMixture(items)));
    }
    for l in [0.1, 0.4, 0.7, 1.0] {
        out.push((format!("depol-{l}"), AttackSpec::Depolarizing(l)));
    }
    out
}

/// exp(-i φ H) for a Hermitian generator, via its spectrum.
pub fn unitary_from_generator(h: &CMatrix, phi: f64) -> Result<CMatrix> {
    let spec = qmet_dense::hermitian_eig(h)?;
    let d = h.dim();
    let mut u = CMatrix::zeros(d);
    for (k, &lam) in spec.values.iter().enumerate() {
        let v = spec.vector(k);
        let ph = C64::from_polar(1.0, -phi * lam);
        for i in 0..d {
            for j in 0..d {
                u[(i, j)] += ph * v[i] * v[j].conj();
            }
        }
    }
    Ok(u)
}
