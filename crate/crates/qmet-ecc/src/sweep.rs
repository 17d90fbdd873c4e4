//! Parameter sweeps over τ, t, p or ξ, evaluated in parallel and returned in
//! grid order, plus CSV output.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitflip::qfi_bitflip;
use crate::noecc::qfi_no_ecc;
use crate::oracle::amplitude_oracle_qfi;
use crate::parity::qfi_parity;
use crate::{EccError, EccParams, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    None,
    Parity,
    BitFlip,
}

impl FromStr for Code {
    type Err = EccError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Code::None),
            "parity" => Ok(Code::Parity),
            "bitflip" => Ok(Code::BitFlip),
            _ => Err(EccError::InvalidParams(format!("unknown code '{s}' (none|parity|bitflip)"))),
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Code::None => "none",
            Code::Parity => "parity",
            Code::BitFlip => "bitflip",
        })
    }
}

/// QFI of the closed form for the given code. `Code::None` ignores τ.
pub fn qfi(params: &EccParams, code: Code) -> Result<f64> {
    match code {
        Code::None => {
            params.validate()?;
            qfi_no_ecc(params.n, params.omega, params.gamma, params.t)
        }
        Code::Parity => qfi_parity(params),
        Code::BitFlip => qfi_bitflip(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// τ with t/τ held fixed.
    Tau,
    /// t, snapped to a multiple of τ when a code is used.
    T,
    P,
    Xi,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Tau => "tau",
            SweepParam::T => "t",
            SweepParam::P => "p",
            SweepParam::Xi => "xi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// `PARAM:START:STOP:STEPS:lin|log`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl FromStr for SweepSpec {
    type Err = EccError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || EccError::InvalidParams(format!("sweep '{s}' is not PARAM:START:STOP:STEPS:lin|log"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(bad());
        }
        let param = match parts[0] {
            "tau" => SweepParam::Tau,
            "t" => SweepParam::T,
            "p" => SweepParam::P,
            "xi" => SweepParam::Xi,
            _ => return Err(bad()),
        };
        let start: f64 = parts[1].parse().map_err(|_| bad())?;
        let stop: f64 = parts[2].parse().map_err(|_| bad())?;
        let steps: usize = parts[3].parse().map_err(|_| bad())?;
        let spacing = match parts[4] {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            _ => return Err(bad()),
        };
        if steps == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        if spacing == Spacing::Log && (start <= 0.0 || stop <= 0.0) {
            return Err(EccError::InvalidParams("log sweeps need positive endpoints".into()));
        }
        Ok(SweepSpec { param, start, stop, steps, spacing })
    }
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.start + f * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }

    fn apply(&self, base: &EccParams, code: Code, v: f64) -> EccParams {
        let mut p = *base;
        match self.param {
            SweepParam::Tau => {
                let k = (base.t / base.tau).round();
                p.tau = v;
                p.t = k * v;
            }
            SweepParam::T => {
                p.t = if code == Code::None { v } else { (v / base.tau).round().max(0.0) * base.tau };
            }
            SweepParam::P => p.p = v,
            SweepParam::Xi => p.xi = v,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub params: EccParams,
    pub qfi: f64,
    pub oracle: Option<f64>,
}

impl SweepRow {
    /// QFI/(nt)², zero at t = 0.
    pub fn qfi_over_hl(&self) -> f64 {
        let hl = self.params.heisenberg();
        if hl > 0.0 {
            self.qfi / hl
        } else {
            0.0
        }
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_sweep(base: &EccParams, code: Code, spec: &SweepSpec, with_oracle: bool) -> Result<Vec<SweepRow>> {
    spec.values()
        .into_par_iter()
        .map(|v| {
            let params = spec.apply(base, code, v);
            let q = qfi(&params, code)?;
            let oracle = if with_oracle { Some(amplitude_oracle_qfi(&params, code)?) } else { None };
            Ok(SweepRow { param: spec.param, params, qfi: q, oracle })
        })
        .collect()
}

pub const CSV_HEADER: &str = "param,omega,gamma,xi,p,tau,t,n,qfi,qfi_over_HL";

/// Header plus one LF-terminated row per point; floats in `{:.16e}`.
pub fn write_csv<W: Write>(out: &mut W, rows: &[SweepRow], with_oracle: bool) -> io::Result<()> {
    write!(out, "{CSV_HEADER}")?;
    if with_oracle {
        write!(out, ",oracle")?;
    }
    writeln!(out)?;
    for r in rows {
        let p = &r.params;
        write!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e}",
            r.param.name(),
            p.omega,
            p.gamma,
            p.xi,
            p.p,
            p.tau,
            p.t,
            p.n,
            r.qfi,
            r.qfi_over_hl()
        )?;
        if with_oracle {
            match r.oracle {
                Some(o) => write!(out, ",{o:.16e}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Named configurations. `nv-benchmark` is a nitrogen-vacancy register with
/// γ⁻¹ = τ = 1 µs, ξ⁻¹ = 0.5 ms, p = 0.06, ω/γ = 0.01, n = 25, t = 10τ.
pub fn preset(name: &str) -> Option<(EccParams, Code)> {
    match name {
        "nv-benchmark" => Some((
            EccParams { n: 25, omega: 1e4, gamma: 1e6, xi: 2e3, p: 0.06, tau: 1e-6, t: 1e-5 },
            Code::Parity,
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        let s: SweepSpec = "tau:1e-4:1e-2:3:log".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 1e-3).abs() < 1e-15);
        assert!("tau:1:2:3".parse::<SweepSpec>().is_err());
        assert!("q:1:2:3:lin".parse::<SweepSpec>().is_err());
        assert!("p:0:1:3:log".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn tau_sweep_keeps_rounds() {
        let base = EccParams::new(3, 1.0, 0.1, 0.1, 1.0);
        let spec: SweepSpec = "tau:0.01:0.1:4:lin".parse().unwrap();
        let rows = run_sweep(&base, Code::Parity, &spec, false).unwrap();
        for r in &rows {
            assert_eq!(r.params.rounds().unwrap(), 10);
        }
    }

    #[test]
    fn csv_layout() {
        let base = EccParams::new(2, 1.0, 0.0, 0.5, 1.0);
        let spec: SweepSpec = "p:0:0:1:lin".parse().unwrap();
        let rows = run_sweep(&base, Code::Parity, &spec, false).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("p,1.0000000000000000e0,"));
        assert!(lines[1].ends_with(",1.0000000000000000e0"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn preset_is_parity() {
        let (p, code) = preset("nv-benchmark").unwrap();
        assert_eq!(code, Code::Parity);
        assert_eq!(p.rounds().unwrap(), 10);
        assert!(preset("unknown").is_none());
    }
}
