//! Subcommand implementations. Each writes its report to the given sink and
//! returns a [`CliError`] carrying the process exit code on failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use qmet_crypto::instance::combinations;
use qmet_crypto::soundness::{exact_feasible, split_double};
use qmet_crypto::{
    soundness_clifford_single, soundness_delegated, soundness_double, soundness_trap_single, AttackSpec, CryptoError, Instance, Mode,
    Protocol,
};
use qmet_ecc::{amplitude_oracle_qfi, preset, run_sweep, write_csv, Code, EccError, EccParams, SweepParam, SweepRow, SweepSpec};
use qmet_graph::{
    bundle, find_yz_stabilizer, mean_qfi_erasure, oracle_graph_qfi, partition, qfi_dephasing, qfi_erasure, qfi_x, qfi_y, Encoding,
    Graph, GraphError, Noise,
};
use qmet_pauli::{PauliError, PauliString};

use crate::checks::{self, Ctx, Scope};
use crate::CliError;

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Parse { .. } | GraphError::SizeMismatch { .. } | GraphError::BadVertex(_) | GraphError::BadProbability(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<EccError> for CliError {
    fn from(e: EccError) -> Self {
        match e {
            EccError::InvalidParams(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<CryptoError> for CliError {
    fn from(e: CryptoError) -> Self {
        match e {
            CryptoError::Parse(_) | CryptoError::BadAttack(_) | CryptoError::Pauli(PauliError::Parse(_)) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text.parse::<Graph>()?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    out.write_all(bytes).map_err(|e| CliError::Usage(format!("stdout: {e}")))
}

fn members(mask: u64) -> String {
    let v: Vec<String> = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b.to_string()).collect();
    v.join(",")
}

// ---------------------------------------------------------------- graph

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    X,
    Y,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Edge-list file: the first line holds n, every further line an edge `u v`; `#` starts a comment.
    #[arg(long)]
    pub edges: PathBuf,
    /// Generator of the encoding: sum of X_j / 2 or sum of Y_j / 2.
    #[arg(long, value_enum, default_value = "x")]
    pub encoding: EncodingArg,
    /// Independent Z flips with this probability on every qubit (X encoding only).
    #[arg(long, conflicts_with_all = ["erase", "mean_erase"])]
    pub dephasing: Option<f64>,
    /// Comma-separated vertices lost before encoding (X encoding only).
    #[arg(long, value_delimiter = ',', conflicts_with = "mean_erase")]
    pub erase: Option<Vec<usize>>,
    /// Average over every set of this many erased vertices (X encoding only).
    #[arg(long)]
    pub mean_erase: Option<usize>,
    /// Also evaluate the dense state-vector oracle and print the difference.
    #[arg(long)]
    pub oracle: bool,
    /// Search for a stabilizer made only of Y and Z factors.
    #[arg(long)]
    pub yz_stabilizer: bool,
}

fn oracle_mean_erasure(g: &Graph, e: usize) -> Result<f64, CliError> {
    let sets = combinations(g.n(), e);
    if sets.is_empty() {
        return Err(CliError::Domain(format!("cannot erase {e} of {} vertices", g.n())));
    }
    let mut sum = 0.0;
    for s in &sets {
        sum += oracle_graph_qfi(g, Encoding::X, &Noise::Erasure(s.clone()))?;
    }
    Ok(sum / sets.len() as f64)
}

pub fn cmd_graph(args: &GraphArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.edges)?;
    let noisy = args.dephasing.is_some() || args.erase.is_some() || args.mean_erase.is_some();
    if noisy && args.encoding == EncodingArg::Y {
        return Err(CliError::Usage("noise models are defined for the X encoding only".into()));
    }
    let closed: Result<f64, GraphError> = match (args.encoding, args.dephasing, &args.erase, args.mean_erase) {
        (EncodingArg::Y, ..) => Ok(qfi_y(&g) as f64),
        (_, Some(p), ..) => qfi_dephasing(&g, p),
        (_, _, Some(e), _) => qfi_erasure(&g, e),
        (_, _, _, Some(e)) => mean_qfi_erasure(&g, e),
        _ => qfi_x(&g).map(|q| q as f64),
    };
    // an isolated vertex only blocks the closed form; the oracle still applies
    let mut report = format!("n={} edges={}\n", g.n(), g.edge_count());
    let closed = match closed {
        Err(GraphError::IsolatedVertex(v)) if args.oracle => {
            report += &format!("qfi=unavailable (vertex {v} is isolated)\n");
            None
        }
        other => Some(other?),
    };
    if let Some(q) = closed {
        report += &format!("qfi={q}\n");
    }
    if args.encoding == EncodingArg::X {
        for (i, c) in partition(&g).classes.iter().enumerate() {
            report += &format!("class {i}: members={{{}}} u={} m={}\n", members(c.members), c.u(), c.m());
        }
    }
    if args.oracle {
        let o = match (args.encoding, args.dephasing, &args.erase, args.mean_erase) {
            (EncodingArg::Y, ..) => oracle_graph_qfi(&g, Encoding::Y, &Noise::None)?,
            (_, Some(p), ..) => oracle_graph_qfi(&g, Encoding::X, &Noise::Dephasing(p))?,
            (_, _, Some(e), _) => oracle_graph_qfi(&g, Encoding::X, &Noise::Erasure(e.clone()))?,
            (_, _, _, Some(e)) => oracle_mean_erasure(&g, e)?,
            _ => oracle_graph_qfi(&g, Encoding::X, &Noise::None)?,
        };
        report += &format!("oracle_qfi={o:.12}\n");
        if let Some(q) = closed {
            report += &format!("oracle_delta={:.3e}\n", (q - o).abs());
        }
    }
    if args.yz_stabilizer {
        match find_yz_stabilizer(&g)? {
            Some(s) => report += &format!("yz_stabilizer={s}\n"),
            None => report += "yz_stabilizer=none\n",
        }
    }
    emit(out, report.as_bytes())
}

// ---------------------------------------------------------------- bundle

#[derive(Debug, Args)]
pub struct BundleArgs {
    /// Edge-list file of the base graph.
    #[arg(long)]
    pub edges: PathBuf,
    /// Comma-separated bundle size for every base vertex.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Where to write the bundled edge list.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_bundle(args: &BundleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.edges)?;
    let b = bundle(&g, &args.sizes)?;
    let text = b.to_edge_list();
    if text.parse::<Graph>()? != b {
        return Err(CliError::Domain("bundled edge list does not parse back to the same graph".into()));
    }
    write_file(&args.out, text.as_bytes())?;
    let q = qfi_x(&b)?;
    emit(out, format!("n={} edges={}\nqfi={q}\n", b.n(), b.edge_count()).as_bytes())
}

// ---------------------------------------------------------------- ecc

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeArg {
    None,
    Parity,
    Bitflip,
}

impl From<CodeArg> for Code {
    fn from(c: CodeArg) -> Self {
        match c {
            CodeArg::None => Code::None,
            CodeArg::Parity => Code::Parity,
            CodeArg::Bitflip => Code::BitFlip,
        }
    }
}

#[derive(Debug, Args)]
pub struct EccArgs {
    /// Number of sensing qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Signal frequency ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Sensing-qubit dephasing rate γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Ancilla dephasing rate ξ.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Syndrome misdiagnosis probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Interval between correction rounds τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Total sensing time; a multiple of τ whenever a code is active.
    #[arg(long)]
    pub t: Option<f64>,
    /// Correction scheme.
    #[arg(long, value_enum)]
    pub code: Option<CodeArg>,
    /// PARAM:START:STOP:STEPS:lin|log with PARAM one of tau, t, p, xi.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Named parameter set (nv-benchmark); explicit flags override its values.
    #[arg(long)]
    pub preset: Option<String>,
    /// Add a column from the amplitude-space oracle (n ≤ 8).
    #[arg(long)]
    pub oracle: bool,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn ecc_base(args: &EccArgs) -> Result<(EccParams, Code), CliError> {
    let (mut params, mut code) = match &args.preset {
        Some(name) => preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset '{name}' (nv-benchmark)")))?,
        None => {
            let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("--{flag} is required without --preset")));
            let n = args.n.ok_or_else(|| CliError::Usage("--n is required without --preset".into()))?;
            (EccParams::new(n, need(args.omega, "omega")?, need(args.gamma, "gamma")?, need(args.tau, "tau")?, need(args.t, "t")?), Code::None)
        }
    };
    if let Some(n) = args.n {
        params.n = n;
    }
    for (slot, v) in [
        (&mut params.omega, args.omega),
        (&mut params.gamma, args.gamma),
        (&mut params.xi, args.xi),
        (&mut params.p, args.p),
        (&mut params.tau, args.tau),
        (&mut params.t, args.t),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if let Some(c) = args.code {
        code = c.into();
    }
    Ok((params, code))
}

pub fn cmd_ecc(args: &EccArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (base, code) = ecc_base(args)?;
    base.validate()?;
    if code != Code::None {
        base.rounds()?;
    }
    let rows = match &args.sweep {
        Some(s) => {
            let spec: SweepSpec = s.parse()?;
            run_sweep(&base, code, &spec, args.oracle)?
        }
        None => {
            let qfi = qmet_ecc::qfi(&base, code)?;
            let oracle = if args.oracle { Some(amplitude_oracle_qfi(&base, code)?) } else { None };
            vec![SweepRow { param: SweepParam::T, params: base, qfi, oracle }]
        }
    };
    let mut csv = Vec::new();
    write_csv(&mut csv, &rows, args.oracle).map_err(|e| CliError::Usage(e.to_string()))?;
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => emit(out, &csv),
    }
}

// ---------------------------------------------------------------- crypto

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    /// Trap code, one channel use.
    Trap1,
    /// Trap code, two channel uses with a phase in between.
    Trap2,
    /// Clifford code, one channel use.
    Cliff1,
    /// Clifford code, two channel uses with a phase in between.
    Cliff2,
    /// Delegated measurement of a trap-encoded state.
    Delegated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact when the register is small enough, sampled otherwise.
    Auto,
    Exact,
    /// Brute-force key enumeration (small registers only).
    Dense,
    Sampled,
}

#[derive(Debug, Args)]
pub struct CryptoArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    /// Data qubits (GHZ probe).
    #[arg(long)]
    pub n: usize,
    /// Flag qubits.
    #[arg(long)]
    pub t: usize,
    /// id, pauli:XIZ.., mix:w*P,w*P.., depol:λ or double:SPEC;SPEC. Shorter Paulis are padded with identities.
    #[arg(long, default_value = "id")]
    pub attack: String,
    /// Monte-Carlo trials in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Master seed for sampled mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Phase applied between the two channel uses.
    #[arg(long, default_value_t = 0.8)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// JSON destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Extends every Pauli acting on fewer than `m` qubits by identities on the trailing qubits.
pub fn pad_attack(a: AttackSpec, m: usize) -> AttackSpec {
    let pad = |p: PauliString| if p.n_qubits() < m { p.tensor(&PauliString::identity(m - p.n_qubits())) } else { p };
    match a {
        AttackSpec::FixedPauli(p) => AttackSpec::FixedPauli(pad(p)),
        AttackSpec::PauliMixture(items) => AttackSpec::PauliMixture(items.into_iter().map(|(w, p)| (w, pad(p))).collect()),
        AttackSpec::Double(a, b) => AttackSpec::double(pad_attack(*a, m), pad_attack(*b, m)),
        other => other,
    }
}

pub fn cmd_crypto(args: &CryptoArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let attack: AttackSpec = args.attack.parse()?;
    let inst = Instance::ghz(args.n, args.t)?;
    let attack = pad_attack(attack, inst.m());
    let (protocol, uses) = match args.protocol {
        ProtocolArg::Trap1 => (Protocol::Trap, 1),
        ProtocolArg::Trap2 => (Protocol::Trap, 2),
        ProtocolArg::Cliff1 => (Protocol::Clifford, 1),
        ProtocolArg::Cliff2 => (Protocol::Clifford, 2),
        ProtocolArg::Delegated => (Protocol::Delegated, 1),
    };
    let sampled = Mode::Sampled { trials: args.trials, seed: args.seed };
    let mode = match args.mode {
        ModeArg::Auto if exact_feasible(protocol, uses, inst.m()) => Mode::Exact,
        ModeArg::Auto | ModeArg::Sampled => sampled,
        ModeArg::Exact => Mode::Exact,
        ModeArg::Dense => Mode::Dense,
    };
    let report = match args.protocol {
        ProtocolArg::Trap1 => soundness_trap_single(&inst, &attack, mode)?,
        ProtocolArg::Cliff1 => soundness_clifford_single(&inst, &attack, mode)?,
        ProtocolArg::Delegated => soundness_delegated(&inst, &attack, mode)?,
        ProtocolArg::Trap2 | ProtocolArg::Cliff2 => {
            let (g1, g2) = split_double(&attack);
            soundness_double(protocol, &inst, &g1, &g2, args.theta, mode)?
        }
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Domain(e.to_string()))?;
    json.push('\n');
    match &args.out {
        Some(path) => write_file(path, json.as_bytes()),
        None => emit(out, json.as_bytes()),
    }
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced grids; finishes in well under a minute.
    #[arg(long)]
    pub quick: bool,
    /// Run only these criteria (1..=13); repeatable.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=13))]
    pub criterion: Vec<u8>,
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Ctx::from_env(if args.quick { Scope::Quick } else { Scope::Full });
    let selected: Vec<u8> = if args.criterion.is_empty() { checks::CRITERIA.collect() } else { args.criterion.clone() };
    let start = Instant::now();
    let mut failed = Vec::new();
    let mut total = 0;
    for k in selected {
        for r in checks::criterion(&ctx, k) {
            emit(out, format!("{r}\n").as_bytes())?;
            out.flush().ok();
            total += 1;
            if !r.passed {
                failed.push(r.name);
            }
        }
    }
    eprintln!("verify finished in {:.1} s", start.elapsed().as_secs_f64());
    emit(out, format!("{} of {total} checks passed\n", total - failed.len()).as_bytes())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("failed checks: {}", failed.join(", "))))
    }
}
