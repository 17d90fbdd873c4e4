use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmet_cli::commands::{cmd_bundle, cmd_crypto, cmd_ecc, cmd_graph, cmd_verify, BundleArgs, CryptoArgs, EccArgs, GraphArgs, VerifyArgs};
use qmet_cli::CliError;

/// Quantum metrology toolkit. Outputs are deterministic for fixed flags and
/// seeds, independent of the worker count set by QMET_THREADS.
#[derive(Debug, Parser)]
#[command(name = "qmet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// QFI of a graph state under a collective rotation.
    ///
    /// X encoding: Σ_l u_l², where u_l counts vertices with the l-th distinct open
    /// neighbourhood. Y encoding: the same count over closed neighbourhoods.
    /// Dephasing: Σ_l f_l(p) g_l(p) over the same classes. Erasure: the QFI of the
    /// induced graph after Z-measuring the erased vertices. Exit 3 when a vertex
    /// is isolated and --oracle is not given.
    Graph(GraphArgs),
    /// Replace every vertex by a bundle of vertices sharing its neighbourhood.
    ///
    /// Writes the bundled edge list and reports its X-encoding QFI Σ_l u_l².
    Bundle(BundleArgs),
    /// QFI of an n-qubit GHZ probe under dephasing, optionally protected by the
    /// parity-check or bit-flip code, as CSV.
    ///
    /// Columns: param,omega,gamma,xi,p,tau,t,n,qfi,qfi_over_HL[,oracle] with
    /// qfi_over_HL = QFI/(nt)². Without a code the QFI is the dephased-GHZ closed
    /// form; with a code it is the rank-2 mixture QFI R²θ̇² + Ṙ²/(1−R²) after t/τ
    /// correction rounds. Exit 3 when t/τ is not an integer.
    Ecc(EccArgs),
    /// Soundness of an authentication protocol against an attack, as JSON.
    ///
    /// lhs is the key-averaged Pr(accept)·(1 − F). Bounds: trap code 3n/(2t) for
    /// one use and 9n/(4t) for two, Clifford code 2^(−t), delegated measurement
    /// 3n/(2t). Exact evaluation is chosen automatically when feasible.
    Crypto(CryptoArgs),
    /// Run the closed-form versus oracle cross-check suite.
    ///
    /// Prints one PASS/FAIL line per check with the measured delta and exits 1
    /// naming the failed checks. Setting QMET_VERIFY_PERTURB to a check name
    /// shifts that check's reference constant as a negative control.
    Verify(VerifyArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QMET_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Usage(format!("QMET_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Graph(a) => cmd_graph(a, out),
        Command::Bundle(a) => cmd_bundle(a, out),
        Command::Ecc(a) => cmd_ecc(a, out),
        Command::Crypto(a) => cmd_crypto(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = dispatch(&cli, &mut out);
    out.flush().ok();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
