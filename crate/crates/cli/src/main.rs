//! `kdsp` — preprocess a lattice basis, budget qubits, build the diagonal
//! covolume Hamiltonian, and search it exactly, with Grover, or with QAOA.

mod artifacts;
mod commands;
mod errors;

use clap::Parser;

fn main() {
    let cli = commands::Cli::parse();
    if let Err(e) = commands::run(cli) {
        eprintln!("error[{}]: {}", e.kind(), e.message());
        std::process::exit(e.exit_code());
    }
}
