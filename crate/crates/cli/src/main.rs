use std::io;
use std::process::ExitCode;
use std::thread;

use clap::Parser;
use mlunify_cli::{run, Cli};

/// Certificates are nested proof trees, and decoding and checking them
/// recurses once per level. Large certificates need more than the
/// default main-thread stack.
const STACK_BYTES: usize = 1 << 30;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock()))
        .expect("failed to start the worker thread");
    ExitCode::from(worker.join().unwrap_or(101))
}
