use std::process::ExitCode;

fn main() -> ExitCode {
    dephase_core::cli::run()
}
