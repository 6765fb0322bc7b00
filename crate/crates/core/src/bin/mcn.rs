use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mcn_core::cli::run_from_args(std::env::args_os()).code())
}
