use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ssrlab::cli::run(std::env::args_os()))
}
