use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qorder::cli::run())
}
