use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gmeasure::cli::main_exit_code())
}
