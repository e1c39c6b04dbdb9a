use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(bmcm::cli::main_with_stdio())
}
