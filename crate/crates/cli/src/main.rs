use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hierq_cli::run(std::env::args_os()) as u8)
}
