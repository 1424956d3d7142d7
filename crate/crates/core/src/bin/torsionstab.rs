use std::process::ExitCode;

fn main() -> ExitCode {
    torsionstab::cli::main_from(std::env::args_os())
}
