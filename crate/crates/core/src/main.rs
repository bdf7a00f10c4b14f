use std::process::ExitCode;

fn main() -> ExitCode {
    lpmra::cli::main_with_args(std::env::args_os())
}
