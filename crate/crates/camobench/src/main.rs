use std::process::ExitCode;

fn main() -> ExitCode {
    camobench::cli::run()
}
