use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(thermotomo::io::run(std::env::args_os()))
}
