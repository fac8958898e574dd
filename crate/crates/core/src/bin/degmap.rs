use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = degmap::cli::run(std::env::args_os());
    if code == degmap::cli::EXIT_ERROR {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(code as u8)
}
