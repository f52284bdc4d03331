use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = societykit::cli::run_to_stdout(&args);
    ExitCode::from(outcome)
}
