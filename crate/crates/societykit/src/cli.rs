//! Command-line front end (populated in later stages).

/// Runs a CLI invocation, printing to stdout/stderr; returns the exit code.
pub fn run_to_stdout(_args: &[String]) -> u8 {
    eprintln!("not yet implemented");
    1
}
