use std::process::ExitCode;

fn main() -> ExitCode {
    bilasym::cli::run()
}
