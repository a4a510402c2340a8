use std::process::ExitCode;

fn main() -> ExitCode {
    forecast_scoring_cli::main_impl()
}
