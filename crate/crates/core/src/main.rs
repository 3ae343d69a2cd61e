use std::process::ExitCode;

fn main() -> ExitCode {
    nbldpc_core::cli::main()
}
