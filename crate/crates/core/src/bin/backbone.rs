use std::process::ExitCode;

fn main() -> ExitCode {
    backbone_core::cli::main_entry()
}
