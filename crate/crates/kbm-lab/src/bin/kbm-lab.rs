//! `kbm-lab` command-line entry point.

fn main() {
    std::process::exit(kbm_lab::cli::main_with_args(std::env::args_os()));
}
