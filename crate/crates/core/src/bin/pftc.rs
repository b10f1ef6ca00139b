//! `pftc` command-line tool; see `pftc --help`.

fn main() {
    std::process::exit(pftc::cli::main_with_args(std::env::args_os()));
}
