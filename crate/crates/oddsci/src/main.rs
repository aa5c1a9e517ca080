fn main() {
    std::process::exit(oddsci::cli::main_with_args(std::env::args_os()));
}
