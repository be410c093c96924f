fn main() {
    std::process::exit(cosmohist::cli::main_with_args(std::env::args_os()));
}
