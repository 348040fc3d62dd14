fn main() {
    std::process::exit(holo::cli::main_with_args(std::env::args_os()));
}
