fn main() {
    std::process::exit(hamrc::cli::main_with_args(std::env::args_os()));
}
