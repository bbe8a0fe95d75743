fn main() {
    std::process::exit(steklov_core::cli::main_with_args(std::env::args_os()));
}
