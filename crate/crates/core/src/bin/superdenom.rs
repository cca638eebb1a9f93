fn main() {
    std::process::exit(superdenom::cli::main_with(std::env::args_os()));
}
