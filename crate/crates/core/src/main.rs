fn main() {
    std::process::exit(tetherplan::cli::main_with_args(std::env::args_os()));
}
