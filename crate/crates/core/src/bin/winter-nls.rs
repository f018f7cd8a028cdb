fn main() {
    std::process::exit(winter_nls::cli::main_with_args(std::env::args_os()));
}
