fn main() {
    std::process::exit(switchkit::cli::main_with_args(std::env::args_os()));
}
