fn main() {
    std::process::exit(sigplex_cli::run(std::env::args_os()));
}
