fn main() {
    std::process::exit(fedmarket::cli::run_cli(std::env::args_os().skip(1)));
}
