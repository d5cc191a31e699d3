fn main() {
    std::process::exit(srf_cli::run_cli(std::env::args_os()));
}
