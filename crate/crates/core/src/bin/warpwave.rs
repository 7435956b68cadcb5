fn main() {
    std::process::exit(warpwave::cli::run_cli(std::env::args_os()));
}
