fn main() {
    std::process::exit(hybrid_radar::cli::run_from_args(std::env::args_os()));
}
