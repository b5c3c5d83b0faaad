fn main() {
    std::process::exit(nmm_cli::run(std::env::args_os().collect()));
}
