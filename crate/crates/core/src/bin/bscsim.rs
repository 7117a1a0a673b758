fn main() {
    std::process::exit(bsc_core::cli::parse_and_run(std::env::args_os()));
}
