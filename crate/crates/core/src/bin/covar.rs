fn main() {
    std::process::exit(covar::cli::parse_and_dispatch(std::env::args_os()));
}
