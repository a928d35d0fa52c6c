fn main() {
    std::process::exit(toric_calabi::cli::run_from(std::env::args_os()));
}
