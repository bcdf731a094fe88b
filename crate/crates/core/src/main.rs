fn main() {
    std::process::exit(isograd::cli::run(std::env::args_os()));
}
