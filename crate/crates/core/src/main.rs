fn main() {
    std::process::exit(cjkit::cli::run(std::env::args_os()));
}
