fn main() {
    std::process::exit(peabody4d::cli::run(std::env::args_os()));
}
