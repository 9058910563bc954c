fn main() {
    std::process::exit(pointscatter::cli::run(std::env::args_os()));
}
