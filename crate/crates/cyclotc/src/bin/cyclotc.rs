fn main() {
    std::process::exit(cyclotc::cli::run(std::env::args().collect()));
}
