fn main() {
    std::process::exit(circlepat_cli::run(std::env::args().collect()));
}
