fn main() {
    std::process::exit(polarity_cli::run());
}
