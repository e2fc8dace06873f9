fn main() {
    std::process::exit(relequi::cli::run());
}
