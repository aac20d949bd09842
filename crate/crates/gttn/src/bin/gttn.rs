fn main() {
    std::process::exit(gttn::cli::run());
}
