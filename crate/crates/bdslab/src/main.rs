fn main() {
    std::process::exit(bdslab::cli::run());
}
