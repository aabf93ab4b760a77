fn main() {
    std::process::exit(lfactors::cli::run());
}
