fn main() {
    std::process::exit(fairstream::cli::run());
}
