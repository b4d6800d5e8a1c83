fn main() {
    std::process::exit(redlab::cli::run());
}
