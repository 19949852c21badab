fn main() {
    std::process::exit(sicstark::cli::main_with_args());
}
