fn main() {
    std::process::exit(hedonic::cli::main());
}
