fn main() {
    std::process::exit(flowca::cli::main());
}
