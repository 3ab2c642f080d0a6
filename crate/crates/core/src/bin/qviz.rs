fn main() {
    std::process::exit(qviz::cli::main());
}
