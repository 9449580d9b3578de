fn main() {
    std::process::exit(xc::cli::main());
}
