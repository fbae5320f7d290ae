fn main() {
    std::process::exit(rplda::cli::main());
}
