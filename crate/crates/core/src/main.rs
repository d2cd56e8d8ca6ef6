fn main() {
    std::process::exit(diffcomp::cli::main())
}
