fn main() {
    std::process::exit(twostack::cli::main())
}
