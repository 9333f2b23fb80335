fn main() {
    std::process::exit(iwahori::cli::run());
}
