fn main() {
    std::process::exit(complementarity::cli::run(std::env::args_os()));
}
