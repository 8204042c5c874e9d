fn main() {
    std::process::exit(picard::cli::run(std::env::args_os()));
}
