fn main() {
    std::process::exit(specrel::cli::run(std::env::args_os()));
}
