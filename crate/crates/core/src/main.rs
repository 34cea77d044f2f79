fn main() {
    std::process::exit(lamlab::cli::run(std::env::args_os()));
}
