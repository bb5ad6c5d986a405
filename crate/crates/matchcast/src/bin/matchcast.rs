fn main() {
    std::process::exit(matchcast::cli::run(std::env::args_os()));
}
