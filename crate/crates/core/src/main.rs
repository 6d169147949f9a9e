fn main() {
    std::process::exit(renewal::cli::run(std::env::args_os()));
}
