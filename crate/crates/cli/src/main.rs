fn main() {
    std::process::exit(critline_cli::run(std::env::args_os()));
}
