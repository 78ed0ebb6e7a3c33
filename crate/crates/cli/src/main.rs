fn main() {
    std::process::exit(convlab_cli::run(std::env::args_os()));
}
