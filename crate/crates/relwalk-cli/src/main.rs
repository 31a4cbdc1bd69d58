fn main() {
    std::process::exit(relwalk_cli::run(std::env::args_os()));
}
