fn main() {
    std::process::exit(synd_cli::run(std::env::args_os()));
}
