fn main() {
    std::process::exit(bianchi_cli::run(std::env::args_os()));
}
