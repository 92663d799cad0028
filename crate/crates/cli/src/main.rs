fn main() {
    std::process::exit(sicnet_cli::run(std::env::args_os()));
}
