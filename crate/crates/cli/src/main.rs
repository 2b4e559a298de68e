fn main() {
    std::process::exit(fracinfo_cli::run(std::env::args_os()));
}
