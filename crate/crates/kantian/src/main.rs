fn main() {
    std::process::exit(kantian::cli::run(std::env::args_os()));
}
