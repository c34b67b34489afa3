fn main() {
    std::process::exit(polyclosure::cli::run(std::env::args_os()));
}
