fn main() {
    std::process::exit(sp70::cli::run(std::env::args_os()));
}
