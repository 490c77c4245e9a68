fn main() {
    std::process::exit(rmkit::cli::run(std::env::args_os()));
}
