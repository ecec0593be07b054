fn main() {
    std::process::exit(mathcast::cli::run(std::env::args_os()));
}
