fn main() {
    std::process::exit(linkpred::cli::run(std::env::args_os()));
}
