fn main() {
    std::process::exit(hopset::cli::run(std::env::args_os().collect()));
}
