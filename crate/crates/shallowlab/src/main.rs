fn main() {
    std::process::exit(shallowlab::cli::run(std::env::args_os()));
}
