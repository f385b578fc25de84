fn main() {
    std::process::exit(szego::cli::run(std::env::args_os()));
}
