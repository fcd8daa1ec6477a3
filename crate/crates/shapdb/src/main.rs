fn main() {
    std::process::exit(shapdb::cli::run(std::env::args_os()));
}
