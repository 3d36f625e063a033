fn main() {
    std::process::exit(swapinfo::cli::run(std::env::args_os()));
}
