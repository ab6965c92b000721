fn main() {
    std::process::exit(treedet::cli::run(std::env::args_os()));
}
