fn main() {
    std::process::exit(treeflow::cli::run(std::env::args_os()));
}
