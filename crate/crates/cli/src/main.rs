fn main() {
    std::process::exit(defclust_cli::main_with_args(std::env::args_os()));
}
