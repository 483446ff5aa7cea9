fn main() {
    std::process::exit(noma_linklab::cli::main_with_args(std::env::args_os()));
}
