fn main() {
    std::process::exit(tinj::cli::main_with_args(std::env::args_os()));
}
