fn main() {
    std::process::exit(linecell::cli::main_with_args(std::env::args_os()));
}
