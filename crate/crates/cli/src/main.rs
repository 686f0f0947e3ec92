fn main() {
    std::process::exit(fivezero_cli::main_with_args(std::env::args_os()));
}
