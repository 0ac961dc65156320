fn main() {
    std::process::exit(arrwwid_cli::main_with_args(std::env::args_os()));
}
