fn main() {
    std::process::exit(tmpjump::cli::main_with_args(std::env::args_os()));
}
