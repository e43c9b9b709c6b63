fn main() {
    std::process::exit(ringcascade_core::cli::main_with_args(std::env::args_os()));
}
