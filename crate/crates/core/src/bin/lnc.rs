fn main() {
    std::process::exit(lnc_core::cli::main_with_args(std::env::args_os()));
}
