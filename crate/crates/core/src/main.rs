fn main() {
    std::process::exit(pnc_core::cli::run(std::env::args_os()));
}
