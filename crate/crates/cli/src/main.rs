fn main() {
    std::process::exit(padic_teich_cli::run_from(std::env::args_os()));
}
