fn main() {
    std::process::exit(modde::cli::dispatch(std::env::args_os()));
}
