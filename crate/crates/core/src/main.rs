fn main() {
    std::process::exit(spectral_dial::cli::run(std::env::args_os()));
}
