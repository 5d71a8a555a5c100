fn main() {
    std::process::exit(lsasc_harness::cli::run(std::env::args_os()));
}
