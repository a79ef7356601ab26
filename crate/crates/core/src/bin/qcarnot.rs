fn main() {
    std::process::exit(qcarnot::cli::run(std::env::args_os()));
}
