fn main() {
    std::process::exit(atomsched::cli::run(std::env::args_os()));
}
