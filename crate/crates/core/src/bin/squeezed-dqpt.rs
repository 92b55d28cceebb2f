fn main() {
    std::process::exit(squeezed_dqpt::cli::run(std::env::args()));
}
