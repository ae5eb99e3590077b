fn main() {
    std::process::exit(taylor_cone::cli::run(std::env::args()));
}
