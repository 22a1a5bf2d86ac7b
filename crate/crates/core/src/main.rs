fn main() {
    std::process::exit(rtprof::cli::run(std::env::args()));
}
