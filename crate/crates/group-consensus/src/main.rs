fn main() {
    std::process::exit(group_consensus::cli::run(std::env::args()));
}
