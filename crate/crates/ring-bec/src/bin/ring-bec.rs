fn main() {
    std::process::exit(ring_bec::cli::run());
}
