fn main() {
    std::process::exit(havok_detect::cli::run());
}
