fn main() {
    std::process::exit(torus_elliptic::cli::run(std::env::args_os()));
}
