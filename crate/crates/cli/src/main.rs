fn main() {
    std::process::exit(torus_splines_cli::run(std::env::args_os()));
}
