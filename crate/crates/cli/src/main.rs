fn main() {
    std::process::exit(rmcurve::main_with_args(std::env::args_os()));
}
