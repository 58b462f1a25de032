fn main() {
    std::process::exit(spinmacro::cli::run(std::env::args_os()));
}
