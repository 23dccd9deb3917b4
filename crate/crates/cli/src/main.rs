fn main() {
    std::process::exit(opkernel_cli::run(std::env::args_os()));
}
