fn main() {
    std::process::exit(frontspeed_cli::run(std::env::args_os()));
}
