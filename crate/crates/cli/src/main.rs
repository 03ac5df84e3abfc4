fn main() {
    std::process::exit(vanplan_cli::run(std::env::args_os()));
}
