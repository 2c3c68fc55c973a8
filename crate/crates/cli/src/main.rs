fn main() {
    std::process::exit(rollwaves_cli::run(std::env::args_os()));
}
