fn main() {
    std::process::exit(fracheat_cli::main_with(std::env::args_os()));
}
