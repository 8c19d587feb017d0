fn main() {
    std::process::exit(spanalign_cli::run(std::env::args_os()));
}
