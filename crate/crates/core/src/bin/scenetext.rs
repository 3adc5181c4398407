fn main() {
    std::process::exit(scenetext::cli::main(std::env::args_os()));
}
