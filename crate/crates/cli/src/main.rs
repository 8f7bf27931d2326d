fn main() {
    std::process::exit(tubelab_cli::app::run(std::env::args_os()));
}
