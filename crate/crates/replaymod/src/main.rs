fn main() {
    std::process::exit(replaymod::cli::run(std::env::args_os()));
}
