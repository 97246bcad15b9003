fn main() {
    std::process::exit(dgsim::run(std::env::args_os()));
}
