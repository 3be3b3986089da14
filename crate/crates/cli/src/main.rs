fn main() {
    std::process::exit(cubelab::run(std::env::args_os()));
}
