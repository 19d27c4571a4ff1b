fn main() {
    std::process::exit(sonar_belief::cli::run(std::env::args_os()));
}
