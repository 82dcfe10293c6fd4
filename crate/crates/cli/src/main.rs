fn main() {
    std::process::exit(newform_signs_cli::run(std::env::args_os()));
}
