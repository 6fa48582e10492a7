fn main() {
    let code = conproj_cli::run_cli(std::env::args_os());
    std::process::exit(code);
}
