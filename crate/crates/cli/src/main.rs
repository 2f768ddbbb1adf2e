fn main() {
    std::process::exit(anm_cli::cli_main(std::env::args_os()));
}
