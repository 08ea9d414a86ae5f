fn main() {
    std::process::exit(lpm_group_cli::run(std::env::args_os()));
}
