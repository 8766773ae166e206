fn main() {
    std::process::exit(hetnet_cpup::cli::main_with_args(std::env::args_os()));
}
