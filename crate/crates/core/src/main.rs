fn main() {
    std::process::exit(coxeter_growth::cli::main_with_args(std::env::args_os()));
}
