fn main() {
    std::process::exit(sumlevel::cli::main_with(std::env::args_os()));
}
