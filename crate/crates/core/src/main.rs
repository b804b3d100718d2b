fn main() {
    std::process::exit(stable_stein::cli::main_from_env());
}
