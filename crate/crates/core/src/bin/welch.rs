fn main() {
    std::process::exit(welch_core::cli::main_with_env());
}
