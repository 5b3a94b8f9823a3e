fn main() {
    std::process::exit(datacomplex::cli::main_entry());
}
