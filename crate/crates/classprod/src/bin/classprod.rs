fn main() {
    std::process::exit(classprod::run_cli());
}
