fn main() {
    std::process::exit(ris_secrecy::expcli::run(std::env::args_os()));
}
