fn main() -> std::process::ExitCode {
    sievecoref::cli::main_entry()
}
