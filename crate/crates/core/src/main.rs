fn main() -> std::process::ExitCode {
    starcc::cli::main()
}
