fn main() -> std::process::ExitCode {
    haltreg::cli::main()
}
