fn main() -> std::process::ExitCode {
    mfplan::cli::main()
}
