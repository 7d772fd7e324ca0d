fn main() -> std::process::ExitCode {
    wc4dvar::harness::cli::main()
}
