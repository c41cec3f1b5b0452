fn main() -> std::process::ExitCode {
    gabor_eb::cli::main()
}
