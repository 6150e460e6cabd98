fn main() -> std::process::ExitCode {
    principal_char::cli::run()
}
