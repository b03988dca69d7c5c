fn main() -> std::process::ExitCode {
    robust_cv::cli::run_from_env()
}
