fn main() {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    std::process::exit(spherecut_service::cli::run(std::env::args_os()));
}
