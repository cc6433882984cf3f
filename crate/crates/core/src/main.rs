fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ROSOM_LOG", "off")).init();
    std::process::exit(rosom::cli::run(std::env::args_os()));
}
