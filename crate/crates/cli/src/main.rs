fn main() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .format_timestamp(None)
        .init();
    std::process::exit(mogdm_cli::app::main_with_args(std::env::args_os()));
}
