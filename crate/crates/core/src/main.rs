fn main() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .init();
    std::process::exit(dip::cli::cli_main(std::env::args_os()));
}
