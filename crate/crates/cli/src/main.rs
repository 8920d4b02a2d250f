use log::LevelFilter;

fn main() {
    env_logger::Builder::new()
        .filter_level(LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    std::process::exit(antipt_cli::main_with_args(std::env::args_os()));
}
