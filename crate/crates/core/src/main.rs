use clap::Parser;

use apriori_del::cli::{main_with, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = main_with(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
