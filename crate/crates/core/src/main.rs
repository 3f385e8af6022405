use clap::Parser;

use closedwalk::cli::{run, Cli, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            std::process::exit(EXIT_USAGE);
        }
    }
    let mut stdout = std::io::stdout().lock();
    std::process::exit(run(&cli, &mut stdout));
}
