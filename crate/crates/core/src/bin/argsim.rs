use clap::Parser;

fn main() {
    let cli = argsim::cli::Cli::parse();
    let code = match argsim::cli::run(cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("argsim: {e}");
            2
        }
    };
    std::process::exit(code);
}
