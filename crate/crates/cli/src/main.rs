use clap::Parser;

fn main() {
    let cli = projip_cli::Cli::parse();
    let code = projip_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
