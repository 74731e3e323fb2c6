use clap::Parser;

fn main() {
    let cli = isingkw_cli::Cli::parse();
    let out = isingkw_cli::run(&cli);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
