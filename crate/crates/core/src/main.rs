use clap::Parser;

fn main() {
    let cli = gradefj::cli::Cli::parse();
    let code = gradefj::cli::execute(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
