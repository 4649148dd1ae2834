use clap::Parser;

fn main() {
    let cli = dwlkit::cli::Cli::parse();
    match dwlkit::cli::run(cli) {
        Ok(output) => println!("{output}"),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}
