use std::io::Write;

use clap::Parser;
use qlp::Cli;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let code = qlp::run(cli, &mut out, &mut stderr.lock());
    let _ = out.flush();
    std::process::exit(code);
}
