use std::io;

fn main() -> std::process::ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    riskgraph::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()).into()
}
