use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut diag = stderr.lock();
    let code = primon_cli::run(std::env::args_os(), &mut out, &mut diag);
    let _ = out.flush();
    std::process::exit(code);
}
