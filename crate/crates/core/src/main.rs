use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = twistgate::cli::run(std::env::args(), &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
