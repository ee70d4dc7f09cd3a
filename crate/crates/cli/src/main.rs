use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match bianchi_cli::parse_invocation(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (text, code) = bianchi_cli::run(&cli);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
