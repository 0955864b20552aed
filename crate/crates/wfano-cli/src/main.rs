use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let threads = std::env::var("WFANO_THREADS").ok();
    let out = wfano_cli::run(std::env::args_os(), threads.as_deref());
    // a closed stdout is not worth a panic
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
