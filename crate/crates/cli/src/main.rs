use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use kernel_roots_cli::{execute, thread_cap, Cli, EXIT_INPUT, THREADS_ENV};

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit(0),
                _ => exit(EXIT_INPUT),
            };
        }
    };
    match thread_cap(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(Some(cap)) => {
            let available = std::thread::available_parallelism().map_or(1, |k| k.get());
            rayon::ThreadPoolBuilder::new()
                .num_threads(cap.min(available))
                .build_global()
                .expect("global pool is configured once");
        }
        Ok(None) => {}
        Err(f) => {
            eprintln!("error: {}", f.message);
            return exit(f.code);
        }
    }
    match execute(&cli, &argv[1..]) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            exit(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            exit(f.code)
        }
    }
}
