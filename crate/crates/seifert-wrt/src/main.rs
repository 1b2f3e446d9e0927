use std::io::Write;

use seifert_wrt::{cli, par};

fn main() {
    if let Ok(v) = std::env::var("SEIFERT_WRT_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) => par::configure_threads(n),
            Err(_) => {
                eprintln!("error: SEIFERT_WRT_THREADS must be a non-negative integer, got {v:?}");
                std::process::exit(cli::EXIT_INPUT);
            }
        }
    }
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::env::args_os(), &mut out, &mut err);
    // a closed pipe downstream is not an error
    let _ = std::io::stdout().write_all(&out);
    let _ = std::io::stderr().write_all(&err);
    std::process::exit(code);
}
