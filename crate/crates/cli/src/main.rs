use std::io::{self, IsTerminal};

use pantagruel_cli::{main_with, Io};

fn main() {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let status = main_with(
        std::env::args_os(),
        Io {
            stdin: &mut stdin.lock(),
            stdout: &mut io::stdout().lock(),
            stderr: &mut io::stderr().lock(),
            interactive,
        },
    );
    std::process::exit(status);
}
