use std::process::ExitCode;

fn main() -> ExitCode {
    match v2x_secrecy::cli::execute(std::env::args_os(), std::env::vars()) {
        Ok(report) => {
            println!("{}", report.summary);
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(v2x_secrecy::Error::Parse { what, message }) if what == "command line" => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
