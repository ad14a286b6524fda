use clap::Parser;

fn main() {
    let cli = cvhet::cli::Cli::parse();
    if let Err(e) = cvhet::cli::run(cli) {
        let kind = match &e {
            cvhet::CliError::Parse { .. } | cvhet::CliError::Field { .. } => "parse",
            cvhet::CliError::Io { .. } => "io",
            cvhet::CliError::Usage(_) => "usage",
            cvhet::CliError::Core(_) => "validation",
            cvhet::CliError::Internal(_) => "internal",
        };
        let kind = if e.exit_code() == 2 { "internal" } else { kind };
        eprintln!(
            "{}",
            serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } })
        );
        std::process::exit(e.exit_code());
    }
}
