//! Command-line front end for `cubelab-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::{Duration, Instant};

use clap::Parser;
use clap::error::ErrorKind;

use args::{BellmanCheck, Cli, Command};
use commands::Outcome;
use error::CliError;
use table::{format_float, Format};

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cli.global.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if !(g.budget > 0.0) {
        return Err(CliError::Usage("budget must be positive".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let deadline = Instant::now().checked_add(Duration::from_secs_f64(g.budget.min(1e9)));

    let default_format = if matches!(cli.command, Command::Certify(_)) { Format::Json } else { Format::Csv };
    let format = g.format.unwrap_or(default_format);

    let outcome = pool.install(|| -> Result<Outcome, CliError> {
        match &cli.command {
            Command::Dual(a) => commands::dual(a, g.seed, deadline),
            Command::Kernel(a) => commands::kernel(a),
            Command::Khintchine(a) => commands::khintchine(a, g.seed),
            Command::Certify(a) => commands::certify(a),
            Command::Bound(a) => commands::bound(a),
            Command::Bellman(a) if a.check == BellmanCheck::TwoPoint && a.emit_grid => {
                stream_grid(cli, a, format)
            }
            Command::Bellman(a) => commands::bellman(a, g.seed, &mut |_, _, _| {}),
            Command::Series(a) => commands::series(a),
            Command::Verify(a) => {
                let ctx = verify::VerifyContext { seed: g.seed, samples: a.samples, deadline };
                let (table, failures) = verify::verify(&ctx);
                Ok(Outcome { table, failures })
            }
        }
    })?;

    let streamed = matches!(&cli.command, Command::Bellman(a) if a.check == BellmanCheck::TwoPoint && a.emit_grid);
    if !streamed && (!outcome.table.rows.is_empty() || outcome.failures.is_empty()) {
        let mut out = open_output(cli)?;
        outcome.table.write(format, &mut out)?;
        out.flush()?;
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(outcome.failures.join("; ")))
    }
}

/// The full two-point grid is millions of rows, so it is written as it is computed.
fn stream_grid(cli: &Cli, a: &args::BellmanArgs, format: Format) -> Result<Outcome, CliError> {
    let mut out = open_output(cli)?;
    let mut io_err: Option<io::Error> = None;
    let mut first = true;
    let mut put = |a: f64, b: f64, d: f64, out: &mut dyn Write| -> io::Result<()> {
        let (a, b, d) = (format_float(a), format_float(b), format_float(d));
        match format {
            Format::Csv => writeln!(out, "{a},{b},{d}"),
            Format::Json => {
                let sep = if first { "" } else { "," };
                first = false;
                writeln!(out, "{sep}{{\"a\":{a},\"b\":{b},\"defect\":{d}}}")
            }
        }
    };
    writeln!(out, "{}", if format == Format::Csv { "a,b,defect" } else { "[" })?;
    let result = commands::bellman(a, cli.global.seed, &mut |x, y, d| {
        if io_err.is_none() {
            if let Err(e) = put(x, y, d, &mut out) {
                io_err = Some(e);
            }
        }
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    if format == Format::Json {
        writeln!(out, "]")?;
    }
    out.flush()?;
    result
}
