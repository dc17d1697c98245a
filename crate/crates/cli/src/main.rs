use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bentsq::bentsquare::{classify_vector, square_from_truth_table};
use bentsq::boolfn::{is_bent, walsh_transform, TruthTable};
use bentsq::bounds::{self, BoundReport};
use bentsq::construct::{self, Verification};
use bentsq::tworegular::{self, horizontal_signature, vertical_signature, TwoRegularMatrix};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "bentsq", version, about = "Bent functions from bent squares")]
struct Cli {
    /// Output format; csv is only available for tabular reports.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads, 0 for one per core.
    #[arg(long, env = "BENTSQ_JOBS", default_value_t = 0, global = true)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Walsh spectrum of a hex truth table.
    Wht { hex: String },
    /// Whether a hex truth table is bent.
    Bent { hex: String },
    /// Bent square A_f * H of a hex truth table.
    Square { hex: String },
    /// Classify a comma-separated integer vector.
    Classify {
        #[arg(allow_hyphen_values = true)]
        vector: String,
    },
    /// Stream every N x N 2-regular matrix, one JSON object per line.
    #[command(name = "enum2reg")]
    Enum2Reg {
        #[arg(long = "N")]
        size: usize,
        /// Largest N to enumerate.
        #[arg(long, default_value_t = tworegular::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Exact number of N x N 2-regular matrices.
    #[command(name = "count2reg")]
    Count2Reg {
        #[arg(long = "N")]
        size: usize,
    },
    /// Draw uniform N x N 2-regular matrices, one JSON object per line.
    #[command(name = "sample2reg")]
    Sample2Reg {
        #[arg(long = "N")]
        size: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Vertical and horizontal signatures of a matrix JSON file.
    Sig { matrix: PathBuf },
    /// Run the quadruple construction for n variables.
    Construct {
        #[arg(long)]
        n: u32,
        /// Store at most this many distinct functions in --output.
        #[arg(long)]
        limit: Option<usize>,
        /// File receiving the stored functions, one hex truth table per line.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Verify this many uniformly drawn functions instead of all.
        #[arg(long)]
        verify_samples: Option<usize>,
        /// Build from this many uniformly sampled matrices instead of the
        /// full enumeration.
        #[arg(long)]
        sample_matrices: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = tworegular::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Lower-bound report for one or more even n (comma separated).
    Bound {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
    },
    /// Count bent functions in n <= 4 variables exhaustively.
    Census {
        #[arg(long)]
        n: u32,
        /// Write every bent truth table here, one hex per line.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Enumerate and check all type 1 bent squares for n = 2 or 4.
    Type1 {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(bentsq::Error),
    Usage(String),
    Io(io::Error),
}

impl From<bentsq::Error> for Failure {
    fn from(e: bentsq::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let mut out = BufWriter::new(io::stdout());
    let result = pool.install(|| run(&cli, &mut out));
    let result = result.and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn json_line<T: Serialize>(out: &mut impl Write, v: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn only_json_or_text(cli: &Cli) -> Result<(), Failure> {
    if cli.format == Format::Csv {
        return Err(Failure::Usage(
            "--format csv is only supported by tabular reports (bound)".into(),
        ));
    }
    Ok(())
}

fn parse_table(hex: &str) -> Result<TruthTable, Failure> {
    Ok(TruthTable::from_hex(hex)?)
}

fn write_lines(path: &Path, lines: impl Iterator<Item = String>) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

fn n_to_size(n: u32) -> Result<usize, Failure> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(bentsq::Error::OddOrSmallN(n).into());
    }
    Ok(1usize << (n / 2 - 1))
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Wht { hex } => {
            only_json_or_text(cli)?;
            let s = walsh_transform(&parse_table(hex)?);
            match cli.format {
                Format::Text => {
                    let vals: Vec<String> = s.values().iter().map(i64::to_string).collect();
                    writeln!(out, "{}", vals.join(" "))?;
                }
                _ => json_line(out, &s.values())?,
            }
        }
        Command::Bent { hex } => {
            only_json_or_text(cli)?;
            let f = parse_table(hex)?;
            let verdict = is_bent(&f)?;
            match cli.format {
                Format::Text => writeln!(out, "{verdict}")?,
                _ => json_line(
                    out,
                    &serde_json::json!({"hex": f.to_hex(), "n": f.num_vars(), "bent": verdict}),
                )?,
            }
        }
        Command::Square { hex } => {
            only_json_or_text(cli)?;
            let sq = square_from_truth_table(&parse_table(hex)?)?;
            match cli.format {
                Format::Text => {
                    for r in sq.rows() {
                        let cells: Vec<String> = r.iter().map(|v| format!("{v:>4}")).collect();
                        writeln!(out, "{}", cells.join(""))?;
                    }
                }
                _ => json_line(out, &sq)?,
            }
        }
        Command::Classify { vector } => {
            only_json_or_text(cli)?;
            let v: Vec<i64> = vector
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(format!("bad vector '{vector}': {e}")))?;
            let class = classify_vector(&v)?;
            match cli.format {
                Format::Text => writeln!(out, "{class:?}")?,
                _ => json_line(out, &class)?,
            }
        }
        Command::Enum2Reg { size, cap } => {
            only_json_or_text(cli)?;
            for m in tworegular::enumerate_with_cap(*size, *cap)? {
                match cli.format {
                    Format::Text => writeln!(out, "{m:?}")?,
                    _ => json_line(out, &m)?,
                }
            }
        }
        Command::Count2Reg { size } => {
            only_json_or_text(cli)?;
            writeln!(out, "{}", tworegular::count(*size))?;
        }
        Command::Sample2Reg { size, count, seed } => {
            only_json_or_text(cli)?;
            for m in tworegular::sample_many(*size, *count, *seed)? {
                match cli.format {
                    Format::Text => writeln!(out, "{m:?}")?,
                    _ => json_line(out, &m)?,
                }
            }
        }
        Command::Sig { matrix } => {
            only_json_or_text(cli)?;
            let text = std::fs::read_to_string(matrix)?;
            let m: TwoRegularMatrix = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", matrix.display())))?;
            let v = vertical_signature(&m)?;
            let h = horizontal_signature(&m)?;
            match cli.format {
                Format::Text => {
                    let bits = m.size().trailing_zeros() as usize;
                    writeln!(out, "vertical   {}", v.to_binary(bits).join(" "))?;
                    writeln!(out, "horizontal {}", h.to_binary(bits).join(" "))?;
                }
                _ => json_line(out, &serde_json::json!({"vertical": v, "horizontal": h}))?,
            }
        }
        Command::Construct {
            n,
            limit,
            output,
            verify_samples,
            sample_matrices,
            seed,
            cap,
        } => {
            only_json_or_text(cli)?;
            if limit.is_some() && output.is_none() {
                return Err(Failure::Usage("--limit needs --output".into()));
            }
            let size = n_to_size(*n)?;
            let matrices: Vec<TwoRegularMatrix> = match sample_matrices {
                Some(count) => tworegular::sample_many(size, *count, *seed)?,
                None => tworegular::enumerate_with_cap(size, *cap)?.collect(),
            };
            let verify = match verify_samples {
                Some(count) => Verification::Sample {
                    count: *count,
                    seed: *seed,
                },
                None => Verification::All,
            };
            let report = construct::construction_report(&matrices, verify)?;
            if let Some(path) = output {
                let fs = construct::emit_bent_functions(&matrices, *limit)?;
                write_lines(path, fs.iter().map(TruthTable::to_hex))?;
            }
            match cli.format {
                Format::Text => {
                    writeln!(out, "N                      {}", report.size)?;
                    writeln!(out, "n                      {}", report.n)?;
                    writeln!(out, "quadruples             {}", report.quadruples)?;
                    writeln!(out, "patterns               {}", report.patterns)?;
                    writeln!(out, "emitted                {}", report.emitted)?;
                    writeln!(out, "verified_bent          {}", report.verified_bent)?;
                    writeln!(out, "sampled_verifications  {}", report.sampled_verifications)?;
                }
                _ => json_line(out, &report)?,
            }
        }
        Command::Bound { n } => {
            let reports: Vec<BoundReport> =
                n.iter().map(|&n| bounds::bound_report(n)).collect::<Result<_, _>>()?;
            match cli.format {
                Format::Text => write!(out, "{}", bounds::bound_table_text(&reports))?,
                Format::Csv => write!(out, "{}", bounds::bound_table_csv(&reports))?,
                Format::Json if reports.len() == 1 => json_line(out, &reports[0])?,
                Format::Json => json_line(out, &reports)?,
            }
        }
        Command::Census { n, output } => {
            only_json_or_text(cli)?;
            let census = bounds::bent_census(*n)?;
            if let Some(path) = output {
                write_lines(path, census.iter().map(TruthTable::to_hex))?;
            }
            match cli.format {
                Format::Text => writeln!(out, "{}", census.len())?,
                _ => json_line(out, &serde_json::json!({"n": n, "bent": census.len()}))?,
            }
        }
        Command::Type1 { n } => {
            only_json_or_text(cli)?;
            if n % 2 != 0 {
                return Err(bentsq::Error::OddVariableCount(*n).into());
            }
            let count = bounds::type1_square_count_check(n / 2)?;
            let formula = bounds::type1_formula(n / 2);
            match cli.format {
                Format::Text => writeln!(out, "{count}")?,
                _ => json_line(
                    out,
                    &serde_json::json!({"n": n, "type1_squares": count, "formula": formula.to_string()}),
                )?,
            }
        }
    }
    Ok(())
}
