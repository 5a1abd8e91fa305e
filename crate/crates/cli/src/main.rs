//! Command-line interface: validate and query databases, compute certain
//! answers, decide certainty, enumerate possible worlds, and run the
//! brute-force oracle.
//!
//! Exit codes: 0 success (or "true" for decisions), 1 "false" for decisions,
//! 2 usage errors, 3 parse/validation errors, 4 solver or domain errors.

use clap::{Parser, Subcommand, ValueEnum};
use rdfi::oracle::OracleAnswer;
use rdfi::query::Query;
use rdfi::text;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rdfi", version, about = "query engine for RDF with existential literals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a database document.
    Validate { db: PathBuf },
    /// Evaluate a SELECT or CONSTRUCT query over a database.
    Query {
        db: PathBuf,
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Reject queries whose pattern is not well-designed.
        #[arg(long)]
        require_wd: bool,
    },
    /// Compute the certain answer to a query.
    Certain {
        db: PathBuf,
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide whether every triple of a ground graph is certain (exit 0/1).
    Cert {
        db: PathBuf,
        query: PathBuf,
        graph: PathBuf,
    },
    /// Enumerate the possible worlds over a finite domain.
    Worlds {
        db: PathBuf,
        #[arg(long)]
        domain: PathBuf,
    },
    /// Certain answer by brute-force world enumeration.
    OracleCertain {
        db: PathBuf,
        query: PathBuf,
        #[arg(long)]
        domain: PathBuf,
    },
    /// Check whether a query's pattern is well-designed (exit 0/1).
    CheckWd { query: PathBuf },
    /// Merge conditions of duplicate triple parts into disjunctions.
    Normalize { db: PathBuf },
    /// Substitute constants for e-literals forced by the global constraint.
    EqComplete { db: PathBuf },
}

const EXIT_FALSE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

enum CliError {
    Parse(String),
    Solver(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        match self {
            CliError::Parse(msg) => {
                eprintln!("error: {}", msg);
                ExitCode::from(EXIT_PARSE)
            }
            CliError::Solver(msg) => {
                eprintln!("error: {}", msg);
                ExitCode::from(EXIT_SOLVER)
            }
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Parse(format!("stdin: {}", e)))?;
        return Ok(buf);
    }
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))
}

fn load_db(path: &PathBuf) -> Result<rdfi::Database, CliError> {
    let textual = read_input(path)?;
    text::parse_database(&textual).map_err(|e| CliError::Parse(e.to_string()))
}

fn load_query(path: &PathBuf, lang: rdfi::Lang) -> Result<Query, CliError> {
    let textual = read_input(path)?;
    text::parse_query(&textual, lang).map_err(|e| CliError::Parse(e.to_string()))
}

fn query_error(e: rdfi::query::QueryError) -> CliError {
    CliError::Solver(e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Validate { db } => {
            let db = load_db(&db)?;
            println!("ok: {} triples, language {}", db.graph.len(), db.lang.id());
            Ok(ExitCode::SUCCESS)
        }
        Command::Query {
            db,
            query,
            format,
            require_wd,
        } => {
            let db = load_db(&db)?;
            let q = load_query(&query, db.lang)?;
            let pattern = match &q {
                Query::Select(sq) => &sq.pattern,
                Query::Construct(cq) => &cq.pattern,
            };
            if require_wd {
                match rdfi::query::check_well_designed(pattern) {
                    Ok(true) => {}
                    Ok(false) => {
                        return Err(CliError::Solver("pattern is not well-designed".into()))
                    }
                    Err(e) => return Err(query_error(e)),
                }
            }
            match q {
                Query::Select(sq) => {
                    let ans = rdfi::query::eval_select(&sq, &db).map_err(query_error)?;
                    match format {
                        Format::Text => print!("{}", text::select_answer_text(&ans)),
                        Format::Json => println!("{}", text::select_answer_json(&ans)),
                    }
                }
                Query::Construct(cq) => {
                    let out = rdfi::query::eval_construct(&cq, &db).map_err(query_error)?;
                    match format {
                        Format::Text => print!("{}", text::db_to_doc(&out)),
                        Format::Json => println!("{}", text::construct_answer_json(&out)),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certain { db, query, format } => {
            let db = load_db(&db)?;
            match load_query(&query, db.lang)? {
                Query::Construct(cq) => {
                    let ans = rdfi::query::certain_answer(&cq, &db).map_err(query_error)?;
                    match format {
                        Format::Text => print!("{}", text::triples_text(ans)),
                        Format::Json => {
                            let triples: Vec<String> = ans.iter().map(|t| t.to_string()).collect();
                            println!("{}", json_string_array(&triples));
                        }
                    }
                }
                Query::Select(sq) => {
                    let rows = rdfi::query::select_certain(&sq, &db).map_err(query_error)?;
                    match format {
                        Format::Text => print!("{}", text::rows_text(&rows)),
                        Format::Json => {
                            let rendered: Vec<String> = text::rows_text(&rows)
                                .lines()
                                .map(|s| s.to_string())
                                .collect();
                            println!("{}", json_string_array(&rendered));
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cert { db, query, graph } => {
            let db = load_db(&db)?;
            let q = load_query(&query, db.lang)?;
            let h = text::parse_graph(&read_input(&graph)?, db.lang)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let Query::Construct(cq) = q else {
                return Err(CliError::Solver("cert takes a CONSTRUCT query".into()));
            };
            let verdict = rdfi::query::certainty(&cq, &h, &db).map_err(query_error)?;
            println!("{}", verdict);
            Ok(if verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FALSE)
            })
        }
        Command::Worlds { db, domain } => {
            let db = load_db(&db)?;
            let dom = text::parse_domain(&read_input(&domain)?, db.lang)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let worlds = rdfi::oracle::enumerate_worlds(&db, &dom)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            print!("{}", text::worlds_text(&worlds));
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCertain { db, query, domain } => {
            let db = load_db(&db)?;
            let q = load_query(&query, db.lang)?;
            let dom = text::parse_domain(&read_input(&domain)?, db.lang)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let ans = rdfi::oracle::oracle_certain(&q, &db, &dom)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            match ans {
                OracleAnswer::Triples(ts) => print!("{}", text::triples_text(ts)),
                OracleAnswer::Rows(rows) => print!("{}", text::rows_text(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckWd { query } => {
            let textual = read_input(&query)?;
            // The pattern shape does not depend on the constant syntax; try
            // the languages in turn.
            let q = text::parse_query(&textual, rdfi::Lang::Pcl)
                .or_else(|_| text::parse_query(&textual, rdfi::Lang::Ecl))
                .or_else(|_| text::parse_query(&textual, rdfi::Lang::DePcl))
                .or_else(|_| text::parse_query(&textual, rdfi::Lang::Rcl))
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let pattern = match &q {
                Query::Select(sq) => &sq.pattern,
                Query::Construct(cq) => &cq.pattern,
            };
            match rdfi::query::check_well_designed(pattern) {
                Ok(true) => {
                    println!("well-designed");
                    Ok(ExitCode::SUCCESS)
                }
                Ok(false) => {
                    println!("not well-designed");
                    Ok(ExitCode::from(EXIT_FALSE))
                }
                Err(e) => Err(query_error(e)),
            }
        }
        Command::Normalize { db } => {
            let db = load_db(&db)?;
            print!("{}", text::db_to_doc(&rdfi::query::normalize(&db)));
            Ok(ExitCode::SUCCESS)
        }
        Command::EqComplete { db } => {
            let db = load_db(&db)?;
            let out = rdfi::query::eq_complete(&db).map_err(query_error)?;
            print!("{}", text::db_to_doc(&out));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn json_string_array(items: &[String]) -> String {
    let mut out = String::from("[");
    for (i, s) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{:?}", s));
    }
    out.push(']');
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => e.report(),
    }
}
