//! Reproducible command-line runs over the zerogap library.
//!
//! Every run is deterministic: identical flags produce byte-identical
//! output files.  CSV embeds the computation parameters in `#` header
//! lines; JSON carries them in a top-level `config` field.  Floats are
//! printed with 12 significant digits, '.' decimal, ',' separator.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use zerogap::als::{a_sum, a_sum_slope, als_moebius_corollary, b_sum, delta_diagonal_main};
use zerogap::arith::{zeta_coefficient_system, MultiplicativeWeight};
use zerogap::characters::{character_group, orthogonality_check_in, phi_ratio_identity};
use zerogap::special::{default_weight, solve_lambda, solve_mu};
use zerogap::zeros::{
    exact_m, exact_m_alpha, gap_statistics, scan_zeros_group, Normalization, ZeroLedger,
};

#[derive(Parser)]
#[command(
    name = "zerogap",
    about = "Character sums, gap constants, large-sieve diagonals, and L-function zeros",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; each subcommand has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Residual tolerance for the gap-constant solvers.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Worker threads (0 = auto).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Normalize by the global average spacing d·log(q)/2π.
    Global,
    /// Normalize by the local zero density log(q(|t|+3)/2π)/2π.
    Local,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the small- and large-gap constants for d = 1..=d_max.
    GapConstants {
        #[arg(long, default_value_t = 5)]
        d_max: u32,
    },
    /// Exhaustively verify the orthogonality and totient-ratio identities;
    /// exits nonzero on any failure.
    VerifyIdentities {
        #[arg(long, default_value_t = 150)]
        q_max: u64,
        #[arg(long, default_value_t = 300)]
        c_max: u64,
    },
    /// Diagonal character-average comparisons plus the Moebius corollary.
    Als {
        #[arg(long = "big-q", default_value_t = 100.0)]
        big_q: f64,
        #[arg(long, default_value_t = 60.0)]
        x: f64,
        #[arg(long, default_value_t = 10)]
        m_max: u64,
    },
    /// A-slope extraction and B-sum comparisons on the {0,α}×{0,β} grid.
    Sums {
        #[arg(long, default_value_t = 100_000.0)]
        x: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Scan all primitive characters mod q; ledgers as JSON.
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long = "t-max", default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Gap tables over all primitive characters with q ≤ q_max; the
    /// globally smallest normalized gap is flagged.
    Gaps {
        #[arg(long = "q-max", default_value_t = 20)]
        q_max: u64,
        #[arg(long, value_enum, default_value_t = Mode::Local)]
        mode: Mode,
        #[arg(long = "t-max", default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Exact 𝓜, its diagonal main term, and exact 𝓜(α) with a verdict.
    CompareM {
        #[arg(long = "big-q", default_value_t = 40.0)]
        big_q: f64,
        #[arg(long, default_value_t = 40.0)]
        x: f64,
        #[arg(long)]
        alpha: f64,
    },
}

/// 12 significant digits, locale-free.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

/// The computation-relevant parameters of a run, in a fixed order.
/// (`--out` and `--threads` do not influence the numbers and are omitted,
/// so identical configurations give byte-identical files.)
struct RunConfig {
    subcommand: &'static str,
    params: Vec<(&'static str, String)>,
    format: Format,
}

impl RunConfig {
    fn csv_header(&self) -> String {
        let mut line = format!("# config: subcommand={}", self.subcommand);
        for (k, v) in &self.params {
            let _ = write!(line, " {k}={v}");
        }
        let _ = write!(
            line,
            " format={}",
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
        );
        line
    }

    fn json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("subcommand".into(), self.subcommand.into());
        for (k, v) in &self.params {
            map.insert((*k).into(), v.clone().into());
        }
        serde_json::Value::Object(map)
    }
}

/// A rectangular result with fixed headers; renders to CSV or JSON.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, config: &RunConfig) -> String {
        match config.format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&config.csv_header());
                out.push('\n');
                out.push_str(&self.headers.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = serde_json::Map::new();
                        for (h, v) in self.headers.iter().zip(row) {
                            m.insert((*h).into(), v.clone().into());
                        }
                        serde_json::Value::Object(m)
                    })
                    .collect();
                let doc = serde_json::json!({
                    "config": config.json_value(),
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn json_document(config: &RunConfig, body: serde_json::Value) -> String {
    let doc = serde_json::json!({
        "config": config.json_value(),
        "data": body,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let picked = |natural: Format| cli.format.unwrap_or(natural);
    match cli.command {
        Command::GapConstants { d_max } => {
            let config = RunConfig {
                subcommand: "gap-constants",
                params: vec![
                    ("d_max", d_max.to_string()),
                    ("tol", sig12(cli.tol)),
                ],
                format: picked(Format::Csv),
            };
            let rows: Vec<Vec<String>> = (1..=d_max)
                .into_par_iter()
                .map(|d| -> Result<Vec<String>> {
                    let mu = solve_mu(d, cli.tol)?;
                    let lam = solve_lambda(d, cli.tol)?;
                    let df = d as f64;
                    let asym = 1.0 - 2.0 / df + 4.0 / (df * df);
                    Ok(vec![
                        d.to_string(),
                        sig12(mu.value),
                        sig12(mu.residual),
                        sig12(lam.value),
                        sig12(lam.residual),
                        sig12(asym),
                    ])
                })
                .collect::<Result<_>>()?;
            let table = Table {
                headers: vec![
                    "d",
                    "mu_d",
                    "residual_mu",
                    "lambda_d",
                    "residual_lambda",
                    "mu_asymptotic",
                ],
                rows,
            };
            emit(&cli.out, &table.render(&config))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::VerifyIdentities { q_max, c_max } => {
            let config = RunConfig {
                subcommand: "verify-identities",
                params: vec![("q_max", q_max.to_string()), ("c_max", c_max.to_string())],
                format: picked(Format::Json),
            };
            // orthogonality over primitive characters: all q ≤ q_max and
            // all coprime 1 ≤ m, n ≤ q_max
            let per_q: Vec<(u64, u64)> = (1..=q_max)
                .into_par_iter()
                .map(|q| -> Result<(u64, u64)> {
                    let group = character_group(q)?;
                    let coprime: Vec<u64> =
                        (1..=q_max).filter(|&m| zerogap::arith::gcd(m, q) == 1).collect();
                    let mut cases = 0u64;
                    let mut failures = 0u64;
                    for &m in &coprime {
                        for &n in &coprime {
                            let check = orthogonality_check_in(&group, m, n)?;
                            cases += 1;
                            if (check.enumerated
                                - Complex64::new(check.formula as f64, 0.0))
                            .norm()
                                > 1e-8
                            {
                                failures += 1;
                            }
                        }
                    }
                    Ok((cases, failures))
                })
                .collect::<Result<_>>()?;
            let (l1_cases, l1_failures) = per_q
                .iter()
                .fold((0u64, 0u64), |(c, f), &(dc, df)| (c + dc, f + df));

            let mut l2_cases = 0u64;
            let mut l2_failures = 0u64;
            for c in 1..=c_max {
                for d in 1..=c_max {
                    let (lhs, rhs) = phi_ratio_identity(c, d);
                    l2_cases += 1;
                    if lhs != rhs {
                        l2_failures += 1;
                    }
                }
            }

            let body = serde_json::json!({
                "lemma1": { "cases": l1_cases, "failures": l1_failures },
                "lemma2": { "cases": l2_cases, "failures": l2_failures },
            });
            let content = match config.format {
                Format::Json => json_document(&config, body),
                Format::Csv => {
                    let table = Table {
                        headers: vec!["identity", "cases", "failures"],
                        rows: vec![
                            vec![
                                "lemma1".into(),
                                l1_cases.to_string(),
                                l1_failures.to_string(),
                            ],
                            vec![
                                "lemma2".into(),
                                l2_cases.to_string(),
                                l2_failures.to_string(),
                            ],
                        ],
                    };
                    table.render(&config)
                }
            };
            emit(&cli.out, &content)?;
            if l1_failures + l2_failures > 0 {
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Als { big_q, x, m_max } => {
            let config = RunConfig {
                subcommand: "als",
                params: vec![
                    ("Q", sig12(big_q)),
                    ("X", sig12(x)),
                    ("m_max", m_max.to_string()),
                ],
                format: picked(Format::Csv),
            };
            let w = default_weight();
            let mut reports: Vec<zerogap::als::ComparisonReport> = (1..=m_max)
                .into_par_iter()
                .map(|m| delta_diagonal_main(m, big_q, &w))
                .collect::<zerogap::Result<_>>()?;
            reports.push(als_moebius_corollary(big_q, x, &w)?);
            let rows = reports
                .iter()
                .map(|r| {
                    vec![
                        r.parameter_string(),
                        sig12(r.exact.re),
                        sig12(r.main_term.re),
                        sig12(r.abs_error),
                        sig12(r.rel_error),
                    ]
                })
                .collect();
            let table = Table {
                headers: vec!["parameters", "exact", "main_term", "abs_error", "rel_error"],
                rows,
            };
            emit(&cli.out, &table.render(&config))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Sums { x, alpha, beta } => {
            let config = RunConfig {
                subcommand: "sums",
                params: vec![
                    ("X", sig12(x)),
                    ("alpha", sig12(alpha)),
                    ("beta", sig12(beta)),
                ],
                format: picked(Format::Csv),
            };
            let cs = zeta_coefficient_system();
            let g = MultiplicativeWeight::one();
            let mut rows = Vec::new();
            // A row: the exact sum against the two-scale linear model
            let slope = a_sum_slope(x, &g, &cs);
            let a_exact = a_sum(x, &g, &cs, Complex64::new(0.0, 0.0));
            let a_model = slope * x.ln();
            rows.push(vec![
                format!("kind=A;X={};slope={}", sig12(x), sig12(slope)),
                sig12(a_exact.re),
                sig12(a_model),
                sig12((a_exact.re - a_model).abs()),
                sig12((a_exact.re - a_model).abs() / a_model.abs()),
            ]);
            // B rows over the {0, α} × {0, β} grid
            for &al in &[0.0, alpha] {
                for &be in &[0.0, beta] {
                    let r = b_sum(
                        x,
                        &g,
                        &cs,
                        Complex64::new(al, 0.0),
                        Complex64::new(be, 0.0),
                    );
                    rows.push(vec![
                        format!("kind=B;{}", r.parameter_string()),
                        sig12(r.exact.re),
                        sig12(r.main_term.re),
                        sig12(r.abs_error),
                        sig12(r.rel_error),
                    ]);
                }
            }
            let table = Table {
                headers: vec!["parameters", "exact", "main_term", "abs_error", "rel_error"],
                rows,
            };
            emit(&cli.out, &table.render(&config))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Zeros { q, t_max, step } => {
            let config = RunConfig {
                subcommand: "zeros",
                params: vec![
                    ("q", q.to_string()),
                    ("t_max", sig12(t_max)),
                    ("step", sig12(step)),
                ],
                format: picked(Format::Json),
            };
            let group = character_group(q)?;
            let ledgers = scan_zeros_group(&group, 0.0, t_max, step)?;
            let content = match config.format {
                Format::Json => json_document(
                    &config,
                    serde_json::json!({ "ledgers": ledgers }),
                ),
                Format::Csv => {
                    let mut rows = Vec::new();
                    for ledger in &ledgers {
                        for z in &ledger.zeros {
                            rows.push(vec![
                                ledger.q.to_string(),
                                ledger.chi_index.to_string(),
                                sig12(z.gamma),
                                sig12(z.halfwidth),
                                sig12(ledger.expected_count),
                            ]);
                        }
                    }
                    Table {
                        headers: vec!["q", "chi_index", "gamma", "halfwidth", "expected_count"],
                        rows,
                    }
                    .render(&config)
                }
            };
            emit(&cli.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Gaps { q_max, mode, t_max, step } => {
            let config = RunConfig {
                subcommand: "gaps",
                params: vec![
                    ("q_max", q_max.to_string()),
                    (
                        "mode",
                        match mode {
                            Mode::Global => "global".to_string(),
                            Mode::Local => "local".to_string(),
                        },
                    ),
                    ("t_max", sig12(t_max)),
                    ("step", sig12(step)),
                ],
                format: picked(Format::Csv),
            };
            let normalization = match mode {
                Mode::Global => Normalization::GlobalAverage { degree: 1 },
                Mode::Local => Normalization::LocalDensity,
            };
            let ledgers: Vec<ZeroLedger> = (1..=q_max)
                .into_par_iter()
                .map(|q| -> zerogap::Result<Vec<ZeroLedger>> {
                    let group = character_group(q)?;
                    scan_zeros_group(&group, 0.0, t_max, step)
                })
                .collect::<zerogap::Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();

            // rows: one per consecutive gap, with the global minimum flagged
            let mut rows_data = Vec::new();
            for ledger in &ledgers {
                if ledger.zeros.len() < 2 {
                    continue;
                }
                let stats = gap_statistics(ledger, normalization)?;
                for (pair, norm) in ledger.zeros.windows(2).zip(&stats.normalized) {
                    rows_data.push((
                        ledger.q,
                        ledger.chi_index,
                        pair[0].gamma,
                        pair[1].gamma,
                        pair[1].gamma - pair[0].gamma,
                        *norm,
                    ));
                }
            }
            let min_idx = rows_data
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .5.partial_cmp(&b.1 .5).expect("finite gaps"))
                .map(|(i, _)| i);
            let rows = rows_data
                .iter()
                .enumerate()
                .map(|(i, &(q, idx, lo, hi, raw, norm))| {
                    vec![
                        q.to_string(),
                        idx.to_string(),
                        sig12(lo),
                        sig12(hi),
                        sig12(raw),
                        sig12(norm),
                        if Some(i) == min_idx { "1" } else { "0" }.to_string(),
                    ]
                })
                .collect();
            let table = Table {
                headers: vec![
                    "q",
                    "chi_index",
                    "gamma_low",
                    "gamma_high",
                    "raw_gap",
                    "normalized_gap",
                    "is_min",
                ],
                rows,
            };
            emit(&cli.out, &table.render(&config))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::CompareM { big_q, x, alpha } => {
            let config = RunConfig {
                subcommand: "compare-m",
                params: vec![
                    ("Q", sig12(big_q)),
                    ("X", sig12(x)),
                    ("alpha", sig12(alpha)),
                ],
                format: picked(Format::Json),
            };
            let w = default_weight();
            let cs = zeta_coefficient_system();
            let report = exact_m(big_q, x, &w, &cs)?;
            let m_alpha = exact_m_alpha(big_q, x, alpha, &w, &cs)?;
            let body = serde_json::json!({
                "M_exact": report.exact.re,
                "M_main": report.main_term.re,
                "M_alpha_exact": m_alpha,
                "alpha": alpha,
                "verdict": m_alpha > report.exact.re,
            });
            let content = match config.format {
                Format::Json => json_document(&config, body),
                Format::Csv => Table {
                    headers: vec!["key", "value"],
                    rows: vec![
                        vec!["M_exact".into(), sig12(report.exact.re)],
                        vec!["M_main".into(), sig12(report.main_term.re)],
                        vec!["M_alpha_exact".into(), sig12(m_alpha)],
                        vec!["alpha".into(), sig12(alpha)],
                        vec![
                            "verdict".into(),
                            (m_alpha > report.exact.re).to_string(),
                        ],
                    ],
                }
                .render(&config),
            };
            emit(&cli.out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
