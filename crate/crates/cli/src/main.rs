//! `atlas`: command-line front end for rational butterfly spectra and their self-maps.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use atlas_core::curves::{classify_symmetry, diagonal_segments, trace_curve, DEFAULT_GRID};
use atlas_core::gaps::gap_table;
use atlas_core::ids::{ids_f, trace_below};
use atlas_core::moebius::factor_word;
use atlas_core::render::{
    butterfly_rows, fmt_num, render_butterfly, render_curve, render_similarity_overlay,
    RenderConfig,
};
use atlas_core::similarity::{Sign, Similarity};
use atlas_core::spectrum::{charpoly_coeffs, spectrum};
use atlas_core::{ErrorKind, ProjMat, Rational};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{num, nums, Failure, Sink};

#[derive(Debug, Parser)]
#[command(name = "atlas", version, about = "Rational Hofstadter butterfly spectra and self-similarity maps")]
struct Cli {
    /// Output file; relative paths resolve against ATLAS_OUT_DIR when it is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Band edges at theta.
    Spectrum {
        #[arg(long)]
        theta: Rational,
    },
    /// Characteristic polynomial P_theta.
    Charpoly {
        #[arg(long)]
        theta: Rational,
    },
    /// The butterfly over all Farey fractions with denominator at most qmax.
    Butterfly {
        #[arg(long, default_value_t = 30)]
        qmax: u32,
        #[arg(long, default_value_t = 1024)]
        width: u32,
        #[arg(long, default_value_t = 1024)]
        height: u32,
    },
    /// Apply S(M, r, sign) to a point, or render its image of the butterfly.
    Similarity {
        #[arg(long, allow_hyphen_values = true)]
        matrix: ProjMat,
        #[arg(long, default_value_t = 0)]
        r: u64,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long)]
        theta: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Write the overlay SVG here.
        #[arg(long)]
        render: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        qmax: u32,
    },
    /// Factor a semigroup matrix into a word in A and B.
    Factor {
        #[arg(long, allow_hyphen_values = true)]
        matrix: ProjMat,
    },
    /// Gap labels and gap intervals at theta.
    Gaps {
        #[arg(long)]
        theta: Rational,
    },
    /// Trace the curve P_from(x) + sign·P_to(y) = 0.
    Curve {
        #[arg(long)]
        from: Rational,
        #[arg(long)]
        to: Rational,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long)]
        restricted: bool,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Segment table with columns x1,y1,x2,y2,component_id.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrated density of states F(x) of the free operator.
    Ids {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Normalized trace of the spectral projection below x at theta.
    Trace {
        #[arg(long)]
        theta: Rational,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
}

#[derive(Serialize)]
struct SpectrumJson {
    theta: String,
    edges: Vec<Box<serde_json::value::RawValue>>,
    bands: Vec<[Box<serde_json::value::RawValue>; 2]>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn require(format: Format, allowed: &[Format], cmd: &str) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{cmd} does not support --format {format:?}")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let sink = Sink::new(cli.out.clone());
    match cli.cmd {
        Cmd::Spectrum { theta } => {
            let format = cli.format.unwrap_or(Format::Json);
            require(format, &[Format::Json, Format::Csv], "spectrum")?;
            let spec = spectrum(theta)?;
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["theta", "k", "lo", "hi"])?;
                for (k, (lo, hi)) in spec.bands().enumerate() {
                    w.write_record([theta.to_string(), (k + 1).to_string(), fmt_num(lo), fmt_num(hi)])?;
                }
                sink.write_bytes(&output::finish_csv(w)?)
            } else {
                let body = SpectrumJson {
                    theta: theta.to_string(),
                    edges: nums(spec.edges()),
                    bands: spec.bands().map(|(lo, hi)| [num(lo), num(hi)]).collect(),
                };
                sink.write_json(&body)
            }
        }
        Cmd::Charpoly { theta } => {
            let poly = charpoly_coeffs(theta)?;
            match cli.format {
                None => sink.write_line(&poly.to_string()),
                Some(Format::Json) => {
                    #[derive(Serialize)]
                    struct Body {
                        theta: String,
                        degree: usize,
                        coefficients: Vec<Box<serde_json::value::RawValue>>,
                        integer_coefficients: Option<Vec<String>>,
                    }
                    let body = Body {
                        theta: theta.to_string(),
                        degree: poly.degree(),
                        coefficients: nums(&poly.coeffs),
                        integer_coefficients: poly
                            .integer_coeffs()
                            .map(|v| v.iter().map(|c| c.to_string()).collect()),
                    };
                    sink.write_json(&body)
                }
                Some(f) => require(f, &[Format::Json], "charpoly"),
            }
        }
        Cmd::Butterfly { qmax, width, height } => {
            let format = cli.format.unwrap_or(Format::Svg);
            let cfg = RenderConfig { qmax, width, height, ..RenderConfig::default() };
            match format {
                Format::Svg => sink.write_str(&render_butterfly(&cfg)?),
                Format::Csv => {
                    cfg.validate()?;
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["theta", "k", "lo", "hi"])?;
                    for row in butterfly_rows(qmax)?.rows {
                        for (k, (lo, hi)) in row.bands.iter().enumerate() {
                            w.write_record([
                                row.theta.to_string(),
                                (k + 1).to_string(),
                                fmt_num(*lo),
                                fmt_num(*hi),
                            ])?;
                        }
                    }
                    sink.write_bytes(&output::finish_csv(w)?)
                }
                Format::Json => {
                    cfg.validate()?;
                    let rows: Vec<SpectrumJson> = butterfly_rows(qmax)?
                        .rows
                        .into_iter()
                        .map(|row| SpectrumJson {
                            theta: row.theta.to_string(),
                            edges: nums(&row.bands.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>()),
                            bands: row.bands.iter().map(|&(lo, hi)| [num(lo), num(hi)]).collect(),
                        })
                        .collect();
                    sink.write_json(&rows)
                }
            }
        }
        Cmd::Similarity { matrix, r, sign, theta, x, render, qmax } => {
            let sim = Similarity::new(matrix, r, sign)?;
            if let Some(path) = render {
                let cfg = RenderConfig { qmax, ..RenderConfig::default() };
                Sink::new(Some(path)).write_str(&render_similarity_overlay(&sim, &cfg)?)?;
            }
            match (theta, x) {
                (Some(theta), Some(x)) => {
                    let img = sim.map_point(theta, x)?;
                    #[derive(Serialize)]
                    struct Body {
                        theta_out: String,
                        raw: [i64; 2],
                        points: Vec<Box<serde_json::value::RawValue>>,
                        bands: Vec<usize>,
                    }
                    sink.write_json(&Body {
                        theta_out: img.theta_out.to_string(),
                        raw: [img.raw.0, img.raw.1],
                        points: nums(&img.points),
                        bands: img.bands,
                    })
                }
                (None, None) => Ok(()),
                _ => Err(Failure::Usage("--theta and --x go together".into())),
            }
        }
        Cmd::Factor { matrix } => sink.write_line(&factor_word(&matrix)?.to_string()),
        Cmd::Gaps { theta } => {
            let format = cli.format.unwrap_or(Format::Csv);
            require(format, &[Format::Json, Format::Csv], "gaps")?;
            let rows = gap_table(theta)?;
            if format == Format::Csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["k", "s", "t", "lo", "hi"])?;
                for g in &rows {
                    w.write_record([
                        g.k.to_string(),
                        g.label.s.to_string(),
                        g.label.t.to_string(),
                        fmt_num(g.lo),
                        fmt_num(g.hi),
                    ])?;
                }
                sink.write_bytes(&output::finish_csv(w)?)
            } else {
                #[derive(Serialize)]
                struct Gap {
                    k: i64,
                    s: i64,
                    t: i64,
                    lo: Box<serde_json::value::RawValue>,
                    hi: Box<serde_json::value::RawValue>,
                }
                let body: Vec<Gap> = rows
                    .iter()
                    .map(|g| Gap { k: g.k, s: g.label.s, t: g.label.t, lo: num(g.lo), hi: num(g.hi) })
                    .collect();
                sink.write_json(&body)
            }
        }
        Cmd::Curve { from, to, sign, restricted, grid, csv: csv_path } => {
            let curve = trace_curve(from, to, sign, grid, restricted)?;
            if cli.out.is_some() {
                sink.write_str(&render_curve(&curve, 800)?)?;
            }
            if let Some(path) = csv_path {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["x1", "y1", "x2", "y2", "component_id"])?;
                for (seg, c) in curve.segments.iter().zip(&curve.component) {
                    w.write_record([
                        fmt_num(seg.a.0),
                        fmt_num(seg.a.1),
                        fmt_num(seg.b.0),
                        fmt_num(seg.b.1),
                        c.to_string(),
                    ])?;
                }
                Sink::new(Some(path)).write_bytes(&output::finish_csv(w)?)?;
            }
            #[derive(Serialize)]
            struct Summary {
                from: String,
                to: String,
                sign: String,
                grid: usize,
                restricted: bool,
                segments: usize,
                component_count: usize,
                symmetry: String,
                diagonal_segments: usize,
            }
            let summary = Summary {
                from: from.to_string(),
                to: to.to_string(),
                sign: sign.to_string(),
                grid,
                restricted,
                segments: curve.segments.len(),
                component_count: curve.component_count,
                symmetry: classify_symmetry(&curve).to_string(),
                diagonal_segments: diagonal_segments(&curve)?,
            };
            Sink::new(None).write_json(&summary)
        }
        Cmd::Ids { x } => sink.write_line(&fmt_num(ids_f(x))),
        Cmd::Trace { theta, x } => sink.write_line(&fmt_num(trace_below(theta, x)?)),
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.kind() {
                ErrorKind::InvalidInput => 2,
                ErrorKind::Numerical => 3,
            },
            Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
        }
    }
}
