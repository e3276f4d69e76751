//! `apavoid`: exact windows, membership checks, escape certificates and
//! diagnostics for sets with no infinite arithmetic progression.

mod config;

use std::io::Write;
use std::process::ExitCode;

use apavoid::{
    block_index, cell, certify_escape_rational, certify_escape_search, choose_n_for_lambda,
    claim1_verify, equidist_stats, exclusion, find_two_sided_ap, parse_rational, verify_ap_avoids,
    verify_certificate, window, CertifiedReal, Error, IntervalSet, Progression, Rational,
    SearchOutcome, SetSpec,
};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use config::{Config, Format};

const SCHEMA: &str = "1";

#[derive(Parser, Debug)]
#[command(
    name = "apavoid",
    version,
    about = "Sets of large density that contain no infinite arithmetic progression"
)]
struct Cli {
    /// Output format; overrides `output_format` from the config file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Exact description of S(N) ∩ [from, to) and its measure.
    Window {
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        from: Rational,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        to: Rational,
    },
    /// Membership of a point; products take comma-separated coordinates.
    Check {
        /// `basic:N`, `scaled:N:r`, `SPEC^d` or a JSON set description.
        #[arg(long, value_parser = spec_arg)]
        spec: Option<SetSpec>,
        #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
        x: Point,
    },
    /// Certificate that x0 + Δℕ leaves the set.
    Escape {
        #[arg(long, value_parser = spec_arg)]
        spec: Option<SetSpec>,
        #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
        x0: Point,
        #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
        delta: Point,
        /// Largest index tried by the search route.
        #[arg(long)]
        depth: Option<u64>,
    },
    /// Term counts behind the density bound on [β_k/(N+1), β_k).
    Claim1 {
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        x0: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long)]
        k: u64,
    },
    /// Tallies of the fractional parts of x0 + iΔ over Q_0, …, Q_{N-1}.
    Equidist {
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        x0: CertifiedReal,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        delta: CertifiedReal,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
    },
    /// Two-sided progression avoiding a set G of measure below xi.
    FindAp {
        /// JSON pairs `[["lo","hi"],...]` or `lo:hi,lo:hi`.
        #[arg(long = "G", value_parser = interval_set_arg, allow_hyphen_values = true)]
        g: IntervalSet<Rational>,
        #[arg(long, value_parser = rational_arg)]
        xi: Rational,
        /// Re-check x + 2ξk ∉ G for |k| up to this bound.
        #[arg(long, default_value_t = 1000)]
        verify_range: u64,
    },
    /// Smallest N whose unit windows all keep measure at least λ.
    #[command(name = "choose-N")]
    ChooseN {
        #[arg(long, value_parser = rational_arg)]
        lambda: Rational,
    },
    /// Kept and deleted segments of S(N) over [from, to), for plotting.
    PlotWindow {
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        from: Rational,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        to: Rational,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn real_arg(s: &str) -> Result<CertifiedReal, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated coordinates.
#[derive(Clone, Debug)]
struct Point(Vec<CertifiedReal>);

fn point_arg(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(real_arg)
        .collect::<Result<_, _>>()
        .map(Point)
}

fn spec_arg(s: &str) -> Result<SetSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn interval_set_arg(s: &str) -> Result<IntervalSet<Rational>, String> {
    let s = s.trim();
    if s.starts_with('[') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let mut pairs = Vec::new();
    for piece in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = piece
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {piece:?}"))?;
        let (lo, hi) = (rational_arg(lo)?, rational_arg(hi)?);
        if lo >= hi {
            return Err(format!("empty interval [{lo}, {hi})"));
        }
        pairs.push((lo, hi));
    }
    Ok(IntervalSet::from_intervals(pairs))
}

/// Domain failure reported as a JSON object with exit status 1.
struct Failure {
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error }
    }
}

impl Failure {
    fn to_json(&self) -> Value {
        let mut obj = json!({
            "kind": self.error.kind(),
            "message": self.error.to_string(),
        });
        if let Error::PreconditionUnmet { report, .. } = &self.error {
            obj["report"] = serde_json::to_value(report).expect("report serializes");
        }
        json!({ "schema": SCHEMA, "error": obj })
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn with_schema(value: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), Value::String(SCHEMA.into()));
    match value {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("value".into(), other);
        }
    }
    Value::Object(map)
}

fn warn_if_trivial(n: u64) {
    if n == 1 {
        eprintln!("warning: with N = 1 every cell deletes all of [0, 1), so S(1) is empty");
    }
}

fn spec_n(spec: &SetSpec) -> Option<u64> {
    match spec {
        SetSpec::Basic { n } => Some(*n),
        SetSpec::ScaledIntersection { inner, .. } => spec_n(inner),
        SetSpec::Product { factors } => factors.iter().find_map(spec_n),
        SetSpec::ExplicitComplement { .. } => None,
    }
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",") + "\n"
}

fn run(cli: Cli, config: &Config) -> Result<Output, Failure> {
    let format = |natural: Format| cli.format.or(config.output_format).unwrap_or(natural);
    let basic = |n: Option<u64>| -> Result<(u64, SetSpec), Failure> {
        let n = n.unwrap_or(config.default_n);
        warn_if_trivial(n);
        Ok((n, SetSpec::basic(n)?))
    };
    let spec_or_default = |spec: Option<SetSpec>| -> Result<SetSpec, Failure> {
        let spec = match spec {
            Some(s) => s,
            None => SetSpec::basic(config.default_n)?,
        };
        if let Some(n) = spec_n(&spec) {
            warn_if_trivial(n);
        }
        Ok(spec)
    };
    let limit = |x: CertifiedReal| x.with_refine_limit(config.max_refine_width.clone());

    match cli.command {
        Command::Window { n, from, to } => {
            let (n, spec) = basic(n)?;
            let set: IntervalSet<Rational> = window(&spec, &from, &to)?;
            let measure = set.measure();
            Ok(match format(Format::Json) {
                Format::Json => Output::Json(json!({
                    "N": n,
                    "from": from.to_string(),
                    "to": to.to_string(),
                    "set": set,
                    "measure": measure.to_string(),
                })),
                Format::Csv => {
                    let mut out = csv_line(&["lo".into(), "hi".into()]);
                    for (lo, hi) in set.intervals() {
                        out += &csv_line(&[lo.to_string(), hi.to_string()]);
                    }
                    Output::Text(out)
                }
            })
        }
        Command::Check { spec, x } => {
            let spec = spec_or_default(spec)?;
            let point: Vec<_> = x.0.into_iter().map(limit).collect();
            let reason = exclusion(&spec, &point)?;
            let (coordinate, reason) = match reason {
                Some((c, r)) => (Some(c), Some(r)),
                None => (None, None),
            };
            Ok(Output::Json(json!({
                "spec": spec,
                "point": point,
                "member": reason.is_none(),
                "coordinate": coordinate,
                "exclusion": reason,
            })))
        }
        Command::Escape {
            spec,
            x0,
            delta,
            depth,
        } => {
            let spec = spec_or_default(spec)?;
            let start: Vec<_> = x0.0.into_iter().map(limit).collect();
            let gap: Vec<_> = delta.0.into_iter().map(limit).collect();
            let prog = Progression::new(start.clone(), gap.clone())?
                .with_refine_limit(config.max_refine_width.clone());
            if !apavoid::contains(&spec, &start)? {
                let shown: Vec<String> = start.iter().map(ToString::to_string).collect();
                return Err(Error::NotInSet { x: shown.join(",") }.into());
            }
            let rational_input = match (&spec, start.as_slice(), gap.as_slice()) {
                (SetSpec::Basic { n }, [x], [d]) => x
                    .as_rational()
                    .zip(d.as_rational())
                    .map(|(x, d)| (*n, x.clone(), d.clone())),
                _ => None,
            };
            let (route, outcome) = match rational_input {
                Some((n, x, d)) => (
                    "constructive",
                    SearchOutcome::Escaped(Box::new(certify_escape_rational(n, &x, &d)?)),
                ),
                None => (
                    "search",
                    certify_escape_search(&spec, &prog, depth.unwrap_or(config.search_depth))?,
                ),
            };
            let verified = match outcome.certificate() {
                Some(cert) => Some(verify_certificate(&spec, &prog, cert)?),
                None => None,
            };
            let mut value = serde_json::to_value(&outcome).expect("outcome serializes");
            value["route"] = json!(route);
            value["verified"] = json!(verified);
            Ok(Output::Json(value))
        }
        Command::Claim1 { n, x0, delta, k } => {
            let (n, _) = basic(n)?;
            let report = claim1_verify(n, &x0, &delta, k)?;
            Ok(Output::Json(
                serde_json::to_value(report).expect("report serializes"),
            ))
        }
        Command::Equidist {
            n,
            x0,
            delta,
            m,
            eps,
        } => {
            let (n, _) = basic(n)?;
            let prog = Progression::one_dim(limit(x0), limit(delta))?
                .with_refine_limit(config.max_refine_width.clone());
            let stats = equidist_stats(n, &prog, m, &eps)?;
            Ok(match format(Format::Csv) {
                Format::Csv => Output::Text(stats.to_csv()?),
                Format::Json => Output::Json(serde_json::to_value(stats).expect("stats serialize")),
            })
        }
        Command::FindAp {
            g,
            xi,
            verify_range,
        } => {
            let witness = find_two_sided_ap(&g, &xi)?;
            let verified = verify_ap_avoids(&g, &witness, verify_range);
            let mut value = serde_json::to_value(&witness).expect("witness serializes");
            value["verify_range"] = json!(verify_range);
            value["verified"] = json!(verified);
            Ok(Output::Json(value))
        }
        Command::ChooseN { lambda } => {
            let n = choose_n_for_lambda(&lambda)?;
            Ok(Output::Json(
                json!({ "lambda": lambda.to_string(), "N": n }),
            ))
        }
        Command::PlotWindow { n, from, to } => {
            let (n, _) = basic(n)?;
            let segments = plot_segments(n, &from, &to)?;
            Ok(match format(Format::Json) {
                Format::Json => Output::Json(json!({
                    "N": n,
                    "from": from.to_string(),
                    "to": to.to_string(),
                    "segments": segments,
                })),
                Format::Csv => {
                    let header = [
                        "m",
                        "block",
                        "residue",
                        "kept",
                        "lo",
                        "hi",
                        "lo_approx",
                        "hi_approx",
                    ];
                    let mut out = csv_line(&header.map(String::from));
                    for s in &segments {
                        let fields = header.map(|h| match &s[h] {
                            Value::String(v) => v.clone(),
                            other => other.to_string(),
                        });
                        out += &csv_line(&fields);
                    }
                    Output::Text(out)
                }
            })
        }
    }
}

/// One row per maximal piece of each unit cell inside `[from, to)`, marking
/// whether it belongs to the set. Rows carry the block and residue so that
/// the banding by block can be coloured.
fn plot_segments(n: u64, from: &Rational, to: &Rational) -> Result<Vec<Value>, Error> {
    if from >= to {
        return Err(Error::InvalidParameter(format!(
            "window [{from}, {to}) is empty"
        )));
    }
    let clip = IntervalSet::interval(from.clone(), to.clone());
    let mut rows = Vec::new();
    let mut m = from.floor().to_integer();
    let last = to.ceil().to_integer();
    while m < last {
        let unit = IntervalSet::interval(
            Rational::from_integer(m.clone()),
            Rational::from_integer(&m + 1),
        )
        .intersect(&clip);
        let kept = cell(n, &m).intersect(&unit);
        let deleted = unit.subtract(&kept);
        let block = block_index(n, &BigInt::from(m.magnitude().clone()));
        let mut pieces: Vec<(bool, (Rational, Rational))> = kept
            .into_intervals()
            .into_iter()
            .map(|p| (true, p))
            .chain(deleted.into_intervals().into_iter().map(|p| (false, p)))
            .collect();
        pieces.sort_by(|a, b| a.1 .0.cmp(&b.1 .0));
        for (is_kept, (lo, hi)) in pieces {
            rows.push(json!({
                "m": m.to_string(),
                "block": block.k,
                "residue": block.residue,
                "kept": is_kept,
                "lo": lo.to_string(),
                "hi": hi.to_string(),
                "lo_approx": CertifiedReal::from_rational(lo).to_f64_approx(),
                "hi_approx": CertifiedReal::from_rational(hi).to_f64_approx(),
            }));
        }
        m += BigInt::from(1);
    }
    Ok(rows)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match Config::load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let (text, code) = match run(cli, &config) {
        Ok(Output::Json(v)) => (pretty(&with_schema(v)), ExitCode::SUCCESS),
        Ok(Output::Text(t)) => (t, ExitCode::SUCCESS),
        Err(f) => (pretty(&f.to_json()), ExitCode::from(1)),
    };
    if stdout.write_all(text.as_bytes()).is_err() {
        return ExitCode::from(1);
    }
    code
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}
