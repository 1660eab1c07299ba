//! Batch command-line front end: verification, conversion, orbit
//! analysis, and search over permutation codes.
//!
//! Exit codes: 0 when every requested check passed, 1 when a verification
//! failed (with a witness in the report), 2 on input errors. Every
//! command prints a human-readable summary by default, a versioned JSON
//! report with `--json`, and nothing with `--quiet`.

mod search_cfg;

use clap::{Parser, Subcommand, ValueEnum};
use molskit::code::{separability_partition, PermutationCode};
use molskit::data::{build_group, e_words, load_dataset, verify_dataset_full};
use molskit::dm::{code_to_dm, dm_to_code, DifferenceMatrix};
use molskit::group::parse_group_spec;
use molskit::iso::{orbit, orbit_split};
use molskit::latin::{code_to_mols, mols_to_code, MolsSet};
use molskit::search::{backtrack_join, enumerate_orbits};
use molskit::{Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};

const REPORT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "molskit",
    version,
    about = "Isometry-invariant permutation codes, difference matrices, and MOLS"
)]
struct Cli {
    /// Emit a versioned JSON report instead of the human-readable summary.
    #[arg(long, global = true)]
    json: bool,

    /// Suppress the human-readable summary (exit code still reports the outcome).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a shipped dataset (by name) or a code file end to end.
    Verify {
        /// Dataset name (e.g. n48; see MOLSKIT_DATA) or path to a code file.
        target: String,

        /// Also export the derived MOLS as text, to PATH or stdout ("-").
        #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
        mols: Option<String>,
    },

    /// Convert between difference matrices, codes, and MOLS files.
    Convert {
        #[arg(value_enum)]
        direction: Direction,

        /// Input file.
        input: PathBuf,

        /// Output file, or "-" for stdout (the report then goes to stderr).
        output: String,

        /// Group spec (required for code-to-dm), e.g. Z14 or Z6xZ2xZ2xZ2.
        #[arg(long, required_if_eq("direction", "code-to-dm"))]
        group: Option<String>,
    },

    /// Run the orbit-join search described by a config file.
    Search {
        /// Search config file (see the README for the format).
        config: PathBuf,

        /// Resume from the checkpoint recorded in the config.
        #[arg(long)]
        resume: bool,

        /// Worker thread count (overrides the config).
        #[arg(long, value_name = "K")]
        workers: Option<usize>,

        /// Write any found code to this path in the code file format.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },

    /// Print the McNeish lower bound for the number of MOLS of order n.
    Bound {
        n: usize,
    },

    /// Print the orbit table of a dataset.
    Orbits {
        /// Dataset name (e.g. n35).
        dataset: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    DmToCode,
    CodeToDm,
    CodeToMols,
    MolsToCode,
}

impl Direction {
    fn as_str(self) -> &'static str {
        match self {
            Direction::DmToCode => "dm-to-code",
            Direction::CodeToDm => "code-to-dm",
            Direction::CodeToMols => "code-to-mols",
            Direction::MolsToCode => "mols-to-code",
        }
    }
}

/// Exit code for an error per the command contract: 1 for verification
/// failures (the input was understood but a check failed, with a witness
/// in the message), 2 for input errors.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DuplicateWord(_)
        | Error::TooFewWords
        | Error::MinDistance { .. }
        | Error::NotTransitive { .. }
        | Error::UnequalClasses { .. }
        | Error::ClassSizeNotDegree { .. }
        | Error::NotLatin(_)
        | Error::NotOrthogonal { .. }
        | Error::DifferenceProperty { .. }
        | Error::NotNormalized(_)
        | Error::NotCosetUnion { .. }
        | Error::MissingRegularRep { .. }
        | Error::DatasetMismatch { .. }
        | Error::NotClosed { .. }
        | Error::NoIdentity
        | Error::NotInvariant { .. } => 1,
        _ => 2,
    }
}

/// Write to stdout or stderr, exiting quietly with the conventional
/// SIGPIPE status when the reader has gone away (e.g. `molskit … | head`).
fn write_stream(text: &str, to_stderr: bool) {
    use std::io::Write;
    let result = if to_stderr {
        std::io::stderr().lock().write_all(text.as_bytes())
    } else {
        std::io::stdout().lock().write_all(text.as_bytes())
    };
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        let _ = writeln!(std::io::stderr(), "error: cannot write output: {e}");
        std::process::exit(2);
    }
}

/// Where reports go: stdout normally, stderr when stdout carries an
/// artifact (convert/export to "-").
struct Output {
    json: bool,
    quiet: bool,
    to_stderr: bool,
}

impl Output {
    fn emit(&self, report: serde_json::Value, human: &str) {
        let mut text = if self.json {
            serde_json::to_string_pretty(&report).expect("report serializes")
        } else if self.quiet {
            return;
        } else {
            human.trim_end().to_string()
        };
        text.push('\n');
        write_stream(&text, self.to_stderr);
    }

    fn fail(&self, command: &str, err: &Error) {
        if self.json {
            let report = json!({
                "version": REPORT_VERSION,
                "command": command,
                "ok": false,
                "error": err.to_string(),
                "exit_code": exit_code(err),
            });
            let mut text =
                serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            write_stream(&text, self.to_stderr);
        }
        write_stream(&format!("error: {err}\n"), true);
    }
}

fn main() {
    let cli = Cli::parse();
    let command = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Convert { .. } => "convert",
        Command::Search { .. } => "search",
        Command::Bound { .. } => "bound",
        Command::Orbits { .. } => "orbits",
    };
    // Artifacts routed to stdout push the report to stderr.
    let to_stderr = match &cli.command {
        Command::Verify { mols, .. } => mols.as_deref() == Some("-"),
        Command::Convert { output, .. } => output == "-",
        _ => false,
    };
    let out = Output { json: cli.json, quiet: cli.quiet, to_stderr };
    let status = match run(cli.command, &out) {
        Ok(()) => 0,
        Err(err) => {
            out.fail(command, &err);
            exit_code(&err)
        }
    };
    std::process::exit(i32::from(status));
}

fn run(command: Command, out: &Output) -> Result<()> {
    match command {
        Command::Verify { target, mols } => cmd_verify(&target, mols.as_deref(), out),
        Command::Convert { direction, input, output, group } => {
            cmd_convert(direction, &input, &output, group.as_deref(), out)
        }
        Command::Search { config, resume, workers, out: found_out } => {
            cmd_search(&config, resume, workers, found_out.as_deref(), out)
        }
        Command::Bound { n } => cmd_bound(n, out),
        Command::Orbits { dataset } => cmd_orbits(&dataset, out),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_artifact(target: &str, text: &str) -> Result<()> {
    if target == "-" {
        write_stream(text, false);
        Ok(())
    } else {
        std::fs::write(target, text).map_err(|e| Error::Io(format!("{target}: {e}")))
    }
}

fn cmd_verify(target: &str, mols_out: Option<&str>, out: &Output) -> Result<()> {
    if Path::new(target).exists() {
        verify_code_file(target, mols_out, out)
    } else {
        verify_dataset_by_name(target, mols_out, out)
    }
}

fn verify_dataset_by_name(name: &str, mols_out: Option<&str>, out: &Output) -> Result<()> {
    let ds = load_dataset(name)?;
    let (report, _code, partition) = verify_dataset_full(&ds)?;
    let mols = code_to_mols(&partition)?;
    if let Some(path) = mols_out {
        write_artifact(path, &mols.to_text())?;
    }

    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "verify",
        "ok": true,
        "kind": "dataset",
        "target": name,
        "report": report,
        "mols": mols.len(),
    });
    let mut human = String::new();
    human.push_str(&format!("dataset           {}\n", report.name));
    human.push_str(&format!("n                 {}\n", report.n));
    human.push_str(&format!("group order       {}\n", report.group_order));
    human.push_str("orbits            rep        size  stabilizer\n");
    for (((rep_name, _), size), stab) in ds
        .representatives
        .iter()
        .zip(&report.orbit_sizes)
        .zip(&report.stabilizer_orders)
    {
        human.push_str(&format!("                  {rep_name:<9} {size:>5}  {stab:>10}\n"));
    }
    if let Some(sizes) = &report.e_orbit_sizes {
        let rendered: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
        human.push_str(&format!("E orbit sizes     {}\n", rendered.join(" ")));
    }
    human.push_str(&format!("code size         {}\n", report.code_size));
    human.push_str(&format!("min distance      {}\n", report.min_distance));
    human.push_str(&format!("(r, m)            ({}, {})\n", report.r, report.m));
    if let Some(g) = &report.regular_subgroup {
        human.push_str(&format!("regular subgroup  {g}\n"));
    }
    if let Some(idx) = report.delta_index {
        human.push_str(&format!("delta index       {idx}\n"));
    }
    if let Some(dc) = &report.double_coset {
        human.push_str(&format!("double coset      {dc}\n"));
    }
    human.push_str(&format!("MOLS              {}\n", mols.len()));
    human.push_str("verdict           ok\n");
    out.emit(json_report, &human);
    Ok(())
}

fn verify_code_file(path: &str, mols_out: Option<&str>, out: &Output) -> Result<()> {
    let code = PermutationCode::parse_text(&read_file(Path::new(path))?)?;
    let pa = code.verify_pa(code.n().saturating_sub(1))?;
    let partition = separability_partition(&code)?;
    let mols = code_to_mols(&partition)?;
    if let Some(target) = mols_out {
        write_artifact(target, &mols.to_text())?;
    }

    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "verify",
        "ok": true,
        "kind": "code-file",
        "target": path,
        "n": code.n(),
        "code_size": code.len(),
        "min_distance": pa.min_distance,
        "r": partition.r(),
        "m": partition.m(),
        "mols": mols.len(),
    });
    let human = format!(
        "code file         {path}\nn                 {}\ncode size         {}\n\
         min distance      {}\n(r, m)            ({}, {})\nMOLS              {}\n\
         verdict           ok\n",
        code.n(),
        code.len(),
        pa.min_distance,
        partition.r(),
        partition.m(),
        mols.len(),
    );
    out.emit(json_report, &human);
    Ok(())
}

fn cmd_convert(
    direction: Direction,
    input: &Path,
    output: &str,
    group: Option<&str>,
    out: &Output,
) -> Result<()> {
    let text = read_file(input)?;
    let (artifact, details) = match direction {
        Direction::DmToCode => {
            let dm = DifferenceMatrix::parse_text(&text)?;
            let code = dm_to_code(&dm)?;
            let pa = code.verify_pa(code.n().saturating_sub(1))?;
            ensure_pa(&code, pa.ok)?;
            (
                code.to_text(),
                json!({
                    "n": code.n(),
                    "code_size": code.len(),
                    "min_distance": pa.min_distance,
                    "group": dm.group().spec_string(),
                    "rows": dm.num_rows(),
                }),
            )
        }
        Direction::CodeToDm => {
            let spec = group.expect("clap enforces --group for code-to-dm");
            let g = parse_group_spec(spec)?;
            let code = PermutationCode::parse_text(&text)?;
            let dm = code_to_dm(&code, &g)?;
            dm.verify()?;
            (
                dm.to_text(),
                json!({
                    "n": code.n(),
                    "group": g.spec_string(),
                    "rows": dm.num_rows(),
                    "cols": dm.cols(),
                    "lambda": dm.lambda(),
                }),
            )
        }
        Direction::CodeToMols => {
            let code = PermutationCode::parse_text(&text)?;
            let partition = separability_partition(&code)?;
            let mols = code_to_mols(&partition)?;
            (
                mols.to_text(),
                json!({
                    "n": code.n(),
                    "r": partition.r(),
                    "m": partition.m(),
                    "squares": mols.len(),
                }),
            )
        }
        Direction::MolsToCode => {
            let mols = MolsSet::parse_text(&text)?;
            let code = mols_to_code(&mols)?;
            let pa = code.verify_pa(code.n().saturating_sub(1))?;
            ensure_pa(&code, pa.ok)?;
            (
                code.to_text(),
                json!({
                    "n": code.n(),
                    "squares": mols.len(),
                    "code_size": code.len(),
                    "min_distance": pa.min_distance,
                }),
            )
        }
    };
    write_artifact(output, &artifact)?;

    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "convert",
        "ok": true,
        "direction": direction.as_str(),
        "input": input.display().to_string(),
        "output": output,
        "details": details,
    });
    let human = format!(
        "convert           {}\ninput             {}\noutput            {}\ndetails           {}\nverdict           ok\n",
        direction.as_str(),
        input.display(),
        output,
        details,
    );
    out.emit(json_report, &human);
    Ok(())
}

/// The conversions re-verify their output before it is written; the PA
/// check cannot fail for a verified input, but the contract is explicit.
fn ensure_pa(code: &PermutationCode, ok: bool) -> Result<()> {
    if ok {
        return Ok(());
    }
    let (found, i, j) = molskit::perm::min_distance_witness(code.words())?;
    Err(Error::MinDistance { found, required: code.n().saturating_sub(1), i, j })
}

fn cmd_search(
    config_path: &Path,
    resume: bool,
    workers: Option<usize>,
    found_out: Option<&Path>,
    out: &Output,
) -> Result<()> {
    let parsed = search_cfg::parse_search_config(&read_file(config_path)?)?;
    let mut cfg = parsed.cfg;
    if let Some(k) = workers {
        cfg.workers = k;
    }
    cfg.resume = resume;
    if resume && cfg.checkpoint_path.is_none() {
        return Err(Error::SearchConfig(
            "--resume requires a checkpoint path in the config".into(),
        ));
    }

    let no_universe: Vec<molskit::Permutation> = Vec::new();
    let enumeration = if parsed.enumerate_stabilized {
        enumerate_orbits(&cfg, None)?
    } else {
        enumerate_orbits(&cfg, Some(&no_universe))?
    };
    let report = if enumeration.candidates.is_empty() {
        // An empty (possibly truncated) enumeration is a result, not an
        // input error: there is nothing to join.
        molskit::search::SearchReport {
            version: REPORT_VERSION,
            n: cfg.u.n(),
            candidates: Vec::new(),
            chosen: Vec::new(),
            m_found: 0,
            words: Vec::new(),
            node_count: 0,
            complete: true,
        }
    } else {
        let outcome = backtrack_join(&enumeration.candidates, &cfg)?;
        if let Some(path) = found_out {
            if let Some(code) = &outcome.code {
                std::fs::write(path, code.to_text())
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
        }
        outcome.report(&enumeration.candidates)
    };
    let overall_complete = report.complete && enumeration.complete;

    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "search",
        "ok": true,
        "config": config_path.display().to_string(),
        "complete": overall_complete,
        "enumeration": {
            "candidates": enumeration.candidates.len(),
            "node_count": enumeration.node_count,
            "complete": enumeration.complete,
        },
        "report": report,
    });
    let mut human = String::new();
    human.push_str(&format!("search            {}\n", config_path.display()));
    human.push_str(&format!(
        "candidates        {} (enumeration {})\n",
        enumeration.candidates.len(),
        if enumeration.complete { "complete" } else { "truncated" },
    ));
    human.push_str("candidate         size  stabilizer  classes\n");
    for c in &report.candidates {
        human.push_str(&format!(
            "                  {:>4}  {:>10}  {:?}\n",
            c.size, c.stabilizer_order, c.class_sizes
        ));
    }
    human.push_str(&format!("chosen            {:?}\n", report.chosen));
    human.push_str(&format!("m found           {}\n", report.m_found));
    human.push_str(&format!("nodes             {}\n", report.node_count));
    human.push_str(&format!(
        "complete          {}\n",
        if overall_complete { "yes" } else { "no (node limit reached)" }
    ));
    out.emit(json_report, &human);
    Ok(())
}

fn cmd_bound(n: usize, out: &Output) -> Result<()> {
    let bound = molskit::code::macneish_bound(n)?;
    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "bound",
        "ok": true,
        "n": n,
        "bound": bound,
    });
    out.emit(json_report, &format!("{bound}\n"));
    Ok(())
}

fn cmd_orbits(name: &str, out: &Output) -> Result<()> {
    let ds = load_dataset(name)?;
    let u = build_group(&ds)?;
    let mut rows = Vec::new();
    for (rep_name, rep) in &ds.representatives {
        let size = orbit(rep, &u)?.len();
        let stab = u.stabilizer(rep)?.len();
        rows.push((rep_name.clone(), size, stab));
    }
    let e_sizes = if ds.egens.is_empty() {
        None
    } else {
        let split = orbit_split(&e_words(&ds)?, &u)?;
        Some(split.iter().map(|o| o.len()).collect::<Vec<_>>())
    };

    let json_report = json!({
        "version": REPORT_VERSION,
        "command": "orbits",
        "ok": true,
        "dataset": name,
        "n": ds.n,
        "group_order": u.order(),
        "orbits": rows
            .iter()
            .map(|(rep, size, stab)| {
                json!({"representative": rep, "size": size, "stabilizer_order": stab})
            })
            .collect::<Vec<_>>(),
        "e_orbit_sizes": e_sizes,
    });
    let mut human = String::new();
    human.push_str(&format!("dataset           {name}\n"));
    human.push_str(&format!("n                 {}\n", ds.n));
    human.push_str(&format!("group order       {}\n", u.order()));
    human.push_str("orbits            rep        size  stabilizer\n");
    for (rep, size, stab) in &rows {
        human.push_str(&format!("                  {rep:<9} {size:>5}  {stab:>10}\n"));
    }
    if let Some(sizes) = &e_sizes {
        let rendered: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
        human.push_str(&format!("E orbit sizes     {}\n", rendered.join(" ")));
    }
    out.emit(json_report, &human);
    Ok(())
}
