//! `stoq`: command-line front end for the stoquasticity decision library.
//!
//! Exit codes on every subcommand: 0 for a positive decision, 1 for a
//! negative one, 2 for usage or input errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stoquastic::decomposer::cone_membership;
use stoquastic::io::{parse_hamiltonian, parse_rxc3, write_rxc3_hamiltonian, HamiltonianFile};
use stoquastic::oracle::{brute_force_clifford, SearchMode, DEFAULT_CAP};
use stoquastic::rxc3::{clifford_realness, hamiltonian_from_rxc3};
use stoquastic::two_qubit::{decide_stoquastic_2q, region_scan, write_csv, Axis, ScanGrid, SearchConfig};
use stoquastic::xyz::decide_xyz_with;
use stoquastic::{
    extract_edge_data, is_real_locally, triple_invariants, EdgeData, Execution, Pauli,
    Rotation3, SignedPermutation,
};

#[derive(Parser, Debug)]
#[command(name = "stoq", version, about = "Decide stoquasticity of 2-local qubit Hamiltonians")]
struct Cli {
    /// Run every parallel stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an XYZ Heisenberg Hamiltonian (XX, YY and ZZ couplings only).
    CheckXyz {
        file: PathBuf,
        /// Write the step trace as JSON.
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
    },
    /// Decide a general two-qubit Hamiltonian under local rotations.
    #[command(name = "check-2q")]
    Check2q { file: PathBuf },
    /// Try the termwise cone decomposition in the given basis.
    Decompose { file: PathBuf },
    /// Realness under local basis changes.
    Realness { file: PathBuf },
    /// Exhaustive search over single-qubit Clifford basis changes.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::ZMatrix)]
        mode: Mode,
        /// Largest qubit count searched.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Hamiltonian file for an exact-cover instance.
    GenRxc3 { file: PathBuf },
    /// Two-qubit feasibility scan over `aX`, `aZ` and `aXX`, as CSV.
    RegionScan {
        #[arg(long, value_parser = parse_axis, default_value = "0:2:20")]
        ax: Axis,
        #[arg(long, value_parser = parse_axis, default_value = "0:2:20")]
        az: Axis,
        #[arg(long, value_parser = parse_axis, default_value = "0:1:10")]
        axx: Axis,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    ZMatrix,
    Realness,
}

fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("expected lo:hi:steps, got `{text}`"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    let steps: usize = steps.parse().map_err(|_| format!("bad step count `{steps}`"))?;
    Axis::new(lo, hi, steps).map_err(|e| e.to_string())
}

/// A decision plus the report that explains it.
struct Report {
    positive: bool,
    text: String,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_hamiltonian(path: &Path) -> Result<HamiltonianFile, String> {
    parse_hamiltonian(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn fmt_signed(sp: &SignedPermutation) -> String {
    let perm = sp.permutation().one_based();
    let signs: Vec<&str> = sp.signs().iter().map(|&s| if s < 0 { "-" } else { "+" }).collect();
    format!("({},{},{}) [{}]  {sp}", perm[0], perm[1], perm[2], signs.join(""))
}

fn fmt_vec(v: &[f64]) -> String {
    // values that print as zero are shown without a sign
    let parts: Vec<String> = v
        .iter()
        .map(|&x| format!("{:.9}", if x.abs() < 5e-10 { 0.0 } else { x }))
        .collect();
    format!("({})", parts.join(", "))
}

fn fmt_rotation(r: &Rotation3) -> String {
    let m = r.matrix();
    let rows: Vec<String> = (0..3)
        .map(|i| fmt_vec(&[m[(i, 0)], m[(i, 1)], m[(i, 2)]]))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Nonzero coefficients of an edge term, e.g. `X@0X@1=-1 Z@0=0.5`.
fn fmt_edge(u: usize, v: usize, e: &EdgeData) -> String {
    let mut parts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let c = e.beta[(i, j)];
            if c != 0.0 {
                parts.push(format!("{}@{}{}@{}={c}", Pauli::from_index(i), u, Pauli::from_index(j), v));
            }
        }
    }
    for i in 0..3 {
        if e.s[i] != 0.0 {
            parts.push(format!("{}@{u}={}", Pauli::from_index(i), e.s[i]));
        }
        if e.p[i] != 0.0 {
            parts.push(format!("{}@{v}={}", Pauli::from_index(i), e.p[i]));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

fn check_xyz(file: &Path, trace: Option<&Path>, exec: Execution) -> Result<Report, String> {
    let parsed = load_hamiltonian(file)?;
    let d = decide_xyz_with(&parsed.hamiltonian, exec).map_err(|e| format!("{}: {e}", file.display()))?;
    let mut text = String::new();
    match &d.solution {
        Some(sol) if d.stoquastic => {
            text.push_str("STOQUASTIC\n");
            let _ = writeln!(text, "qubit  perm    signs  action");
            for (q, sp) in sol.iter().enumerate() {
                let _ = writeln!(text, "{q:<6} {}", fmt_signed(sp));
            }
        }
        _ => {
            text.push_str("NOT STOQUASTIC\n");
            let step = d.rejected_at.as_deref().unwrap_or("?");
            let detail = d
                .trace
                .iter()
                .rev()
                .find(|r| r.step_id == step)
                .map_or("", |r| r.detail.as_str());
            let _ = writeln!(text, "rejected at step {step}: {detail}");
        }
    }
    if let Some(out) = trace {
        let mut doc = serde_json::to_value(d.to_document()).map_err(|e| e.to_string())?;
        let terms: Vec<Value> = parsed
            .terms
            .iter()
            .map(|t| {
                let factors: Vec<String> = t.factors.iter().map(|(p, q)| format!("{p}@{q}")).collect();
                json!({ "line": t.line, "coeff": t.coeff_text, "factors": factors })
            })
            .collect();
        doc["input_terms"] = Value::Array(terms);
        let body = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
        fs::write(out, body + "\n").map_err(|e| format!("{}: {e}", out.display()))?;
    }
    Ok(Report {
        positive: d.stoquastic,
        text,
    })
}

fn two_qubit_edge(file: &Path) -> Result<EdgeData, String> {
    let parsed = load_hamiltonian(file)?;
    let n = parsed.hamiltonian.n_qubits();
    if n != 2 {
        return Err(format!("{}: expected 2 qubits, found {n}", file.display()));
    }
    extract_edge_data(&parsed.hamiltonian, 0, 1).map_err(|e| e.to_string())
}

fn write_invariants(text: &mut String, e: &EdgeData) {
    let inv = triple_invariants(e);
    let names = ["I10", "I11", "I15", "I16", "I17", "I18"];
    for (name, v) in names.iter().zip(inv.as_array()) {
        let _ = writeln!(text, "  {name} = {v:e}");
    }
}

fn check_2q(file: &Path) -> Result<Report, String> {
    let e = two_qubit_edge(file)?;
    let d = decide_stoquastic_2q(&e);
    let mut text = String::new();
    if !d.real {
        text.push_str("NOT REAL UNDER LOCAL ROTATIONS\n");
        write_invariants(&mut text, &e);
        text.push_str("NOT STOQUASTIC\n");
        let _ = writeln!(text, "{}", d.certificate_note);
        return Ok(Report { positive: false, text });
    }
    text.push_str("REAL UNDER LOCAL ROTATIONS\n");
    write_invariants(&mut text, &e);
    for (k, f) in d.forms.iter().enumerate() {
        let _ = writeln!(
            text,
            "standard form {k}: beta = diag{} S = {} P = {} scale = {:.9} special = {:?}",
            fmt_vec(f.beta_diag.as_slice()),
            fmt_vec(f.s_vec.as_slice()),
            fmt_vec(f.p_vec.as_slice()),
            f.normalization,
            f.special_case
        );
    }
    match &d.witness {
        Some(w) if d.stoquastic => {
            text.push_str("STOQUASTIC\n");
            let _ = writeln!(text, "case: {}", w.case);
            let _ = writeln!(text, "theta_L = {:.9}, theta_R = {:.9}", w.theta_l, w.theta_r);
            let _ = writeln!(text, "O1 = {}", fmt_rotation(&w.o1));
            let _ = writeln!(text, "O2 = {}", fmt_rotation(&w.o2));
        }
        _ => text.push_str("NOT STOQUASTIC\n"),
    }
    let _ = writeln!(text, "{}", d.certificate_note);
    Ok(Report {
        positive: d.stoquastic,
        text,
    })
}

fn decompose(file: &Path) -> Result<Report, String> {
    let parsed = load_hamiltonian(file)?;
    let mut text = String::new();
    match cone_membership(&parsed.hamiltonian) {
        Ok(dec) => {
            text.push_str("DECOMPOSED\n");
            for ((u, v), e) in &dec.terms {
                let _ = writeln!(text, "edge {u} {v}: {}", fmt_edge(*u, *v, e));
            }
            for (q, l) in &dec.leftovers {
                let _ = writeln!(text, "leftover {q}: X={} Z={}", l.x, l.z);
            }
            Ok(Report { positive: true, text })
        }
        Err(r) => {
            let _ = writeln!(text, "NOT DECOMPOSABLE\n{r}");
            Ok(Report { positive: false, text })
        }
    }
}

fn realness(file: &Path) -> Result<Report, String> {
    let parsed = load_hamiltonian(file)?;
    let h = &parsed.hamiltonian;
    let mut text = String::new();
    let real = if h.n_qubits() == 2 {
        let e = extract_edge_data(h, 0, 1).map_err(|e| e.to_string())?;
        let real = is_real_locally(&e);
        text.push_str("method: triple-product invariants\n");
        write_invariants(&mut text, &e);
        real
    } else {
        text.push_str("method: exhaustive single-qubit Clifford search\n");
        clifford_realness(h).map_err(|e| e.to_string())?
    };
    text.insert_str(
        0,
        if real {
            "REAL UNDER LOCAL ROTATIONS\n"
        } else {
            "NOT REAL UNDER LOCAL ROTATIONS\n"
        },
    );
    Ok(Report { positive: real, text })
}

fn oracle(file: &Path, mode: Mode, cap: usize, exec: Execution) -> Result<Report, String> {
    let parsed = load_hamiltonian(file)?;
    let search = match mode {
        Mode::ZMatrix => SearchMode::ZMatrix,
        Mode::Realness => SearchMode::Realness,
    };
    let found = brute_force_clifford(&parsed.hamiltonian, search, cap, exec).map_err(|e| e.to_string())?;
    let mut text = String::new();
    match &found {
        Some(sol) => {
            text.push_str("FOUND\n");
            let _ = writeln!(text, "qubit  perm    signs  action");
            for (q, sp) in sol.iter().enumerate() {
                let _ = writeln!(text, "{q:<6} {}", fmt_signed(sp));
            }
        }
        None => text.push_str("NONE\n"),
    }
    Ok(Report {
        positive: found.is_some(),
        text,
    })
}

fn gen_rxc3(file: &Path) -> Result<Report, String> {
    let inst = parse_rxc3(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
    let red = hamiltonian_from_rxc3(&inst).map_err(|e| e.to_string())?;
    let mut text = String::new();
    for line in red.render().lines() {
        let _ = writeln!(text, "# {line}");
    }
    text.push_str(&write_rxc3_hamiltonian(inst.n_elements(), &red.terms));
    Ok(Report { positive: true, text })
}

fn scan(grid: ScanGrid, out: Option<&Path>, exec: Execution) -> Result<Report, String> {
    let rows = region_scan(&grid, SearchConfig::default(), exec);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(buf).map_err(|e| e.to_string())?;
    let text = match out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| format!("{}: {e}", path.display()))?;
            let stoq = rows.iter().filter(|r| r.stoquastic).count();
            format!("{} rows, {stoq} stoquastic, written to {}\n", rows.len(), path.display())
        }
        None => csv,
    };
    Ok(Report { positive: true, text })
}

fn run(cli: Cli) -> Result<Report, String> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::CheckXyz { file, trace } => check_xyz(&file, trace.as_deref(), exec),
        Command::Check2q { file } => check_2q(&file),
        Command::Decompose { file } => decompose(&file),
        Command::Realness { file } => realness(&file),
        Command::Oracle { file, mode, cap } => oracle(&file, mode, cap, exec),
        Command::GenRxc3 { file } => gen_rxc3(&file),
        Command::RegionScan { ax, az, axx, out } => {
            scan(ScanGrid { a_x: ax, a_z: az, a_xx: axx }, out.as_deref(), exec)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(if report.positive { 0 } else { 1 })
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
