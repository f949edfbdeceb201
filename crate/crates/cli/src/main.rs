// SPDX-License-Identifier: Apache-2.0

//! `simll` command-line front end.

mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use simll::attacks::{
    cp_attack, random_guess, saam_attack, wl_distinguishability, AttackResult, WlVerdict,
};
use simll::formats::{
    parse_guess_file, parse_key_file, parse_lock_report, write_guess_file, write_key_file,
    write_lock_report,
};
use simll::graph::CircuitGraph;
use simll::locking::{
    dmux_lock, naive_mux_lock, simll_lock, LockOptions, Provenance, S3Placement, Strategy,
};
use simll::metrics::{equivalence_check, evaluate, Verdict, DEFAULT_PATTERNS, DEFAULT_X_SEEDS};
use simll::netlist::{key_index, parse_bench, write_bench, MuxStyle, Netlist};
use simll::similarity::{
    cluster_stats, link_clusters, node_clusters, ClusterSet, PartitionStats, DEFAULT_HOPS,
};

use manifest::{sha256_hex, Manifest};

#[derive(Parser, Debug)]
#[command(name = "simll", version, about = "Similarity-driven MUX logic locking")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for simulation; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Insert key-controlled MUXes into a netlist.
    Lock(LockArgs),
    /// List node and link clusters.
    Clusters(ClustersArgs),
    /// Run an oracle-less attack on a locked netlist.
    Attack(AttackArgs),
    /// Score a key guess: AC, PC, FC and HD.
    Eval(EvalArgs),
    /// Check that a locked netlist under a key matches the original.
    Verify(VerifyArgs),
    /// Rerun the command recorded in a manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Simll,
    Dmux,
    Naive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum S3Arg {
    /// MUX on a fan-out of the multi-output source.
    Fanout,
    /// MUX on the single-output source's consumer (may float).
    Consumer,
}

#[derive(Args, Debug)]
struct LockArgs {
    /// Original netlist (.bench).
    #[arg(long = "in")]
    input: PathBuf,
    /// Key size in bits.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    keys: u64,
    /// Refinement depth for clustering.
    #[arg(long, default_value_t = DEFAULT_HOPS)]
    hops: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Simll)]
    scheme: SchemeArg,
    /// Comma-separated subset of S1,S2,S3,S4.
    #[arg(long, default_value = "S1,S2,S3,S4")]
    strategies: String,
    #[arg(long, value_enum, default_value_t = S3Arg::Fanout)]
    s3_placement: S3Arg,
    /// Write MUXes as NOT/AND/OR gates.
    #[arg(long)]
    decomposed: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ClustersArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_HOPS)]
    hops: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Saam,
    Cp,
    Wl,
    Random,
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Locked netlist.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Decision margin for `cp`.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    /// Lock report with the ground truth; required by `wl`.
    #[arg(long)]
    lockreport: Option<PathBuf>,
    /// Refinement depth for `wl`.
    #[arg(long, default_value_t = DEFAULT_HOPS)]
    hops: usize,
    /// Guess (or WL report) file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    oracle: PathBuf,
    #[arg(long)]
    locked: PathBuf,
    /// Correct key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    guess: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PATTERNS as u64)]
    patterns: u64,
    /// Number of random fills for undecided bits.
    #[arg(long, default_value_t = DEFAULT_X_SEEDS as u64)]
    xseeds: u64,
    /// Human-readable table instead of key=value lines.
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    oracle: PathBuf,
    #[arg(long)]
    locked: PathBuf,
    #[arg(long)]
    key: PathBuf,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Where the rerun writes its outputs.
    #[arg(long)]
    out: PathBuf,
}

/// Verdict of a command that is not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Fail,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli, &args[1..]) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, args: &[String]) -> Result<Status> {
    match &cli.command {
        Command::Lock(a) => cmd_lock(a, cli.seed, args),
        Command::Clusters(a) => cmd_clusters(a, cli.seed, args),
        Command::Attack(a) => cmd_attack(a, cli.seed, args),
        Command::Eval(a) => cmd_eval(a, cli.seed, args),
        Command::Verify(a) => cmd_verify(a, cli.seed),
        Command::Replay(a) => cmd_replay(a),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Lock(_) => "lock",
        Command::Clusters(_) => "clusters",
        Command::Attack(_) => "attack",
        Command::Eval(_) => "eval",
        Command::Verify(_) => "verify",
        Command::Replay(_) => "replay",
    }
}

fn read_netlist(m: &mut Manifest, path: &Path) -> Result<Netlist> {
    let text = m.read_input(path)?;
    parse_bench(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Write a single-file result, or print it when there is no path. A file
/// gets a `<file>.manifest` next to it.
fn emit(out: Option<&Path>, contents: &str, m: &mut Manifest) -> Result<()> {
    match out {
        Some(p) => {
            write(p, contents)?;
            let name = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            m.record_output(&name, contents);
            write(&sidecar(p), &m.render())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_os_string();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Put key inputs in key-number order so key vectors line up with them.
fn order_keys(n: &mut Netlist) -> Result<()> {
    let mut idx = Vec::with_capacity(n.key_inputs.len());
    for k in &n.key_inputs {
        idx.push((
            key_index(k).ok_or_else(|| anyhow!("{k} is not a key input name"))?,
            k.clone(),
        ));
    }
    idx.sort();
    for (want, (got, name)) in idx.iter().enumerate() {
        if want != *got {
            bail!("key inputs are not numbered densely: missing keyinput{want} before {name}");
        }
    }
    n.key_inputs = idx.into_iter().map(|(_, k)| k).collect();
    Ok(())
}

fn cmd_lock(a: &LockArgs, seed: u64, args: &[String]) -> Result<Status> {
    let mut m = Manifest::new("lock", args, seed);
    let n = read_netlist(&mut m, &a.input)?;
    let strategies = Strategy::parse_list(&a.strategies)?;
    let k = a.keys as usize;
    let scheme = match a.scheme {
        SchemeArg::Simll => "simll",
        SchemeArg::Dmux => "dmux",
        SchemeArg::Naive => "naive",
    };
    m.param("scheme", scheme);
    m.param("keys", k);
    m.param("hops", a.hops);
    m.param("strategies", &a.strategies);
    m.param(
        "s3_placement",
        format!("{:?}", a.s3_placement).to_lowercase(),
    );
    m.param("decomposed", a.decomposed);

    let mut opts = LockOptions::new(k, seed)
        .hops(a.hops)
        .strategies(&strategies);
    opts.s3_placement = match a.s3_placement {
        S3Arg::Fanout => S3Placement::MultiOutputFanout,
        S3Arg::Consumer => S3Placement::SingleOutputConsumer,
    };
    let d = match a.scheme {
        SchemeArg::Simll => simll_lock(&n, &opts),
        SchemeArg::Dmux => dmux_lock(&n, &opts),
        SchemeArg::Naive => naive_mux_lock(&n, k, seed),
    }
    .with_context(|| format!("locking {}", a.input.display()))?;

    let style = if a.decomposed {
        MuxStyle::Decomposed
    } else {
        MuxStyle::Primitive
    };
    let files = [
        ("locked.bench", write_bench(&d.netlist, style)),
        ("key.txt", write_key_file(&d.key.bits)),
        ("lockreport.txt", write_lock_report(&d.records)),
    ];
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (name, contents) in &files {
        write(&a.out.join(name), contents)?;
        m.record_output(name, contents);
    }
    write(&a.out.join("manifest.txt"), &m.render())?;

    let count = |p: Provenance| d.records.iter().filter(|r| r.provenance == p).count();
    println!(
        "scheme={scheme}\nkeys={k}\nmuxes={}\nlink_cluster={}\nnode_cluster={}\nrandom={}\nseed={seed}",
        d.records.len(),
        count(Provenance::LinkCluster),
        count(Provenance::NodeCluster),
        count(Provenance::Random),
    );
    Ok(Status::Ok)
}

fn stats_lines(out: &mut String, what: &str, s: &PartitionStats) {
    let hist: Vec<String> = s
        .histogram
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    writeln!(out, "{what}_clusters={}", s.clusters).unwrap();
    writeln!(out, "{what}_elements={}", s.elements).unwrap();
    writeln!(out, "{what}_shared={:.6}", s.shared_fraction).unwrap();
    writeln!(out, "{what}_histogram={}", hist.join(",")).unwrap();
}

fn listing(out: &mut String, what: &str, set: &ClusterSet, name: impl Fn(usize) -> String) {
    for (i, c) in set.clusters.iter().enumerate() {
        let members: Vec<String> = c.members.iter().map(|&x| name(x)).collect();
        writeln!(
            out,
            "{what} id={i} size={} fp={} members={}",
            c.len(),
            c.fingerprint.digest(),
            members.join(",")
        )
        .unwrap();
    }
}

fn cmd_clusters(a: &ClustersArgs, seed: u64, args: &[String]) -> Result<Status> {
    let mut m = Manifest::new("clusters", args, seed);
    m.param("hops", a.hops);
    let n = read_netlist(&mut m, &a.input)?;
    let g = CircuitGraph::from_netlist(&n);
    let nc = node_clusters(&g, a.hops);
    let lc = link_clusters(&g, a.hops);
    let stats = cluster_stats(&nc, &lc);

    let mut s = format!("# clusters {} hops={} seed={seed}\n", n.name, a.hops);
    stats_lines(&mut s, "node", &stats.nodes);
    stats_lines(&mut s, "link", &stats.links);
    listing(&mut s, "node", &nc, |v| g.name(v).to_string());
    let links = g.links();
    listing(&mut s, "link", &lc, |i| {
        let l = links[i];
        format!("{}->{}:{}", g.name(l.src), g.name(l.dst), l.pin)
    });
    emit(a.out.as_deref(), &s, &mut m)?;
    Ok(Status::Ok)
}

fn cmd_attack(a: &AttackArgs, seed: u64, args: &[String]) -> Result<Status> {
    let mut m = Manifest::new("attack", args, seed);
    let method = format!("{:?}", a.method).to_lowercase();
    m.param("method", &method);
    let mut locked = read_netlist(&mut m, &a.input)?;
    order_keys(&mut locked)?;

    if a.method == Method::Wl {
        let path = a
            .lockreport
            .as_ref()
            .context("the wl method needs --lockreport with the ground truth")?;
        m.param("hops", a.hops);
        let records = parse_lock_report(&m.read_input(path)?)
            .with_context(|| format!("parsing {}", path.display()))?;
        let r = wl_distinguishability(&locked, &records, a.hops)?;
        let mut s = format!("# wl hops={} seed={seed}\n", r.hops);
        writeln!(s, "rate={:.6}", r.rate).unwrap();
        writeln!(s, "indistinguishable={}", r.indistinguishable()).unwrap();
        writeln!(s, "total={}", r.verdicts.len()).unwrap();
        for v in &r.verdicts {
            let verdict = match v.verdict {
                WlVerdict::Indistinguishable => "indistinguishable",
                WlVerdict::Distinguishable => "distinguishable",
            };
            writeln!(s, "mux={} key={} verdict={verdict}", v.mux, v.key_index).unwrap();
        }
        emit(a.out.as_deref(), &s, &mut m)?;
        return Ok(Status::Ok);
    }

    let r: AttackResult = match a.method {
        Method::Saam => saam_attack(&locked)?,
        Method::Cp => {
            m.param("margin", a.margin);
            cp_attack(&locked, a.margin)?
        }
        Method::Random => random_guess(&locked, seed)?,
        Method::Wl => unreachable!(),
    };
    let mut s = format!("# attack={} seed={seed}", r.attack);
    for (k, v) in &r.params {
        write!(s, " {k}={v}").unwrap();
    }
    s.push('\n');
    s += &write_guess_file(&r.guess);
    emit(a.out.as_deref(), &s, &mut m)?;
    eprintln!(
        "{}: {} of {} bits decided",
        r.attack,
        r.guess.len() - r.guess.undecided(),
        r.guess.len()
    );
    Ok(Status::Ok)
}

fn cmd_eval(a: &EvalArgs, seed: u64, args: &[String]) -> Result<Status> {
    let mut m = Manifest::new("eval", args, seed);
    let oracle = read_netlist(&mut m, &a.oracle)?;
    let mut locked = read_netlist(&mut m, &a.locked)?;
    order_keys(&mut locked)?;
    let truth = parse_key_file(&m.read_input(&a.key)?)
        .with_context(|| format!("parsing {}", a.key.display()))?;
    let guess = parse_guess_file(&m.read_input(&a.guess)?)
        .with_context(|| format!("parsing {}", a.guess.display()))?;
    if truth.len() != locked.key_inputs.len() {
        bail!(
            "key file has {} bits, locked netlist has {} key inputs",
            truth.len(),
            locked.key_inputs.len()
        );
    }
    let x_seeds: Vec<u64> = (1..=a.xseeds).map(|i| seed.wrapping_add(i)).collect();
    m.param("patterns", a.patterns);
    m.param("xseeds", a.xseeds);
    let r = evaluate(&oracle, &locked, &truth, &guess, a.patterns, seed, &x_seeds)?;
    let s = if a.pretty { r.to_table() } else { r.to_kv() };
    emit(a.out.as_deref(), &s, &mut m)?;
    Ok(Status::Ok)
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> Result<Status> {
    let mut m = Manifest::default();
    let oracle = read_netlist(&mut m, &a.oracle)?;
    let mut locked = read_netlist(&mut m, &a.locked)?;
    order_keys(&mut locked)?;
    let key = parse_key_file(&m.read_input(&a.key)?)
        .with_context(|| format!("parsing {}", a.key.display()))?;
    match equivalence_check(&oracle, &locked, &key, seed)? {
        Verdict::Equivalent {
            patterns,
            exhaustive,
        } => {
            println!("verdict=PASS\npatterns={patterns}\nexhaustive={exhaustive}\nseed={seed}");
            Ok(Status::Ok)
        }
        Verdict::Counterexample {
            pattern,
            expected,
            got,
        } => {
            println!(
                "verdict=FAIL\npattern={}\nexpected={}\ngot={}\nseed={seed}",
                bits(&pattern),
                bits(&expected),
                bits(&got)
            );
            Ok(Status::Fail)
        }
    }
}

/// Recorded arguments with the output location swapped for `out`.
fn redirect(args: &[String], out: &Path) -> Result<Vec<String>> {
    let out = out.to_string_lossy().into_owned();
    let mut res = Vec::with_capacity(args.len() + 1);
    let mut found = false;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next().context("recorded --out has no value")?;
            res.extend(["--out".to_string(), out.clone()]);
            found = true;
        } else if a.starts_with("--out=") {
            res.push(format!("--out={out}"));
            found = true;
        } else {
            res.push(a.clone());
        }
    }
    if !found {
        bail!("recorded command wrote no files");
    }
    Ok(res)
}

fn cmd_replay(a: &ReplayArgs) -> Result<Status> {
    let text = fs::read_to_string(&a.manifest)
        .with_context(|| format!("reading {}", a.manifest.display()))?;
    let rec = Manifest::parse(&text)?;
    for (digest, path) in &rec.inputs {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        if &sha256_hex(&bytes) != digest {
            bail!("input {} changed since the recorded run", path.display());
        }
    }
    let args = redirect(&rec.args, &a.out)?;
    let cli =
        Cli::try_parse_from(std::iter::once("simll".to_string()).chain(args.iter().cloned()))?;
    if command_name(&cli.command) != rec.command || matches!(cli.command, Command::Replay(_)) {
        bail!("manifest command {} cannot be replayed", rec.command);
    }
    run(&cli, &args)?;

    let mut status = Status::Ok;
    for (digest, name) in &rec.outputs {
        let path = if rec.command == "lock" {
            a.out.join(name)
        } else {
            a.out.clone()
        };
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let same = &sha256_hex(&bytes) == digest;
        println!("{name}={}", if same { "MATCH" } else { "DIFFER" });
        if !same {
            status = Status::Fail;
        }
    }
    Ok(status)
}
