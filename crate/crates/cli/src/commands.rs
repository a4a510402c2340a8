use crate::args::{Exp1Args, Exp2Args, OddsConvertArgs, PairArgs, RegionsArgs, ScoreArgs};
use crate::manifest::{manifest_path_for, RunManifest};
use forecast_scoring::fixtures::builtin_pair;
use forecast_scoring::neighborhood::{pairing_preview, run_exp2, Exp2Config};
use forecast_scoring::odds::{load_candidates, synthesize_candidates, CandidateSet, OddsSchema};
use forecast_scoring::preference::{region_scan, ForecastPair};
use forecast_scoring::repeat::{selection_probability_exact, selection_probability_mc, Exp1Config};
use forecast_scoring::seeding::substream;
use forecast_scoring::{Error as CoreError, ForecastVector, OutcomeIndex, ScoringRule};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

/// CLI failure, split by exit code: usage and input problems exit 2,
/// runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

fn runtime(msg: impl ToString) -> CliError {
    CliError::Runtime(msg.to_string())
}

/// Input-shaped core errors exit 2; failures of the run itself exit 1.
fn from_core(e: CoreError) -> CliError {
    match e {
        CoreError::Io(_) | CoreError::PairingInfeasible { .. } => runtime(e),
        _ => usage(e),
    }
}

fn parse_probs(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{part:?} is not a probability")))
        })
        .collect()
}

fn parse_forecast(s: &str) -> Result<ForecastVector, CliError> {
    ForecastVector::new(parse_probs(s)?).map_err(from_core)
}

fn parse_outcome(s: &str, categories: usize) -> Result<OutcomeIndex, CliError> {
    let index = match s.to_ascii_lowercase().as_str() {
        "h" | "home" => 0,
        "d" | "draw" => 1,
        "a" | "away" => 2,
        other => other
            .parse::<usize>()
            .map_err(|_| usage(format!("unknown outcome {s:?}")))?,
    };
    if index >= categories {
        return Err(usage(format!(
            "outcome {s:?} is out of range for {categories} categories"
        )));
    }
    Ok(OutcomeIndex::new(index))
}

fn parse_rule(s: &str) -> Result<ScoringRule, CliError> {
    s.parse().map_err(from_core)
}

/// Grid forms: "12", "1:50", "2:1024:pow2", "1,2,5,10".
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = |msg: &str| usage(format!("bad n grid {s:?}: {msg}"));
    let parse_one = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| bad("entries must be positive integers"))
    };
    let parse_range = |lo: &str, hi: &str| -> Result<(usize, usize), CliError> {
        let lo = parse_one(lo)?;
        let hi = parse_one(hi)?;
        if lo == 0 || hi < lo {
            return Err(bad("need 1 <= lo <= hi"));
        }
        Ok((lo, hi))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid: Vec<usize> = match parts.as_slice() {
        [list] if list.contains(',') => {
            list.split(',').map(parse_one).collect::<Result<_, _>>()?
        }
        [one] => vec![parse_one(one)?],
        [lo, hi] => {
            let (lo, hi) = parse_range(lo, hi)?;
            (lo..=hi).collect()
        }
        [lo, hi, "pow2"] => {
            let (lo, hi) = parse_range(lo, hi)?;
            let mut grid = Vec::new();
            let mut n = lo;
            while n <= hi {
                grid.push(n);
                match n.checked_mul(2) {
                    Some(next) => n = next,
                    None => break,
                }
            }
            grid
        }
        [_, _, step] => return Err(bad(&format!("unknown step {step:?}"))),
        _ => return Err(bad("too many ':' separators")),
    };
    if grid.is_empty() || grid[0] == 0 {
        return Err(bad("grid is empty or starts at zero"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("grid must be strictly increasing"));
    }
    Ok(grid)
}

pub fn parse_deltas(s: &str) -> Result<Vec<f64>, CliError> {
    let deltas: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{p:?} is not a delta")))
        })
        .collect::<Result<_, _>>()?;
    for &d in &deltas {
        if !(d > 0.0 && d < 1.0) {
            return Err(usage(format!("delta {d} outside (0, 1)")));
        }
    }
    if deltas.is_empty() {
        return Err(usage("no deltas given"));
    }
    Ok(deltas)
}

/// Flags to echo into a run manifest, as (name, value).
type ManifestFlags = Vec<(&'static str, String)>;

/// Resolve --pair or --alpha/--beta into a pair, and remember which
/// flags to record for reruns.
fn resolve_pair(args: &PairArgs) -> Result<(ForecastPair, ManifestFlags), CliError> {
    match (&args.pair, &args.alpha, &args.beta) {
        (Some(label), None, None) => {
            let pair = builtin_pair(label)
                .ok_or_else(|| usage(format!("unknown pair {label:?}; try match1 .. match5")))?;
            Ok((pair, vec![("pair", label.clone())]))
        }
        (None, Some(a), Some(b)) => {
            let alpha = parse_forecast(a)?;
            let beta = parse_forecast(b)?;
            let pair = ForecastPair::new(alpha, beta, "custom").map_err(from_core)?;
            Ok((pair, vec![("alpha", a.clone()), ("beta", b.clone())]))
        }
        _ => Err(usage("give either --pair or both --alpha and --beta")),
    }
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
        }
    }
    let file = fs::File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn wio(path: &Path, e: std::io::Error) -> CliError {
    runtime(format!("{}: {e}", path.display()))
}

pub fn cmd_score(args: &ScoreArgs) -> Result<(), CliError> {
    let forecast = parse_forecast(&args.forecast)?;
    let outcome = parse_outcome(&args.outcome, forecast.categories())?;
    let rules: Vec<ScoringRule> = match &args.rule {
        Some(r) => vec![parse_rule(r)?],
        None => ScoringRule::ALL.to_vec(),
    };
    for rule in rules {
        let score = rule.score(&forecast, outcome).map_err(from_core)?;
        println!("{} {:.6}", rule.name(), score.value());
    }
    Ok(())
}

pub fn cmd_regions(args: &RegionsArgs) -> Result<(), CliError> {
    let (pair, pair_flags) = resolve_pair(&args.pair)?;
    let samples = region_scan(&pair, args.samples, args.seed).map_err(from_core)?;

    let mut w = create_file(&args.out)?;
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "truth_h,truth_d,truth_a,pref_ign,pref_rps,pref_brier,color")?;
        for s in &samples {
            let p = s.truth.probs();
            let color = s.color.map(|c| c.name()).unwrap_or("tie");
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                p[0],
                p[1],
                p[2],
                s.triple.ignorance.symbol(),
                s.triple.rps.symbol(),
                s.triple.brier.symbol(),
                color
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| wio(&args.out, e))?;

    let mut m = RunManifest::new("regions");
    for (k, v) in &pair_flags {
        m.flag(k, v);
    }
    m.flag("samples", args.samples);
    m.flag("seed", args.seed);
    m.flag("out", args.out.display());
    m.output("regions", &args.out);
    let mpath = manifest_path_for(&args.out);
    m.write(&mpath).map_err(|e| wio(&mpath, e))?;
    println!(
        "regions: wrote {} samples for pair {} to {}",
        samples.len(),
        pair.label(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_exp1(args: &Exp1Args) -> Result<(), CliError> {
    let (pair, pair_flags) = resolve_pair(&args.pair)?;
    let n_grid = parse_n_grid(&args.n)?;

    // Rows as (n, rule, p, stderr); mode distinguishes the two engines.
    let mut rows: Vec<(usize, ScoringRule, f64, f64)> = Vec::new();
    let mode = if args.exact { "exact" } else { "mc" };
    if args.exact {
        for &n in &n_grid {
            let p = selection_probability_exact(&pair, n, args.mixing_prob).map_err(from_core)?;
            for rule in ScoringRule::ALL {
                rows.push((n, rule, *p.get(rule), 0.0));
            }
        }
    } else {
        let cfg = Exp1Config {
            pair: pair.clone(),
            n_grid: n_grid.clone(),
            replicates: args.replicates,
            master_seed: args.seed,
            mixing_prob: args.mixing_prob,
        };
        let curves = selection_probability_mc(&cfg).map_err(from_core)?;
        for i in 0..n_grid.len() {
            for rule in ScoringRule::ALL {
                let pt = curves.get(rule).points[i];
                rows.push((pt.n, rule, pt.p_perfect, pt.std_err));
            }
        }
    }

    let mut w = create_file(&args.out)?;
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "n,rule,p_perfect,stderr,mode")?;
        for (n, rule, p, se) in &rows {
            writeln!(w, "{},{},{},{},{}", n, rule.name(), p, se, mode)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| wio(&args.out, e))?;

    let mut m = RunManifest::new("exp1");
    for (k, v) in &pair_flags {
        m.flag(k, v);
    }
    m.flag("n", &args.n);
    m.flag("replicates", args.replicates);
    m.flag("mixing-prob", args.mixing_prob);
    m.flag("seed", args.seed);
    m.flag("out", args.out.display());
    m.switch("exact", args.exact);
    m.output("curves", &args.out);
    let mpath = manifest_path_for(&args.out);
    m.write(&mpath).map_err(|e| wio(&mpath, e))?;
    println!(
        "exp1 ({mode}): pair {}, {} grid points, wrote {}",
        pair.label(),
        n_grid.len(),
        args.out.display()
    );
    Ok(())
}

const SYNTH_TAG: u64 = 0x53_594E; // "SYN"
const PREVIEW_TAG: u64 = 0x50_5256; // "PRV"

fn schema_from(league: &Option<String>, season: &Option<String>) -> OddsSchema {
    OddsSchema {
        league_filter: league.clone(),
        season: season.clone().unwrap_or_default(),
        ..OddsSchema::default()
    }
}

fn load_pool(args: &Exp2Args) -> Result<(CandidateSet, ManifestFlags), CliError> {
    match (&args.data, args.synthetic) {
        (Some(path), None) => {
            let schema = schema_from(&args.league, &args.season);
            let loaded = load_candidates(path, &schema).map_err(from_core)?;
            println!(
                "pool: {} forecasts from {} ({} rows, {} skipped, {} filtered out)",
                loaded.candidates.len(),
                path.display(),
                loaded.rows_read,
                loaded.skipped,
                loaded.filtered_out
            );
            for d in &loaded.diagnostics {
                eprintln!("  skipped {d}");
            }
            let mut flags = vec![("data", path.display().to_string())];
            if let Some(l) = &args.league {
                flags.push(("league", l.clone()));
            }
            if let Some(s) = &args.season {
                flags.push(("season", s.clone()));
            }
            Ok((loaded.candidates, flags))
        }
        (None, Some(count)) => {
            let mut rng = substream(args.seed, &[SYNTH_TAG]);
            let pool = synthesize_candidates(count, &mut rng);
            println!("pool: {count} synthetic forecasts");
            Ok((pool, vec![("synthetic", count.to_string())]))
        }
        _ => Err(usage("give either --data or --synthetic")),
    }
}

pub fn cmd_exp2(args: &Exp2Args) -> Result<(), CliError> {
    let (candidates, source_flags) = load_pool(args)?;
    let deltas = parse_deltas(&args.delta)?;
    let n_grid = parse_n_grid(&args.n)?;

    fs::create_dir_all(&args.out_dir).map_err(|e| wio(&args.out_dir, e))?;
    let prop_path = args.out_dir.join("proportions.csv");
    let diff_path = args.out_dir.join("differences.csv");
    let mut prop_w = create_file(&prop_path)?;
    let mut diff_w = create_file(&diff_path)?;
    writeln!(prop_w, "delta,n,rule,proportion").map_err(|e| wio(&prop_path, e))?;
    writeln!(diff_w, "delta,n,comparison,point,lo95,hi95").map_err(|e| wio(&diff_path, e))?;

    let mut m = RunManifest::new("exp2");
    for (k, v) in &source_flags {
        m.flag(k, v);
    }
    m.flag("delta", &args.delta);
    m.flag("n", &args.n);
    m.flag("trials", args.trials);
    m.flag("resamples", args.resamples);
    m.flag("preview", args.preview);
    m.flag("seed", args.seed);
    m.flag("out-dir", args.out_dir.display());
    m.output("proportions", &prop_path);
    m.output("differences", &diff_path);

    for &delta in &deltas {
        let cfg = Exp2Config {
            candidates: &candidates,
            delta,
            n_grid: n_grid.clone(),
            trials: args.trials,
            bootstrap_resamples: args.resamples,
            master_seed: args.seed,
        };
        let result = run_exp2(&cfg).map_err(from_core)?;
        for p in &result.proportions {
            writeln!(prop_w, "{},{},{},{}", delta, p.n, p.rule.name(), p.proportion)
                .map_err(|e| wio(&prop_path, e))?;
        }
        for d in &result.differences {
            writeln!(
                diff_w,
                "{},{},{},{},{},{}",
                delta,
                d.n,
                d.comparison.name(),
                d.point,
                d.lo95,
                d.hi95
            )
            .map_err(|e| wio(&diff_path, e))?;
        }
        if args.preview > 0 {
            let mut rng = substream(args.seed, &[PREVIEW_TAG, delta.to_bits()]);
            let pairs =
                pairing_preview(&candidates, delta, args.preview, &mut rng).map_err(from_core)?;
            let preview_path = args.out_dir.join(format!("preview_{delta}.csv"));
            let mut w = create_file(&preview_path)?;
            let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
                writeln!(w, "p_h_perfect,p_d_perfect,p_h_imperfect,p_d_imperfect,epsilon")?;
                for p in &pairs {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        p.perfect.probs()[0],
                        p.perfect.probs()[1],
                        p.imperfect.probs()[0],
                        p.imperfect.probs()[1],
                        p.epsilon
                    )?;
                }
                w.flush()
            };
            write(&mut w).map_err(|e| wio(&preview_path, e))?;
            m.output(&format!("preview.{delta}"), &preview_path);
        }
        println!("exp2: delta {delta} done ({} grid points)", n_grid.len());
    }
    prop_w.flush().map_err(|e| wio(&prop_path, e))?;
    diff_w.flush().map_err(|e| wio(&diff_path, e))?;

    let mpath = args.out_dir.join("manifest.txt");
    m.write(&mpath).map_err(|e| wio(&mpath, e))?;
    println!("exp2: wrote {}", args.out_dir.display());
    Ok(())
}

pub fn cmd_odds_convert(args: &OddsConvertArgs) -> Result<(), CliError> {
    let schema = schema_from(&args.league, &args.season);
    let loaded = load_candidates(&args.data, &schema).map_err(from_core)?;

    let mut w = create_file(&args.out)?;
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "match_id,p_h,p_d,p_a")?;
        for c in loaded.candidates.members() {
            let p = c.forecast.probs();
            writeln!(w, "{},{},{},{}", c.id, p[0], p[1], p[2])?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| wio(&args.out, e))?;

    let mut m = RunManifest::new("odds-convert");
    m.flag("data", args.data.display());
    if let Some(l) = &args.league {
        m.flag("league", l);
    }
    if let Some(s) = &args.season {
        m.flag("season", s);
    }
    m.flag("out", args.out.display());
    m.output("forecasts", &args.out);
    m.note("rows_read", loaded.rows_read);
    m.note("skipped", loaded.skipped);
    m.note("filtered_out", loaded.filtered_out);
    let mpath = manifest_path_for(&args.out);
    m.write(&mpath).map_err(|e| wio(&mpath, e))?;

    println!(
        "odds-convert: {} forecasts from {} rows ({} skipped, {} filtered out) -> {}",
        loaded.candidates.len(),
        loaded.rows_read,
        loaded.skipped,
        loaded.filtered_out,
        args.out.display()
    );
    for d in &loaded.diagnostics {
        eprintln!("  skipped {d}");
    }
    Ok(())
}
