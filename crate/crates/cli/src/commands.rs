use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Duration;

use num_rational::BigRational;
use serde_json::{json, Value};
use ufg_core::bench::{
    davidson_fit_sample, dispersion, edge_persistence, parse_orientations, rank_shift,
    ranked_posets, sum_statistics, PerformanceTable, PersistenceMode,
};
use ufg_core::depth::{decimal_string, depth_map, triviality_check, DepthMap, DepthScope};
use ufg_core::extremal::{
    solve_extremal, write_lp, Direction, ExtremalError, ExtremalOptions, ExtremalSolution,
};
use ufg_core::poset::io::hasse_string;
use ufg_core::poset::io::write_poset;
use ufg_core::poset::{enumerate_posets, transitive_reduction, ItemUniverse, Poset};
use ufg_core::ufg::{
    enumerate_ufg_family_with, rational_string, FamilyOptions, PosetSample, UfgFamily,
};

use crate::output::{metadata, read, write, write_json, Failure};
use crate::{
    AnalyzeArgs, CompareArgs, DavidsonArgs, DirectionArg, EnumerateArgs, ExtremalArgs, FamilyArgs,
    IngestArgs, TableArgs,
};

const PLACES: usize = 6;

fn load_table(args: &TableArgs) -> Result<PerformanceTable, Failure> {
    let orientations = parse_orientations(&read(&args.orientations)?)?;
    let file = File::open(&args.input)
        .map_err(|e| Failure::data(format!("{}: {e}", args.input.display())))?;
    Ok(PerformanceTable::from_csv(
        BufReader::new(file),
        &orientations,
    )?)
}

fn load_sample(path: &Path) -> Result<PosetSample, Failure> {
    Ok(PosetSample::parse(&read(path)?)?)
}

fn table_config(args: &TableArgs) -> Value {
    json!({
        "input": args.input.display().to_string(),
        "orientations": args.orientations.display().to_string(),
        "epsilon": args.epsilon,
    })
}

fn family_config(args: &FamilyArgs) -> Value {
    json!({ "enum_limit": args.enum_limit, "cap": args.cap, "timeout_secs": args.timeout_secs })
}

fn timeout(args: &FamilyArgs) -> Option<Duration> {
    Some(Duration::from_secs(args.timeout_secs))
}

/// Loads `family-<hash>.jsonl` from `dir` when it belongs to this sample,
/// otherwise enumerates and stores it.
fn family_for(
    sample: &PosetSample,
    dir: Option<&Path>,
    cap: Option<usize>,
    fault: bool,
) -> Result<(UfgFamily, bool), Failure> {
    let opts = FamilyOptions {
        cap_override: cap,
        assume_downward_closed: fault,
        ..FamilyOptions::default()
    };
    let hash = sample.content_hash();
    let name = match cap {
        Some(c) => format!("family-{hash}-cap{c}.jsonl"),
        None => format!("family-{hash}.jsonl"),
    };
    let path = dir.filter(|_| !fault).map(|d| d.join(&name));
    if let Some(path) = &path {
        if let Ok(file) = File::open(path) {
            if let Ok(family) = UfgFamily::read_jsonl(BufReader::new(file)) {
                if family.sample_hash == hash {
                    return Ok((family, true));
                }
            }
        }
    }
    let family = enumerate_ufg_family_with(sample, opts);
    if let Some(path) = &path {
        std::fs::create_dir_all(path.parent().expect("joined path has a parent"))?;
        family.write_jsonl(sample, BufWriter::new(File::create(path)?))?;
    }
    Ok((family, false))
}

fn family_summary(family: &UfgFamily, cached: bool) -> Value {
    json!({
        "sets": family.len(),
        "max_set_size": family.max_set_size(),
        "cap": family.cap,
        "vc_obs": family.vc_obs,
        "total_weight": rational_string(&family.total_weight),
        "cached": cached,
    })
}

fn sample_summary(sample: &PosetSample) -> Value {
    json!({
        "items": sample.universe().labels(),
        "n": sample.n(),
        "unique": sample.unique().len(),
        "hash": sample.content_hash(),
    })
}

fn depth_value(d: &BigRational) -> Value {
    json!({ "rational": rational_string(d), "decimal": decimal_string(d, PLACES) })
}

/// Hasse data for plotting: reduction edges and a layer per item.
fn hasse_json(universe: &ItemUniverse, p: &Poset) -> Value {
    let layers = p.layers();
    json!({
        "edges": transitive_reduction(p).pairs().map(|(a, b)| [universe.label(a), universe.label(b)]).collect::<Vec<_>>(),
        "layers": universe.labels().iter().zip(&layers).map(|(l, k)| json!({ "item": l, "layer": k })).collect::<Vec<_>>(),
    })
}

pub fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let mut table = load_table(&args.table)?;
    if let Some(names) = &args.measures {
        table = table.select_measures(names)?;
    }
    let sample = table.to_sample(args.table.epsilon)?;
    write(&args.out_dir, "sample.txt", &sample.to_text())?;
    write(
        &args.out_dir,
        "sum_statistics.csv",
        &sum_statistics(&sample).to_csv(sample.universe()),
    )?;
    let config = json!({ "table": table_config(&args.table), "measures": table.measures });
    let mut report = metadata("ingest", config);
    report["sample"] = sample_summary(&sample);
    report["datasets"] = json!(table.datasets.len());
    report["duplicates"] = json!(sample.n() as usize - sample.unique().len());
    write_json(&args.out_dir, "ingest.json", &report)?;
    println!("{} of {} posets unique", sample.unique().len(), sample.n());
    Ok(())
}

fn persistence_csv(
    map: &DepthMap,
    sample: &PosetSample,
    modes: &[PersistenceMode],
) -> Result<String, Failure> {
    let mut out = String::from("from,to,k,mode,relation,ambiguous\n");
    let u = sample.universe();
    for &mode in modes {
        let ranked = ranked_posets(map, mode, sample)?;
        for row in edge_persistence(&ranked, u, false)? {
            let (from, to) = (u.label(row.from), u.label(row.to));
            let _ = writeln!(
                out,
                "{from},{to},{},{},edge,{}",
                row.k_edge,
                mode.name(),
                row.edge_ambiguous
            );
            let _ = writeln!(
                out,
                "{from},{to},{},{},no-edge,{}",
                row.k_nonedge,
                mode.name(),
                row.nonedge_ambiguous
            );
        }
    }
    Ok(out)
}

fn ranked_csv(universe: &ItemUniverse, sol: &ExtremalSolution) -> String {
    let mut out = String::from("rank,tr_edges,depth_rational,depth_decimal,proof_sets\n");
    for (i, r) in sol.ranked.iter().enumerate() {
        let proof: Vec<String> = r.proof.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            hasse_string(universe, &r.poset),
            rational_string(&r.depth),
            decimal_string(&r.depth, PLACES),
            proof.join(" ")
        );
    }
    out
}

fn ranked_json(universe: &ItemUniverse, sol: &ExtremalSolution) -> Value {
    json!({
        "direction": sol.direction,
        "nodes": sol.nodes,
        "ranked": sol.ranked.iter().map(|r| json!({
            "hasse": hasse_json(universe, &r.poset),
            "depth": depth_value(&r.depth),
            "proof_sets": r.proof,
        })).collect::<Vec<_>>(),
    })
}

pub fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    if let Some(a) = args.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Failure::data(format!("alpha {a} is outside [0, 1]")));
    }
    let sample = load_sample(&args.input)?;
    let (family, cached) = family_for(
        &sample,
        Some(&args.out_dir),
        args.family.cap,
        args.inject_fault,
    )?;
    let u = sample.universe();
    let trivial = triviality_check(&sample) || family.is_empty();
    let config = json!({
        "input": args.input.display().to_string(),
        "family": family_config(&args.family),
        "k": args.k,
        "alpha": args.alpha,
    });
    let mut report = metadata("analyze", config);
    report["sample"] = sample_summary(&sample);
    report["family"] = family_summary(&family, cached);
    report["trivial"] = json!(trivial);

    let observed_map;
    if sample.m() <= args.family.enum_limit {
        let map = depth_map(
            &sample,
            &family,
            DepthScope::AllPosets {
                limit: args.family.enum_limit,
            },
        )?;
        write(&args.out_dir, "depth.csv", &map.to_csv(u, PLACES))?;
        let top_depth = map.max().expect("at least one poset").1.clone();
        let deepest: Vec<Value> = map
            .entries
            .iter()
            .filter(|(_, d)| *d == top_depth)
            .map(|(p, _)| hasse_json(u, p))
            .collect();
        report["deepest"] = json!({ "depth": depth_value(&top_depth), "posets": deepest });
        report["shallowest"] = depth_value(&map.min().expect("nonempty").1);
        let observed: Vec<BigRational> = sample
            .observations()
            .map(|p| map.get(p).expect("observed").clone())
            .collect();
        let mut disp = String::from("alpha,proportion_rational,proportion_decimal\n");
        let mut rows = Vec::new();
        for &a in &args.alpha {
            let share = dispersion(&map, &observed, a);
            let _ = writeln!(
                disp,
                "{a},{},{}",
                rational_string(&share),
                decimal_string(&share, PLACES)
            );
            rows.push(json!({ "alpha": a, "proportion": depth_value(&share) }));
        }
        write(&args.out_dir, "dispersion.csv", &disp)?;
        report["dispersion"] = json!(rows);
        let persistence = persistence_csv(
            &map,
            &sample,
            &[PersistenceMode::Observed, PersistenceMode::AllPosets],
        )?;
        write(&args.out_dir, "persistence.csv", &persistence)?;
        println!(
            "deepest depth {} over {} posets",
            decimal_string(&top_depth, PLACES),
            map.len()
        );
        observed_map = depth_map(&sample, &family, DepthScope::Observed)?;
    } else {
        // Too many posets to list: report both ends by branch and bound.
        let mut ends = serde_json::Map::new();
        for (name, direction) in [("max", Direction::Max), ("min", Direction::Min)] {
            let opts = ExtremalOptions {
                direction,
                k: args.k,
                timeout: timeout(&args.family),
            };
            let sol = solve_extremal(&sample, &family, &opts)?;
            write(
                &args.out_dir,
                &format!("extremal-{name}.csv"),
                &ranked_csv(u, &sol),
            )?;
            ends.insert(name.into(), ranked_json(u, &sol));
        }
        report["extremal"] = Value::Object(ends);
        observed_map = depth_map(&sample, &family, DepthScope::Observed)?;
        let persistence = persistence_csv(&observed_map, &sample, &[PersistenceMode::Observed])?;
        write(&args.out_dir, "persistence.csv", &persistence)?;
        println!(
            "universe of {} items exceeds --enum-limit; wrote the {} deepest and shallowest",
            sample.m(),
            args.k
        );
    }
    write(
        &args.out_dir,
        "observed_depth.csv",
        &observed_map.to_csv(u, PLACES),
    )?;
    write_json(&args.out_dir, "report.json", &report)?;
    println!(
        "{} family sets{}",
        family.len(),
        if trivial {
            "; depth is zero everywhere"
        } else {
            ""
        }
    );
    Ok(())
}

fn all_posets_map(
    sample: &PosetSample,
    args: &FamilyArgs,
    dir: &Path,
) -> Result<DepthMap, Failure> {
    if sample.m() > args.enum_limit {
        return Err(Failure::data(format!(
            "compare needs all posets; {} items exceed --enum-limit",
            sample.m()
        )));
    }
    let (family, _) = family_for(sample, Some(dir), args.cap, false)?;
    Ok(depth_map(
        sample,
        &family,
        DepthScope::AllPosets {
            limit: args.enum_limit,
        },
    )?)
}

pub fn compare(args: CompareArgs) -> Result<(), Failure> {
    let table = load_table(&args.table)?;
    let second = args
        .against
        .clone()
        .unwrap_or_else(|| table.measures.clone());
    let a = table
        .select_measures(&args.measures)?
        .to_sample(args.table.epsilon)?;
    let b = table
        .select_measures(&second)?
        .to_sample(args.table.epsilon)?;
    let map_a = all_posets_map(&a, &args.family, &args.out_dir)?;
    let map_b = all_posets_map(&b, &args.family, &args.out_dir)?;
    let shift = rank_shift(&map_a, &map_b)?;
    let u = a.universe();
    let mut csv = String::from("poset_id,tr_edges,depth_a,depth_b,rank_a,rank_b,shift\n");
    for (id, (p, ra, rb)) in shift.per_poset.iter().enumerate() {
        let (da, db) = (
            map_a.get(p).expect("same scope"),
            map_b.get(p).expect("same scope"),
        );
        let _ = writeln!(
            csv,
            "{id},{},{},{},{ra},{rb},{}",
            hasse_string(u, p),
            rational_string(da),
            rational_string(db),
            ra.abs_diff(*rb)
        );
    }
    write(&args.out_dir, "rank_shift.csv", &csv)?;
    let config = json!({
        "table": table_config(&args.table),
        "measures": args.measures,
        "against": second,
        "family": family_config(&args.family),
    });
    let mut report = metadata("compare", config);
    report["first"] = sample_summary(&a);
    report["second"] = sample_summary(&b);
    report["max_shift"] = json!(shift.max_shift);
    report["median_shift"] = json!(shift.median_shift);
    report["ties"] = json!(shift.ties);
    write_json(&args.out_dir, "compare.json", &report)?;
    println!(
        "max rank shift {}, median {}",
        shift.max_shift, shift.median_shift
    );
    Ok(())
}

pub fn davidson(args: DavidsonArgs) -> Result<(), Failure> {
    let sample = load_sample(&args.input)?;
    let model = davidson_fit_sample(&sample)?;
    let k = sample.m();
    let labels = sample.universe().labels();
    let win: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 0.0 } else { model.prob(i, j).0 })
                .collect()
        })
        .collect();
    let tie: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 0.0 } else { model.prob(i, j).1 })
                .collect()
        })
        .collect();
    let mut report = metadata(
        "davidson",
        json!({ "input": args.input.display().to_string() }),
    );
    report["items"] = json!(labels);
    report["worths"] = json!(model.worths);
    report["theta"] = json!(model.theta);
    report["iterations"] = json!(model.iterations);
    report["gradient_norm"] = json!(model.gradient_norm);
    report["win_probability"] = json!(win);
    report["tie_probability"] = json!(tie);
    write_json(&args.out_dir, "davidson.json", &report)?;
    for (l, w) in labels.iter().zip(&model.worths) {
        println!("{l}\t{w:.6}");
    }
    println!("theta\t{:.6}", model.theta);
    Ok(())
}

pub fn enumerate(args: EnumerateArgs) -> Result<(), Failure> {
    if args.m == 0 {
        return Err(Failure::data("--m must be at least 1"));
    }
    let posets = enumerate_posets(args.m, args.enum_limit)?;
    if let Some(dir) = &args.out_dir {
        let u = ItemUniverse::numbered(args.m);
        let text: Vec<String> = posets.iter().map(|p| write_poset(&u, p, None)).collect();
        write(dir, &format!("posets-{}.txt", args.m), &text.join("\n"))?;
    }
    println!("{}", posets.len());
    Ok(())
}

pub fn extremal(args: ExtremalArgs) -> Result<(), Failure> {
    let sample = load_sample(&args.input)?;
    let (family, cached) = family_for(&sample, Some(&args.out_dir), args.family.cap, false)?;
    let (direction, name) = match args.direction {
        DirectionArg::Max => (Direction::Max, "max"),
        DirectionArg::Min => (Direction::Min, "min"),
    };
    if args.lp {
        write(
            &args.out_dir,
            &format!("program-{name}.lp"),
            &write_lp(&sample, &family, direction)?,
        )?;
    }
    let opts = ExtremalOptions {
        direction,
        k: args.k.max(1),
        timeout: timeout(&args.family),
    };
    let config = json!({
        "input": args.input.display().to_string(),
        "direction": name,
        "k": args.k,
        "family": family_config(&args.family),
    });
    let mut report = metadata("extremal", config);
    report["sample"] = sample_summary(&sample);
    report["family"] = family_summary(&family, cached);
    let u = sample.universe();
    let (sol, failure) = match solve_extremal(&sample, &family, &opts) {
        Ok(sol) => (sol, None),
        Err(ExtremalError::Timeout { incumbent, gap }) => {
            report["gap"] = depth_value(&gap);
            let msg = format!(
                "search timed out; incumbent is within {} of the optimum",
                decimal_string(&gap, PLACES)
            );
            (
                incumbent,
                Some(Failure {
                    code: crate::output::EXIT_TIMEOUT,
                    message: msg,
                }),
            )
        }
        Err(e) => return Err(e.into()),
    };
    report["complete"] = json!(failure.is_none());
    report["solution"] = ranked_json(u, &sol);
    write(
        &args.out_dir,
        &format!("extremal-{name}.csv"),
        &ranked_csv(u, &sol),
    )?;
    write_json(&args.out_dir, &format!("extremal-{name}.json"), &report)?;
    for r in &sol.ranked {
        println!(
            "{}\t{}",
            decimal_string(&r.depth, PLACES),
            hasse_string(u, &r.poset)
        );
    }
    failure.map_or(Ok(()), Err)
}
