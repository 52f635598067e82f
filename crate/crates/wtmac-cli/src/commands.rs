//! Subcommand implementations.

use std::path::Path;

use serde_json::{json, Value};
use wtmac::casestudy::{
    bruteforce_search, concavity_scan, equal_input_witness, example62, revalidate, SearchBudget,
    SearchPredicate,
};
use wtmac::codesim::{
    build_wiretap_code, eve_analysis, mc_leakage, simulate, BuildConfig, ErrorMode, SimConfig,
    WiretapCode,
};
use wtmac::conferencing::{region_conferencing_profile, ConfRegion, ConferencingCapacities};
use wtmac::optimizer::{
    achievable_region_estimate, single_sender_secrecy_estimate, SearchConfig, SearchMode,
};
use wtmac::probkit::{Channel, FactoredInput, WiretapMAC};
use wtmac::regions::{
    alpha_range, classify_profile, info_profile, region_common_profile, verify_lemma_suite,
    CaseLabel, LemmaOptions, RatePolytope,
};

use crate::io::{cell, emit, load_channel, load_input, to_value, write_csv, CliError, CliResult};
use crate::{Cli, CodeArgs, Command, InputArgs, PredicateArg};

pub fn run(cli: &Cli) -> CliResult<()> {
    let seed = cli.seed;
    let result = match &cli.command {
        Command::Info(input) => info(input)?,
        Command::Classify { input, hc } => classify(input, *hc)?,
        Command::Region {
            input,
            hc,
            case,
            csv,
        } => region(input, *hc, *case, csv.as_deref())?,
        Command::ConfRegion {
            input,
            c1,
            c2,
            case,
            grid,
            csv,
        } => conf_region(input, *c1, *c2, *case, *grid, csv.as_deref())?,
        Command::Optimize {
            channel,
            hc,
            c1,
            c2,
            independent,
            no_prefixing,
            u_size,
            v1_size,
            v2_size,
            directions,
            restarts,
            refine_iters,
            alpha_grid,
            max_evaluations,
            single_sender,
            csv,
        } => {
            let mode = if c1.is_some() || c2.is_some() {
                SearchMode::Conferencing {
                    c1: c1.unwrap_or(0.0),
                    c2: c2.unwrap_or(0.0),
                }
            } else {
                SearchMode::Common {
                    hc: hc.unwrap_or(0.0),
                }
            };
            let cfg = SearchConfig {
                u_size: *u_size,
                v1_size: *v1_size,
                v2_size: *v2_size,
                independent_only: *independent,
                prefixing: !*no_prefixing,
                directions: *directions,
                restarts: *restarts,
                refine_iters: *refine_iters,
                alpha_grid: *alpha_grid,
                max_evaluations: *max_evaluations,
                seed,
                ..SearchConfig::default()
            };
            optimize(channel, mode, &cfg, *single_sender, csv.as_deref())?
        }
        Command::Simulate {
            code,
            trials,
            leakage_trials,
            codebook_csv,
        } => simulate_cmd(
            code,
            seed,
            *trials,
            *leakage_trials,
            codebook_csv.as_deref(),
        )?,
        Command::Leakage { code, trials } => leakage(code, seed, *trials)?,
        Command::VerifyLemmas {
            samples,
            points,
            alpha_step,
            tol,
        } => {
            let opts = LemmaOptions {
                samples: *points,
                alpha_step: *alpha_step,
                tol: *tol,
                seed,
            };
            let report = verify_lemma_suite(*samples, &opts)?;
            json!({ "passed": report.passed(), "options": to_value(&opts)?, "report": to_value(&report)? })
        }
        Command::Example61 { grid } => {
            let witness = equal_input_witness()?;
            let scan = concavity_scan(*grid)?;
            json!({ "witness": to_value(&witness)?, "concavity": to_value(&scan)?, "concave": scan.passed() })
        }
        Command::Example62 => to_value(&example62()?)?,
        Command::Search {
            predicate,
            samples,
            max_found,
            tol,
            grid,
            margin,
        } => {
            let pred = match predicate {
                PredicateArg::TimeSharing => SearchPredicate::NeedsTimeSharing { tol: *tol },
                PredicateArg::Conferencing => SearchPredicate::ConferencingHelps {
                    grid: *grid,
                    margin: *margin,
                },
                PredicateArg::Never => SearchPredicate::Never,
            };
            search(
                SearchBudget {
                    samples: *samples,
                    max_found: *max_found,
                    seed,
                },
                pred,
            )?
        }
    };
    emit(cli.command.name(), seed, result, cli.out.as_ref())
}

fn load(input: &InputArgs) -> CliResult<FactoredInput> {
    let mac = load_channel(&input.channel)?;
    load_input(&input.p, mac)
}

fn case_label(i: usize) -> CliResult<CaseLabel> {
    Ok(CaseLabel::from_index(i)?)
}

fn info(input: &InputArgs) -> CliResult<Value> {
    let p = load(input)?;
    let mac = p.mac();
    let (u, v1, v2) = p.aux_sizes();
    Ok(json!({
        "alphabets": { "x": mac.nx(), "y": mac.ny(), "t": mac.nt(), "z": mac.nz(), "u": u, "v1": v1, "v2": v2 },
        "profile": to_value(&info_profile(&p)?)?,
        "input": to_value(&p.to_json())?,
    }))
}

fn classify(input: &InputArgs, hc: f64) -> CliResult<Value> {
    let p = load(input)?;
    let prof = info_profile(&p)?;
    let cls = classify_profile(&prof, hc)?;
    let mut ranges = Vec::new();
    for &c in &cls.cases {
        ranges.push(
            json!({ "case": c.to_string(), "alpha": to_value(&alpha_range(&prof, hc, c)?)? }),
        );
    }
    Ok(json!({ "hc": hc, "classification": to_value(&cls)?, "alpha_ranges": ranges }))
}

fn region(input: &InputArgs, hc: f64, case: Option<usize>, csv: Option<&Path>) -> CliResult<Value> {
    let p = load(input)?;
    let prof = info_profile(&p)?;
    let cls = classify_profile(&prof, hc)?;
    let cases = match case {
        Some(i) => vec![case_label(i)?],
        None => cls.cases.clone(),
    };
    let mut regions = Vec::new();
    let mut rows = vec![header(3)];
    for c in cases {
        let poly = region_common_profile(&prof, hc, c)?;
        let vertices = poly.vertices();
        polytope_rows(&mut rows, &c.to_string(), &vertices, &poly, "");
        regions.push(json!({
            "case": c.to_string(),
            "alpha": to_value(&alpha_range(&prof, hc, c)?)?,
            "polytope": poly.to_json(),
            "vertices": vertices,
        }));
    }
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(json!({ "hc": hc, "classification": to_value(&cls)?, "regions": regions }))
}

fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["case".to_string(), "kind".into(), "index".into()];
    h.extend((0..dim).map(|i| format!("c{i}")));
    h.extend(["rhs".to_string(), "label".into()]);
    h
}

fn polytope_rows(
    rows: &mut Vec<Vec<String>>,
    case: &str,
    vertices: &[Vec<f64>],
    poly: &RatePolytope,
    prefix: &str,
) {
    for (i, v) in vertices.iter().enumerate() {
        let mut r = vec![case.to_string(), "vertex".into(), i.to_string()];
        r.extend(v.iter().map(|&x| cell(x)));
        r.extend([String::new(), String::new()]);
        rows.push(r);
    }
    for (i, c) in poly.constraints.iter().enumerate() {
        let mut r = vec![case.to_string(), "constraint".into(), i.to_string()];
        r.extend(c.coeffs.iter().map(|&x| cell(x)));
        r.extend([cell(c.rhs), format!("{prefix}{}", c.label)]);
        rows.push(r);
    }
}

fn conf_region(
    input: &InputArgs,
    c1: f64,
    c2: f64,
    case: Option<usize>,
    grid: usize,
    csv: Option<&Path>,
) -> CliResult<Value> {
    let p = load(input)?;
    let prof = info_profile(&p)?;
    let caps = ConferencingCapacities::new(c1, c2)?;
    let cases = match case {
        Some(i) => vec![case_label(i)?],
        None => classify_profile(&prof, caps.total())?
            .cases
            .into_iter()
            .filter(|&c| (c == CaseLabel::Case0) == (caps.total() == 0.0))
            .collect(),
    };
    let mut regions = Vec::new();
    let mut rows = vec![header(2)];
    for c in cases {
        let r = region_conferencing_profile(&prof, &caps, c, grid)?;
        let vertices = r.vertices();
        match &r {
            ConfRegion::Polytope(poly) => {
                polytope_rows(&mut rows, &c.to_string(), &vertices, poly, "")
            }
            ConfRegion::Union { alphas, parts, .. } => {
                polytope_rows(
                    &mut rows,
                    &c.to_string(),
                    &vertices,
                    &RatePolytope::new(2),
                    "",
                );
                for (a, poly) in alphas.iter().zip(parts) {
                    polytope_rows(
                        &mut rows,
                        &c.to_string(),
                        &[],
                        poly,
                        &format!("alpha={}:", cell(*a)),
                    );
                }
            }
        }
        let best = r.max_sum_rate();
        regions.push(json!({
            "case": c.to_string(),
            "region": to_value(&r)?,
            "vertices": vertices,
            "max_sum_rate": best.as_ref().map(|b| b.0),
            "max_sum_point": best.map(|b| b.1),
        }));
    }
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(json!({ "c1": c1, "c2": c2, "regions": regions }))
}

fn optimize(
    channel: &Path,
    mode: SearchMode,
    cfg: &SearchConfig,
    single_sender: bool,
    csv: Option<&Path>,
) -> CliResult<Value> {
    let w = load_channel(channel)?;
    let est = achievable_region_estimate(&w, mode, cfg)?;
    if let Some(path) = csv {
        let mut rows = vec![if mode.dim() == 3 {
            vec!["r0", "r1", "r2"]
        } else {
            vec!["r1", "r2"]
        }
        .into_iter()
        .chain(["case", "input_id", "direction"])
        .map(String::from)
        .collect::<Vec<_>>()];
        for pt in &est.points {
            let mut r: Vec<String> = pt.rates.iter().map(|&x| cell(x)).collect();
            r.extend([
                pt.case.to_string(),
                pt.input_id.to_string(),
                pt.direction.to_string(),
            ]);
            rows.push(r);
        }
        write_csv(path, &rows)?;
    }
    let single = if single_sender {
        Some(to_value(&single_sender_secrecy_estimate(&w, cfg)?)?)
    } else {
        None
    };
    Ok(json!({
        "config": to_value(cfg)?,
        "estimate": to_value(&est)?,
        "max_coordinate": est.max_coordinate(),
        "max_private_sum": est.max_private_sum(),
        "max_total_rate": est.max_total_rate(),
        "single_sender": single,
    }))
}

fn build(code: &CodeArgs, seed: u64) -> CliResult<WiretapCode> {
    let p = load(&code.input)?;
    let cfg = BuildConfig {
        n: code.n,
        n_prime: code.n_prime,
        delta: code.delta,
        slack: code.slack,
        seed,
    };
    let rates: [f64; 3] = code.rates.as_slice().try_into().map_err(|_| {
        CliError::Input(format!(
            "--rates needs three values R0,R1,R2, got {}",
            code.rates.len()
        ))
    })?;
    Ok(build_wiretap_code(
        &p,
        case_label(code.case)?,
        rates,
        code.hc,
        &cfg,
    )?)
}

fn simulate_cmd(
    args: &CodeArgs,
    seed: u64,
    trials: Option<usize>,
    leakage_trials: usize,
    codebook_csv: Option<&Path>,
) -> CliResult<Value> {
    let code = build(args, seed)?;
    if let Some(path) = codebook_csv {
        let mut rows = vec![["part", "kind", "g0", "g", "sequence"]
            .map(String::from)
            .to_vec()];
        for (i, part) in code.parts.iter().enumerate() {
            for line in part.family.to_csv().lines().skip(1) {
                let mut r = vec![i.to_string()];
                r.extend(line.split(',').map(String::from));
                rows.push(r);
            }
        }
        write_csv(path, &rows)?;
    }
    let mode = match trials {
        Some(t) => ErrorMode::MonteCarlo { trials: t, seed },
        None => ErrorMode::Exact,
    };
    let report = simulate(
        &code,
        &SimConfig {
            mode,
            leakage_trials,
        },
    )?;
    to_value(&report)
}

fn leakage(args: &CodeArgs, seed: u64, trials: Option<usize>) -> CliResult<Value> {
    let code = build(args, seed)?;
    let common = json!({
        "case": code.case.to_string(),
        "message_sizes": code.message_sizes(),
        "realized_rates": code.realized_rates(),
        "randomization_rates": code.randomization_rates(),
    });
    let we = code.eve();
    let body = match trials {
        None => json!({ "mode": "exact", "analysis": to_value(&eve_analysis(&code, &we)?)? }),
        Some(t) => {
            json!({ "mode": "monte_carlo", "estimate": to_value(&mc_leakage(&code, &we, t, seed)?)? })
        }
    };
    Ok(json!({ "code": common, "eve": body }))
}

fn search(budget: SearchBudget, pred: SearchPredicate) -> CliResult<Value> {
    let found = bruteforce_search(budget, pred)?;
    let mut out = Vec::new();
    for f in &found {
        let wb = Channel::from_arith(f.wb.clone())?;
        let we = Channel::from_arith(f.we.clone())?;
        let mac = WiretapMAC::from_marginals(2, 2, &wb, &we)?;
        out.push(json!({
            "index": f.index,
            "q": f.q,
            "r": f.r,
            "wb": f.wb,
            "we": f.we,
            "channel": to_value(&mac.to_json())?,
            "certificate": to_value(&f.certificate)?,
            "revalidated": revalidate(f, pred)?,
        }));
    }
    Ok(json!({ "budget": to_value(&budget)?, "predicate": to_value(&pred)?, "found": out }))
}
