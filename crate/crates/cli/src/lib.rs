//! Command line front end for brgk-core: every library operation as a
//! subcommand with deterministic text or JSON output.
//!
//! `run` takes the argument vector (without the program name) and returns the
//! exit code plus the full output stream, so the whole surface is testable
//! in-process.  Exit codes: 0 success, 1 domain error, 2 parse/usage error,
//! 3 exhausted budget (factor budget, degree cap, split-point cap, precision
//! cap).

use brgk_core::descent::{self, CurveAB, CurvePoint, MwRefineData};
use brgk_core::laurent::{self, LaurentClass};
use brgk_core::qx::{self, ClassQx};
use brgk_core::{brq, Config, Error, OutputMode, PlaceQ, Result};
use clap::{Arg, ArgAction, ArgMatches, ColorChoice, Command};
use num_bigint::{BigInt, BigUint};

pub fn run(argv: &[String]) -> (i32, String) {
    let mut full = Vec::with_capacity(argv.len() + 1);
    full.push("brgk".to_string());
    full.extend(argv.iter().cloned());
    let matches = match cli().try_get_matches_from(&full) {
        Ok(m) => m,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for everything else
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            return (code, finish(e.render().to_string()));
        }
    };
    let cfg = match load_config(&matches) {
        Ok(cfg) => cfg,
        Err(e) => return fail(e),
    };
    match dispatch(&matches, &cfg) {
        Ok(out) => (0, out),
        Err(e) => fail(e),
    }
}

fn fail(e: Error) -> (i32, String) {
    let code = if e.is_budget() {
        3
    } else if matches!(e, Error::Parse(_)) {
        2
    } else {
        1
    };
    (code, format!("error: {e}\n"))
}

fn finish(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn render(cfg: &Config, text: String, json: serde_json::Value) -> String {
    match cfg.output {
        OutputMode::Text => finish(text),
        OutputMode::Json => json_out(json),
    }
}

fn json_out(v: serde_json::Value) -> String {
    finish(serde_json::to_string_pretty(&v).expect("report serializes"))
}

fn load_config(m: &ArgMatches) -> Result<Config> {
    let mut cfg = match m.get_one::<String>("config") {
        Some(path) => Config::from_file(path)?,
        None => Config::from_env()?,
    };
    if let Some(mode) = m.get_one::<String>("output") {
        cfg.output = match mode.as_str() {
            "json" => OutputMode::Json,
            _ => OutputMode::Text,
        };
    }
    Ok(cfg)
}

fn cli() -> Command {
    let entry = |name: &'static str, short: char, value: &'static str, help: &'static str| {
        Arg::new(name)
            .short(short)
            .required(true)
            .allow_hyphen_values(true)
            .value_name(value)
            .help(help)
    };
    let expr = |name: &'static str, help: &'static str| {
        Arg::new(name).required(true).value_name("EXPR").help(help)
    };
    let height = Arg::new("n")
        .short('n')
        .required(true)
        .value_name("HEIGHT")
        .help("tower height of the class");

    Command::new("brgk")
        .about("exact 2-torsion Brauer classes: quaternion algebras over Q, Q(x), and Laurent towers")
        .color(ColorChoice::Never)
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("config file (key = value lines); overrides BRGK_CONFIG"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .short('o')
                .global(true)
                .value_name("MODE")
                .value_parser(["text", "json"])
                .help("output mode; overrides the config file"),
        )
        .subcommand(
            Command::new("hilbert")
                .about("Hilbert symbol (a, b)_v; without -v, the profile at all candidate places")
                .arg(entry("a", 'a', "A", "first entry (nonzero rational)"))
                .arg(entry("b", 'b', "B", "second entry (nonzero rational)"))
                .arg(
                    Arg::new("v")
                        .short('v')
                        .value_name("PLACE")
                        .help("place of Q: a prime or \"inf\""),
                ),
        )
        .subcommand(
            Command::new("ram")
                .about("ramification set of the quaternion symbol (a, b)")
                .arg(entry("a", 'a', "A", "first entry (nonzero rational)"))
                .arg(entry("b", 'b', "B", "second entry (nonzero rational)")),
        )
        .subcommand(
            Command::new("equiv-q")
                .about("decide equivalence of two classes over Q given as symbol lists")
                .arg(expr("one", "first class, e.g. \"[(-1, -1); (2, 3)]\""))
                .arg(expr("two", "second class")),
        )
        .subcommand(
            Command::new("qx")
                .about("classes over the rational function field Q(x)")
                .subcommand_required(true)
                .subcommand(
                    Command::new("residues")
                        .about("residues at all ramified places")
                        .arg(expr("expr", "class, e.g. \"[(x, x+1); (2, x^2-2)]\"")),
                )
                .subcommand(
                    Command::new("faddeev")
                        .about("constant part and one-point-ramified parts")
                        .arg(expr("expr", "class over Q(x)")),
                )
                .subcommand(
                    Command::new("equiv")
                        .about("decide equivalence of two classes over Q(x)")
                        .arg(expr("one", "first class"))
                        .arg(expr("two", "second class")),
                )
                .subcommand(
                    Command::new("genus")
                        .about("genus of a class over Q(x), with certificate")
                        .arg(expr("expr", "class over Q(x)")),
                )
                .subcommand(
                    Command::new("split-point")
                        .about("rational specialization point where the class splits locally at p")
                        .arg(expr("expr", "class over Q(x)"))
                        .arg(entry("p", 'p', "P", "prime of Q")),
                ),
        )
        .subcommand(
            Command::new("laurent")
                .about("classes over iterated Laurent series towers Q((t1))...((tn))")
                .subcommand_required(true)
                .subcommand(
                    Command::new("genus")
                        .about("genus bound with a tower-descent chain")
                        .arg(expr("expr", "class, e.g. \"[(2*t1, t2)]\""))
                        .arg(height.clone()),
                )
                .subcommand(
                    Command::new("normalize")
                        .about("inertial-times-ramified normal form at the top of the tower")
                        .arg(expr("expr", "class over the tower"))
                        .arg(height),
                ),
        )
        .subcommand(
            Command::new("descent")
                .about("2-descent on y^2 = x^3 + ax^2 + bx and genus bounds from Sha")
                .subcommand_required(true)
                .subcommand(
                    Command::new("selmer")
                        .about("phi- and phihat-Selmer groups with local certificates")
                        .arg(entry("a", 'a', "A", "coefficient a (integer)"))
                        .arg(entry("b", 'b', "B", "coefficient b (integer)")),
                )
                .subcommand(
                    Command::new("sha-bound")
                        .about("bound for the 2-torsion of Sha given the Mordell-Weil rank")
                        .arg(entry("a", 'a', "A", "coefficient a (integer)"))
                        .arg(entry("b", 'b', "B", "coefficient b (integer)"))
                        .arg(
                            Arg::new("rank")
                                .long("rank")
                                .required(true)
                                .value_name("R")
                                .help("Mordell-Weil rank of the curve"),
                        ),
                )
                .subcommand(
                    Command::new("refine")
                        .about("refine the genus of the quadratic twist class [D_target] over l = Q(sqrt(m))")
                        .arg(entry("a", 'a', "A", "coefficient a (integer)"))
                        .arg(entry("b", 'b', "B", "coefficient b (integer)"))
                        .arg(entry("m", 'm', "M", "twist: l = Q(sqrt(m))"))
                        .arg(
                            Arg::new("target")
                                .long("target")
                                .required(true)
                                .allow_hyphen_values(true)
                                .value_name("D")
                                .help("Selmer representative naming the class to refine"),
                        )
                        .arg(
                            Arg::new("rank")
                                .long("rank")
                                .value_name("R")
                                .help("asserted Mordell-Weil rank (enables the chase)"),
                        )
                        .arg(
                            Arg::new("same-points-over-l")
                                .long("same-points-over-l")
                                .action(ArgAction::SetTrue)
                                .requires("rank")
                                .help("assert that the dual curve gains no points over l"),
                        )
                        .arg(
                            Arg::new("gen-dual")
                                .long("gen-dual")
                                .action(ArgAction::Append)
                                .requires("rank")
                                .value_name("POINT")
                                .help("generator of the dual curve beyond (0, 0), e.g. \"(2, 4)\""),
                        )
                        .arg(
                            Arg::new("gen")
                                .long("gen")
                                .action(ArgAction::Append)
                                .requires("rank")
                                .value_name("POINT")
                                .help("generator of the curve beyond (0, 0)"),
                        ),
                ),
        )
}

fn dispatch(m: &ArgMatches, cfg: &Config) -> Result<String> {
    match m.subcommand() {
        Some(("hilbert", sm)) => cmd_hilbert(sm, cfg),
        Some(("ram", sm)) => cmd_ram(sm, cfg),
        Some(("equiv-q", sm)) => cmd_equiv_q(sm, cfg),
        Some(("qx", sm)) => match sm.subcommand() {
            Some(("residues", ssm)) => cmd_qx_residues(ssm, cfg),
            Some(("faddeev", ssm)) => cmd_qx_faddeev(ssm, cfg),
            Some(("equiv", ssm)) => cmd_qx_equiv(ssm, cfg),
            Some(("genus", ssm)) => cmd_qx_genus(ssm, cfg),
            Some(("split-point", ssm)) => cmd_qx_split_point(ssm, cfg),
            _ => unreachable!("subcommand_required"),
        },
        Some(("laurent", sm)) => match sm.subcommand() {
            Some(("genus", ssm)) => cmd_laurent_genus(ssm, cfg),
            Some(("normalize", ssm)) => cmd_laurent_normalize(ssm, cfg),
            _ => unreachable!("subcommand_required"),
        },
        Some(("descent", sm)) => match sm.subcommand() {
            Some(("selmer", ssm)) => cmd_descent_selmer(ssm, cfg),
            Some(("sha-bound", ssm)) => cmd_descent_sha_bound(ssm, cfg),
            Some(("refine", ssm)) => cmd_descent_refine(ssm, cfg),
            _ => unreachable!("subcommand_required"),
        },
        _ => unreachable!("subcommand_required"),
    }
}

fn arg<'a>(m: &'a ArgMatches, name: &str) -> &'a str {
    m.get_one::<String>(name).expect("required arg").as_str()
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?} for {what}")))
}

fn parse_u32(s: &str, what: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {s:?} for {what}")))
}

fn cmd_hilbert(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let a = brgk_core::arith::parse_rat(arg(m, "a"))?;
    let b = brgk_core::arith::parse_rat(arg(m, "b"))?;
    if let Some(vs) = m.get_one::<String>("v") {
        let v = PlaceQ::parse(vs)?;
        let val = brq::hilbert_symbol(&a, &b, &v)?;
        return Ok(render(
            cfg,
            val.to_string(),
            serde_json::json!({
                "a": a.to_string(),
                "b": b.to_string(),
                "place": v.to_string(),
                "value": val,
            }),
        ));
    }
    // no place given: report every place that could carry a nontrivial symbol
    let places = candidate_places(&a, &b, cfg.factor_budget)?;
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for v in &places {
        let val = brq::hilbert_symbol(&a, &b, v)?;
        lines.push(format!("{v}: {val}"));
        entries.push(serde_json::json!({ "place": v.to_string(), "value": val }));
    }
    Ok(render(
        cfg,
        lines.join("\n"),
        serde_json::json!({
            "a": a.to_string(),
            "b": b.to_string(),
            "symbols": entries,
        }),
    ))
}

/// inf, 2, and the primes dividing either entry: outside these the symbol
/// of an integral pair is +1, and denominators only shift entries by squares.
fn candidate_places(
    a: &brgk_core::Rat,
    b: &brgk_core::Rat,
    budget: u64,
) -> Result<Vec<PlaceQ>> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(PlaceQ::prime_u64(2));
    set.insert(PlaceQ::RealPlace);
    for q in [a, b] {
        for (p, _) in brgk_core::arith::factor(q, budget)?.factors {
            set.insert(PlaceQ::Prime(p));
        }
    }
    Ok(set.into_iter().collect())
}

fn cmd_ram(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let a = brgk_core::arith::parse_rat(arg(m, "a"))?;
    let b = brgk_core::arith::parse_rat(arg(m, "b"))?;
    let sym = brq::SymbolQ::new(a, b)?;
    let class = brq::ramification_set(&sym, cfg.factor_budget)?;
    Ok(render(
        cfg,
        class.to_string(),
        serde_json::json!({
            "symbol": sym.to_string(),
            "places": class.places().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        }),
    ))
}

fn cmd_equiv_q(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c1 = brq::class_of(&brq::parse_symbol_list(arg(m, "one"))?, cfg.factor_budget)?;
    let c2 = brq::class_of(&brq::parse_symbol_list(arg(m, "two"))?, cfg.factor_budget)?;
    let eq = brq::equivalent(&c1, &c2);
    Ok(render(
        cfg,
        if eq { "equivalent" } else { "inequivalent" }.to_string(),
        serde_json::json!({
            "equivalent": eq,
            "class1": c1.to_string(),
            "class2": c2.to_string(),
        }),
    ))
}

fn cmd_qx_residues(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = ClassQx::parse(arg(m, "expr"))?;
    let profile = qx::ramification_divisor(&c, cfg)?;
    Ok(render(cfg, profile.to_string(), profile.to_json()))
}

fn cmd_qx_faddeev(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = ClassQx::parse(arg(m, "expr"))?;
    let dec = qx::faddeev_decompose(&c, cfg)?;
    Ok(render(cfg, dec.to_string(), dec.to_json()))
}

fn cmd_qx_equiv(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c1 = ClassQx::parse(arg(m, "one"))?;
    let c2 = ClassQx::parse(arg(m, "two"))?;
    let eq = qx::equivalent_qx(&c1, &c2, cfg)?;
    Ok(render(
        cfg,
        if eq { "equivalent" } else { "inequivalent" }.to_string(),
        serde_json::json!({ "equivalent": eq }),
    ))
}

fn cmd_qx_genus(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = ClassQx::parse(arg(m, "expr"))?;
    let report = qx::genus_qx(&c, cfg)?;
    Ok(render(cfg, report.to_string(), report.to_json()))
}

fn cmd_qx_split_point(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = ClassQx::parse(arg(m, "expr"))?;
    let p: BigUint = arg(m, "p")
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad prime {:?}", arg(m, "p"))))?;
    let point = qx::find_split_point(&c, &p, cfg)?;
    Ok(render(
        cfg,
        point.to_string(),
        serde_json::json!({ "p": p.to_string(), "point": point.to_string() }),
    ))
}

/// Accept the class either with its own "@ height n" suffix (which must then
/// match -n) or bare, in which case -n supplies the height.
fn parse_laurent_class(expr: &str, n: usize) -> Result<LaurentClass> {
    let c = if expr.contains('@') {
        LaurentClass::parse(expr)?
    } else {
        LaurentClass::parse(&format!("{expr} @ height {n}"))?
    };
    if c.height() != n {
        return Err(Error::Parse(format!(
            "class has height {}, but -n {} was given",
            c.height(),
            n
        )));
    }
    Ok(c)
}

fn cmd_laurent_genus(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let n = parse_u32(arg(m, "n"), "-n")? as usize;
    let c = parse_laurent_class(arg(m, "expr"), n)?;
    let report = laurent::genus_laurent(&c, cfg)?;
    Ok(render(cfg, report.to_string(), report.to_json()))
}

fn cmd_laurent_normalize(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let n = parse_u32(arg(m, "n"), "-n")? as usize;
    let c = parse_laurent_class(arg(m, "expr"), n)?;
    let nf = laurent::normalize(&c)?;
    let text = format!(
        "inertial residue: {}\nnsr character: {}",
        nf.inertial_residue, nf.nsr_char
    );
    Ok(render(
        cfg,
        text,
        serde_json::json!({
            "height": n,
            "inertial_residue": nf.inertial_residue.to_string(),
            "nsr_char": nf.nsr_char.to_string(),
        }),
    ))
}

fn curve_of(m: &ArgMatches) -> Result<CurveAB> {
    CurveAB::new(
        parse_bigint(arg(m, "a"), "-a")?,
        parse_bigint(arg(m, "b"), "-b")?,
    )
}

// The descent reports are structured documents with certificates; they are
// emitted as JSON in both output modes.
fn cmd_descent_selmer(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = curve_of(m)?;
    let sp = descent::selmer_phi(&c, cfg)?;
    let sph = descent::selmer_phihat(&c, cfg)?;
    let s2 = if c.is_split() {
        Some(descent::selmer_two(&c, cfg)?)
    } else {
        None
    };
    Ok(json_out(serde_json::json!({
        "curve": { "a": c.a.to_string(), "b": c.b.to_string() },
        "S": sp.places.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "selmer_phi": sp.to_json(),
        "selmer_phihat": sph.to_json(),
        "selmer_two": s2.as_ref().map(|s| s.to_json()),
        "certificates": {
            "phi": sp.certificates_json(),
            "phihat": sph.certificates_json(),
            "two": s2.as_ref().map(|s| s.certificates_json()),
        },
    })))
}

fn cmd_descent_sha_bound(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = curve_of(m)?;
    let rank = parse_u32(arg(m, "rank"), "--rank")?;
    let report = descent::sha2_bound(&c, rank, cfg)?;
    Ok(json_out(report.to_json()))
}

fn cmd_descent_refine(m: &ArgMatches, cfg: &Config) -> Result<String> {
    let c = curve_of(m)?;
    let tw = parse_bigint(arg(m, "m"), "-m")?;
    let target = parse_bigint(arg(m, "target"), "--target")?;
    let mw = match m.get_one::<String>("rank") {
        Some(rs) => {
            let mut data = MwRefineData {
                rank: parse_u32(rs, "--rank")?,
                same_points_over_l: m.get_flag("same-points-over-l"),
                ..Default::default()
            };
            if let Some(pts) = m.get_many::<String>("gen-dual") {
                for p in pts {
                    data.gens_dual.push(CurvePoint::parse(p)?);
                }
            }
            if let Some(pts) = m.get_many::<String>("gen") {
                for p in pts {
                    data.gens.push(CurvePoint::parse(p)?);
                }
            }
            Some(data)
        }
        None => None,
    };
    let report = descent::genus_refine(&c, &tw, &target, mw.as_ref(), cfg)?;
    Ok(json_out(report.to_json()))
}
