//! `adhm` — command-line driver for the blown-up plane ADHM toolkit.
//!
//! Every subcommand reads exact-arithmetic JSON, prints a deterministic
//! JSON report on stdout, and exits with 0 when a verdict was computed
//! (whatever the verdict), 1 on malformed input, 2 on a resource-bound
//! abort.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use adhm_core::error::Error;
use adhm_core::field::{Field, FieldSpec, GaloisField, Rationals};
use adhm_core::filtration::{hn_filtration, jh_filtration};
use adhm_core::json as aj;
use adhm_core::kronecker::kronecker_decompose;
use adhm_core::monad::{
    enumerate_points, fiber_profile, framing_check, perverse_hom_profile, perversity_passes,
    scan_alpha, scan_beta, AlphaScan, BetaScan, SurfacePoint,
};
use adhm_core::plane::{c1zero_roundtrip, to_plane, DescentSide};
use adhm_core::rep::NewQuiverRep;
use adhm_core::stability::{
    candidate_walls, chamber_rep, classify_w0, criteria_semistable, point_to_triple,
    triple_to_point, zeta_semistable, BlowupPoint, ChernData, S2Mode, StabilityParam,
};
use adhm_core::sweep::{sweep, SweepAssertion};

#[derive(Parser)]
#[command(name = "adhm", about = "Exact quiver data on the blown-up plane", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here as well as to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InArg {
    /// Path to a representation JSON file.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct ZetaArg {
    /// Stability parameter "z0,z1" with exact rational entries.
    #[arg(long, allow_hyphen_values = true)]
    zeta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the moment-map residual of a representation.
    Mu(InArg),
    /// Decide zeta-(semi)stability from the definition.
    Stability {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        zeta: ZetaArg,
        /// Enumeration budget override for subspace scans.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Decide semistability through the Hom-vanishing criteria.
    Criteria {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        zeta: ZetaArg,
    },
    /// Harder-Narasimhan filtration.
    Hn {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        zeta: ZetaArg,
    },
    /// Jordan-Holder filtration of a semistable representation.
    Jh {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        zeta: ZetaArg,
    },
    /// Classify the stable locus with trivial framing at given dimensions.
    #[command(name = "classify-w0")]
    ClassifyW0 {
        /// Dimension pair "n0,n1".
        #[arg(long)]
        dims: String,
        #[command(flatten)]
        zeta: ZetaArg,
    },
    /// Kronecker canonical form of the pencil (B1, B2) of a representation.
    Kronecker(InArg),
    /// Candidate walls for given Chern data.
    Walls {
        #[arg(long)]
        r: u64,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// A certified parameter in the chamber below wall m.
    Chamber {
        #[arg(long)]
        m: u64,
        /// Explicit wall list "0,1,2"; derived from --r/--k/--n when absent.
        #[arg(long)]
        walls: Option<String>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
    },
    /// Scan surjectivity of the second monad map over extensions.
    #[command(name = "scan-beta")]
    ScanBeta {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        max_ext: Option<u32>,
    },
    /// Scan injectivity of the first monad map over extensions.
    #[command(name = "scan-alpha")]
    ScanAlpha {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        max_ext: Option<u32>,
    },
    /// Fiber dimension profile over all points of one extension.
    Fibers {
        #[command(flatten)]
        input: InArg,
        #[arg(long, default_value_t = 1)]
        ext: u32,
    },
    /// Verify the canonical framing along the line at infinity.
    Framing {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        ext: Option<u32>,
    },
    /// Hom-vanishing table against the C_m family.
    Perverse {
        #[command(flatten)]
        input: InArg,
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Descend blowup data to plane ADHM data.
    #[command(name = "to-plane")]
    ToPlane {
        #[command(flatten)]
        input: InArg,
        #[arg(long, value_parser = ["left", "right"], default_value = "left")]
        side: String,
    },
    /// Lift plane data with d = id and verify the descent round trip.
    #[command(name = "c1-roundtrip")]
    C1Roundtrip(InArg),
    /// Enumerate representations at given dimensions over a finite field.
    Enumerate {
        /// Dimensions "n0,n1,r".
        #[arg(long)]
        dims: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        flat_only: bool,
        /// Keep at most this many representations in the report.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// The dims-(1,1) correspondence with points of the blown-up plane.
    #[command(name = "blowup-point")]
    BlowupPoint {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        b1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Enumerate representations and check a named assertion set.
    Sweep {
        /// Dimensions "n0,n1,r" (use r = 0 for the W = 0 sweeps).
        #[arg(long)]
        dims: String,
        #[arg(long)]
        field: String,
        #[arg(long = "assert")]
        assertion: String,
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        #[arg(long)]
        budget: Option<u128>,
    },
}

fn parse_field_spec(s: &str) -> Result<FieldSpec, Error> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Rationals);
    }
    let rest = s
        .strip_prefix("GF")
        .or_else(|| s.strip_prefix("gf"))
        .ok_or_else(|| Error::MalformedInput(format!("bad field {s:?}; use Q or GF<p>[^k]")))?;
    let (p, k) = match rest.split_once('^') {
        Some((p, k)) => (p, k.parse::<u32>().map_err(|_| bad_num(s))?),
        None => (rest, 1),
    };
    let p = p.parse::<u64>().map_err(|_| bad_num(s))?;
    Ok(FieldSpec::FiniteField { p, k, modulus: None })
}

fn bad_num(s: &str) -> Error {
    Error::MalformedInput(format!("bad number in {s:?}"))
}

fn parse_zeta(s: &str) -> Result<StabilityParam, Error> {
    let q = Rationals;
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::MalformedInput(format!("zeta must be \"z0,z1\", got {s:?}")))?;
    Ok(StabilityParam::new(q.parse_elem(a)?, q.parse_elem(b)?))
}

fn parse_usize_list(s: &str, expect: usize) -> Result<Vec<usize>, Error> {
    let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    let parts = parts.map_err(|_| bad_num(s))?;
    if parts.len() != expect {
        return Err(Error::MalformedInput(format!("expected {expect} comma-separated values")));
    }
    Ok(parts)
}

fn read_rep_json(path: &PathBuf) -> Result<aj::RepJson, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedInput(format!("bad JSON: {e}")))
}

fn read_plane_json(path: &PathBuf) -> Result<aj::PlaneJson, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedInput(format!("bad JSON: {e}")))
}

/// Run a closure generically over the field named in a spec.
macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match &$spec {
            FieldSpec::Rationals => {
                let $f = Rationals;
                $body
            }
            spec @ FieldSpec::FiniteField { .. } => {
                let $f = GaloisField::from_spec(spec)?;
                $body
            }
        }
    };
}

fn alpha_failures_json<F: Field>(fails: &[(u32, Vec<SurfacePoint<F>>)]) -> Vec<serde_json::Value> {
    fails
        .iter()
        .map(|(deg, pts)| {
            json!({
                "degree": deg,
                "points": pts
                    .iter()
                    .map(|p| serde_json::to_value(aj::point_to_json(p)).unwrap())
                    .collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn run(cli: &Cli) -> Result<serde_json::Value, Error> {
    match &cli.command {
        Command::Mu(input) => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let residual = x.mu_residual();
                Ok(json!({
                    "residual": aj::mat_to_json(&residual),
                    "flat": residual.is_zero(),
                }))
            })
        }
        Command::Stability { input, zeta, budget } => {
            let rj = read_rep_json(&input.input)?;
            let zeta = parse_zeta(&zeta.zeta)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let v = zeta_semistable(&x, &zeta, true, *budget)?;
                Ok(serde_json::to_value(aj::verdict_to_json(&v)).unwrap())
            })
        }
        Command::Criteria { input, zeta } => {
            let rj = read_rep_json(&input.input)?;
            let zeta = parse_zeta(&zeta.zeta)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let v = criteria_semistable(&x, &zeta, S2Mode::CheckExhaustive)?;
                Ok(serde_json::to_value(aj::verdict_to_json(&v)).unwrap())
            })
        }
        Command::Hn { input, zeta } | Command::Jh { input, zeta } => {
            let jh = matches!(cli.command, Command::Jh { .. });
            let rj = read_rep_json(&input.input)?;
            let zeta = parse_zeta(&zeta.zeta)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let y = if x.r > 0 {
                    NewQuiverRep::framed(x)
                } else {
                    NewQuiverRep::unframed(x)?
                };
                let filt = if jh {
                    jh_filtration(&y, &zeta, None)?
                } else {
                    hn_filtration(&y, &zeta, None)?
                };
                Ok(serde_json::to_value(aj::filtration_to_json(&filt)).unwrap())
            })
        }
        Command::ClassifyW0 { dims, zeta } => {
            let d = parse_usize_list(dims, 2)?;
            let zeta = parse_zeta(&zeta.zeta)?;
            let class = classify_w0((d[0], d[1]), &zeta)?;
            Ok(json!({ "class": class.to_string() }))
        }
        Command::Kronecker(input) => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let dec = kronecker_decompose(&x.b1, &x.b2)?;
                let blocks: Vec<serde_json::Value> = dec
                    .blocks
                    .iter()
                    .map(|b| match b {
                        adhm_core::kronecker::KroneckerBlock::A { m } =>
                            json!({"kind": "a", "m": m}),
                        adhm_core::kronecker::KroneckerBlock::B { m } =>
                            json!({"kind": "b", "m": m}),
                        adhm_core::kronecker::KroneckerBlock::C { m } =>
                            json!({"kind": "c", "m": m}),
                        adhm_core::kronecker::KroneckerBlock::D { m, eigen } =>
                            json!({"kind": "d", "m": m, "eigen": f.elem_to_string(eigen)}),
                        adhm_core::kronecker::KroneckerBlock::DGeneralized { poly } => json!({
                            "kind": "d-generalized",
                            "poly": poly.iter().map(|c| f.elem_to_string(c)).collect::<Vec<_>>(),
                        }),
                    })
                    .collect();
                Ok(json!({
                    "blocks": blocks,
                    "P": aj::mat_to_json(&dec.p),
                    "Q": aj::mat_to_json(&dec.q),
                }))
            })
        }
        Command::Walls { r, k, n } => {
            let q = Rationals;
            let c = ChernData::new(*r, *k, q.parse_elem(n)?)?;
            let walls = candidate_walls(&c)?;
            Ok(json!({ "candidates": walls }))
        }
        Command::Chamber { m, walls, r, k, n } => {
            let wall_list: Vec<u64> = match (walls, r, k, n) {
                (Some(w), _, _, _) => {
                    let parts: Result<Vec<u64>, _> =
                        w.split(',').map(|p| p.trim().parse::<u64>()).collect();
                    parts.map_err(|_| bad_num(w))?
                }
                (None, Some(r), Some(k), Some(n)) => {
                    let q = Rationals;
                    candidate_walls(&ChernData::new(*r, *k, q.parse_elem(n)?)?)?
                }
                _ => {
                    return Err(Error::MalformedInput(
                        "pass either --walls or all of --r/--k/--n".into(),
                    ))
                }
            };
            let zeta = chamber_rep(*m, &wall_list)?;
            Ok(serde_json::to_value(aj::zeta_to_json(&zeta)).unwrap())
        }
        Command::ScanBeta { input, max_ext } => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                match scan_beta(&x, *max_ext, None)? {
                    BetaScan::SurjectiveEverywhere =>
                        Ok(json!({"result": "surjective_everywhere"})),
                    BetaScan::FailsAt(pt) => Ok(json!({
                        "result": "fails_at",
                        "point": serde_json::to_value(aj::point_to_json(&pt)).unwrap(),
                    })),
                }
            })
        }
        Command::ScanAlpha { input, max_ext } => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                match scan_alpha(&x, *max_ext, None)? {
                    AlphaScan::InjectiveEverywhere =>
                        Ok(json!({"result": "injective_everywhere"})),
                    AlphaScan::FiniteFailures(fails) => Ok(json!({
                        "result": "finite_failures",
                        "failures": alpha_failures_json(&fails),
                    })),
                    AlphaScan::CurveFailure(fails) => Ok(json!({
                        "result": "curve_failure",
                        "failures": alpha_failures_json(&fails),
                    })),
                }
            })
        }
        Command::Fibers { input, ext } => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let (ext_field, pts) = enumerate_points(&f, *ext, None)?;
                let data = f.embedding_data(&ext_field)?;
                let xe = x.embed_into(&ext_field, &data);
                let profile = fiber_profile(&xe, &pts)?;
                let entries: Vec<serde_json::Value> = profile
                    .entries
                    .iter()
                    .map(|(pt, (hm, h0, hp))| {
                        json!({
                            "point": serde_json::to_value(aj::point_to_json(pt)).unwrap(),
                            "h": [hm, h0, hp],
                        })
                    })
                    .collect();
                Ok(json!({ "entries": entries }))
            })
        }
        Command::Framing { input, ext } => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let degree = ext.unwrap_or(((x.n0 + x.n1) as u32).max(1));
                let ok = framing_check(&x, degree, None)?;
                Ok(json!({ "framed": ok }))
            })
        }
        Command::Perverse { input, m_max } => {
            let rj = read_rep_json(&input.input)?;
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let m_max = m_max.unwrap_or(x.n0 + x.n1);
                let profile = perverse_hom_profile(&x, m_max)?;
                let passes: Vec<usize> =
                    (0..=m_max).filter(|&m| perversity_passes(&profile, m)).collect();
                let table: Vec<serde_json::Value> = profile
                    .iter()
                    .map(|(n, to_cn, from_cn)| {
                        json!({"n": n, "hom_x_cn": to_cn, "hom_cn_x": from_cn})
                    })
                    .collect();
                Ok(json!({ "table": table, "passes_m": passes }))
            })
        }
        Command::ToPlane { input, side } => {
            let rj = read_rep_json(&input.input)?;
            let side = if side == "left" { DescentSide::Left } else { DescentSide::Right };
            with_field!(rj.field, f => {
                let x = aj::rep_from_json(&f, &rj)?;
                let a = to_plane(&x, side);
                Ok(json!({
                    "plane": serde_json::to_value(aj::plane_to_json(&a)).unwrap(),
                    "flat": a.is_flat(),
                }))
            })
        }
        Command::C1Roundtrip(input) => {
            let pj = read_plane_json(&input.input)?;
            with_field!(pj.field, f => {
                let a = aj::plane_from_json(&f, &pj)?;
                let ok = c1zero_roundtrip(&a)?;
                Ok(json!({ "roundtrip": ok }))
            })
        }
        Command::Enumerate { dims, field, flat_only, limit } => {
            let d = parse_usize_list(dims, 3)?;
            let spec = parse_field_spec(field)?;
            with_field!(spec, f => {
                let iter =
                    adhm_core::rep::enumerate_reps(&f, (d[0], d[1], d[2]), *flat_only, None)?;
                let mut reps = Vec::new();
                let mut total = 0u64;
                for x in iter {
                    total += 1;
                    if limit.map(|l| reps.len() < l).unwrap_or(true) {
                        reps.push(serde_json::to_value(aj::rep_to_json(&x)).unwrap());
                    }
                }
                Ok(json!({ "count": total, "reps": reps }))
            })
        }
        Command::BlowupPoint { field, b1, b2, d, z1, z2, z, w } => {
            let spec = parse_field_spec(field)?;
            with_field!(spec, f => {
                match (b1, b2, d) {
                    (Some(b1), Some(b2), Some(d)) => {
                        let (b1, b2, d) =
                            (f.parse_elem(b1)?, f.parse_elem(b2)?, f.parse_elem(d)?);
                        let pt = triple_to_point(&f, &b1, &b2, &d)?;
                        Ok(json!({
                            "point": {
                                "z1": f.elem_to_string(&pt.z1),
                                "z2": f.elem_to_string(&pt.z2),
                                "p1": [f.elem_to_string(&pt.z), f.elem_to_string(&pt.w)],
                            }
                        }))
                    }
                    _ => match (z1, z2, z, w) {
                        (Some(z1), Some(z2), Some(z), Some(w)) => {
                            let pt = BlowupPoint::new(
                                &f,
                                f.parse_elem(z1)?,
                                f.parse_elem(z2)?,
                                f.parse_elem(z)?,
                                f.parse_elem(w)?,
                            )?;
                            let (b1, b2, d) = point_to_triple(&f, &pt)?;
                            Ok(json!({
                                "triple": {
                                    "B1": f.elem_to_string(&b1),
                                    "B2": f.elem_to_string(&b2),
                                    "d": f.elem_to_string(&d),
                                }
                            }))
                        }
                        _ => Err(Error::MalformedInput(
                            "pass --b1/--b2/--d for the forward map or --z1/--z2/--z/--w \
                             for the inverse"
                                .into(),
                        )),
                    },
                }
            })
        }
        Command::Sweep { dims, field, assertion, zeta, budget } => {
            // Two components mean a W = 0 dimension pair.
            let mut d = parse_usize_list(dims, dims.matches(',').count() + 1)?;
            match d.len() {
                2 => d.push(0),
                3 => {}
                _ => {
                    return Err(Error::MalformedInput(
                        "dims must be n0,n1 or n0,n1,r".into(),
                    ))
                }
            }
            let spec = parse_field_spec(field)?;
            let assertion = SweepAssertion::from_str(assertion)?;
            let zeta = zeta.as_deref().map(parse_zeta).transpose()?;
            with_field!(spec, f => {
                let out = sweep(&f, (d[0], d[1], d[2]), zeta.as_ref(), assertion, *budget)?;
                Ok(json!({
                    "checked": out.checked,
                    "failures": out.failures,
                    "first_failure": out.first_failure,
                    "notes": out.notes,
                }))
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BoundExceeded(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
