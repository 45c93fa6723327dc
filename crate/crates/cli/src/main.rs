//! `rdptors` — command-line front end for the RDP torsor computations.
//!
//! Exit codes: 0 all checks passed, 1 verification failure or computation
//! error, 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rdptors_core::algebra::{rdp_equation, Family, RdpEquation};
use rdptors_core::cohomology::{compute_module, presentation_from_module, Box};
use rdptors_core::dieudonne::identify_with;
use rdptors_core::dnr::DnrModel;
use rdptors_core::error::Error;
use rdptors_core::reporting::{
    all_pass_coincidence, all_pass_finj, all_pass_table, coincidence_check,
    computed_dieu_module, finj_report, render_coincidence_rows, render_finj_rows,
    render_table_rows, table2_locloc, table2_rows, table3_d_rows, table3_e_rows, to_json,
    verify_table3,
};
use rdptors_core::witt;
use serde::Serialize;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rdptors",
    about = "Dieudonne modules and local torsors of rational double points",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct RowArgs {
    /// Characteristic p
    #[arg(long = "char")]
    p: u32,
    /// Singularity type: A, D, E6, E7 or E8
    #[arg(long = "type")]
    family: String,
    /// Index n (required for A and D)
    #[arg(long)]
    n: Option<u32>,
    /// Integer Artin co-index r
    #[arg(long, conflicts_with = "r2")]
    coindex: Option<u32>,
    /// Twice the co-index (for half-integer co-indices of odd D_n)
    #[arg(long)]
    r2: Option<u32>,
}

#[derive(Args)]
struct CommonArgs {
    /// Override the truncation box bound B (default: 2n+8 for A/D, 24 for E;
    /// also settable via RDPTORS_BOX)
    #[arg(long = "box")]
    box_b: Option<u32>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Dieudonne module of one singularity: presentation plus
    /// group-scheme identification
    Compute {
        #[command(flatten)]
        row: RowArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify the Table 3 presentations (generators, relations, lengths)
    VerifyTable3 {
        /// Restrict to one characteristic
        #[arg(long = "char")]
        p: Option<u32>,
        /// Largest D_n index to verify (p = 2 rows)
        #[arg(long, default_value_t = 12)]
        d_max: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify the Picloc^{loc,loc} column of Table 2, merged with the
    /// literature columns
    Table2 {
        #[arg(long = "char")]
        p: u32,
        /// Largest A_n index
        #[arg(long, default_value_t = 6)]
        a_max: u32,
        /// Largest D_n index
        #[arg(long, default_value_t = 10)]
        d_max: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Combinatorial D_n^r report: L, BT_1, a_i/b_i decomposition
    Dnr {
        #[arg(long)]
        n: u32,
        #[arg(long, conflicts_with = "r2")]
        coindex: Option<u32>,
        #[arg(long)]
        r2: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFormat,
    },
    /// F-injectivity verdict (Table 1) for one singularity
    Finj {
        #[command(flatten)]
        row: RowArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The coincidence dim M[F] = r_max - r across all co-indices of a family
    Coincidence {
        #[arg(long = "char")]
        p: u32,
        /// Family: A, D, E6, E7 or E8
        #[arg(long = "type")]
        family: String,
        /// Largest D_n index (p = 2)
        #[arg(long, default_value_t = 16)]
        d_max: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the derived Witt-vector laws against the ghost oracles
    WittSelftest {
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFormat,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s.to_ascii_uppercase().replace('_', "").as_str() {
        "A" => Ok(Family::A),
        "D" => Ok(Family::D),
        "E6" => Ok(Family::E6),
        "E7" => Ok(Family::E7),
        "E8" => Ok(Family::E8),
        other => Err(format!("unknown type `{other}` (expected A, D, E6, E7, E8)")),
    }
}

fn resolve_row(row: &RowArgs) -> Result<RdpEquation, Error> {
    let family = parse_family(&row.family)
        .map_err(|reason| Error::InvalidRdpParameters {
            p: row.p,
            family: row.family.clone(),
            n: row.n.unwrap_or(0),
            r2: row.r2,
            reason,
        })?;
    let n = match (family, row.n) {
        (Family::E6, _) => 6,
        (Family::E7, _) => 7,
        (Family::E8, _) => 8,
        (_, Some(n)) => n,
        (_, None) => {
            return Err(Error::InvalidRdpParameters {
                p: row.p,
                family: row.family.clone(),
                n: 0,
                r2: row.r2,
                reason: "A and D types require --n".into(),
            })
        }
    };
    let r2 = row.coindex.map(|r| 2 * r).or(row.r2);
    rdp_equation(row.p, family, n, r2)
}

fn box_override(common: &CommonArgs) -> Option<u32> {
    common.box_b.or_else(|| {
        std::env::var("RDPTORS_BOX")
            .ok()
            .and_then(|s| s.parse().ok())
    })
}

fn emit<T: Serialize>(output: OutputFormat, payload: &T, text: String) -> Result<(), Error> {
    match output {
        OutputFormat::Json => println!("{}", to_json(payload)?),
        OutputFormat::Text => print!("{text}"),
    }
    Ok(())
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { row, common } => {
            let eq = resolve_row(&row)?;
            let over = box_override(&common);
            let bx = match over {
                Some(b) => Box::new(b)?,
                None => Box::default_for(&eq),
            };
            let data = compute_module(&eq, &bx)?;
            let pres = presentation_from_module(&eq, &bx, &data)?;
            let m = computed_dieu_module(&eq, over)?;
            let id = if eq.family == Family::D && eq.p == 2 {
                let model = DnrModel::new(eq.n, eq.r2().unwrap())?.build_module()?;
                let gid = rdptors_core::dieudonne::GroupSchemeId::GNR(eq.n, eq.r2().unwrap());
                identify_with(&m, &[(gid, model)])?
            } else {
                identify_with(&m, &[])?
            };
            #[derive(Serialize)]
            struct ComputePayload<'a> {
                presentation: &'a rdptors_core::cohomology::DieuPresentation,
                identified: String,
            }
            let payload = ComputePayload {
                presentation: &pres,
                identified: id.notation(eq.p),
            };
            let mut text = format!(
                "{}  ({})\nlength {}\ngenerators: {:?}\n",
                pres.eq,
                pres.equation,
                pres.length,
                pres.generators
                    .iter()
                    .map(|g| if g.l == 1 {
                        format!("f_{}", g.j)
                    } else {
                        format!("f_{}^({})", g.j, g.l)
                    })
                    .collect::<Vec<_>>()
            );
            for r in &pres.relations {
                text.push_str(&format!("relation: {r} = 0\n"));
            }
            text.push_str(&format!("Picloc^(loc,loc) = {}\n", payload.identified));
            emit(common.output, &payload, text)?;
            Ok(true)
        }
        Command::VerifyTable3 { p, d_max, common } => {
            let over = box_override(&common);
            let mut rows: Vec<RdpEquation> = table3_e_rows()
                .into_iter()
                .filter(|eq| p.map_or(true, |pp| eq.p == pp))
                .collect();
            if p.map_or(true, |pp| pp == 2) {
                rows.extend(table3_d_rows(d_max));
            }
            let reps = verify_table3(&rows, over)?;
            emit(common.output, &reps, render_table_rows(&reps))?;
            Ok(all_pass_table(&reps))
        }
        Command::Table2 {
            p,
            a_max,
            d_max,
            common,
        } => {
            let over = box_override(&common);
            let rows = table2_rows(p, a_max, d_max);
            let reps = table2_locloc(&rows, over)?;
            emit(common.output, &reps, render_table_rows(&reps))?;
            Ok(all_pass_table(&reps))
        }
        Command::Dnr {
            n,
            coindex,
            r2,
            output,
        } => {
            let r2 = coindex.map(|r| 2 * r).or(r2).ok_or_else(|| {
                Error::InvalidRdpParameters {
                    p: 2,
                    family: "D".into(),
                    n,
                    r2: None,
                    reason: "dnr requires --coindex or --r2".into(),
                }
            })?;
            let model = DnrModel::new(n, r2)?;
            let (a, b) = model.ab_decomposition();
            #[derive(Serialize)]
            struct DnrPayload {
                n: u32,
                r2: u32,
                t: u32,
                length: u32,
                bt1: bool,
                a: Vec<u32>,
                b: Vec<u32>,
            }
            let payload = DnrPayload {
                n,
                r2,
                t: model.t,
                length: model.l,
                bt1: model.bt1_predicate(),
                a: a.clone(),
                b: b.clone(),
            };
            let text = format!(
                "G_{}^{} : L = {}, T = {}, BT_1 = {}\nM[F] = + a_i with a = {:?}\nM/M[F] = + b_i with b = {:?}\n",
                n,
                if r2 % 2 == 0 {
                    format!("{}", r2 / 2)
                } else {
                    format!("{}/2", r2)
                },
                model.l,
                model.t,
                payload.bt1,
                a,
                b
            );
            emit(output, &payload, text)?;
            Ok(true)
        }
        Command::Finj { row, common } => {
            let eq = resolve_row(&row)?;
            let over = box_override(&common);
            let reps = finj_report(&[eq], over)?;
            emit(common.output, &reps, render_finj_rows(&reps))?;
            Ok(all_pass_finj(&reps))
        }
        Command::Coincidence {
            p,
            family,
            d_max,
            common,
        } => {
            let family = parse_family(&family).map_err(|reason| Error::InvalidRdpParameters {
                p,
                family: family.clone(),
                n: 0,
                r2: None,
                reason,
            })?;
            let over = box_override(&common);
            let reps = coincidence_check(family, p, d_max, over)?;
            emit(common.output, &reps, render_coincidence_rows(&reps))?;
            Ok(all_pass_coincidence(&reps))
        }
        Command::WittSelftest {
            trials,
            seed,
            output,
        } => {
            let rep = witt::self_test(trials, seed)?;
            let text = format!(
                "witt self-test: {} ghost, {} Z/p^n, {} FV, {} Teichmuller checks -> {}\n",
                rep.ghost_checks,
                rep.zpn_checks,
                rep.fv_checks,
                rep.teichmuller_checks,
                if rep.ok { "ok" } else { "FAILED" }
            );
            let ok = rep.ok;
            emit(output, &rep, text)?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::InvalidRdpParameters { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
