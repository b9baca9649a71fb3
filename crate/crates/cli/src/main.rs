//! Command-line front end: synthesize CM eigenforms from Hecke characters,
//! construct congruence companions, and verify twisted coefficient
//! congruences. Exit codes: 0 success/pass, 1 verified-false, 2 error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use heckecm::companion::{companion_weight_modm, construct_companion, is_ordinary_at};
use heckecm::congruence::{detect_cm, twisted_congruence, CongruenceReport};
use heckecm::error::Error;
use heckecm::formfile::FormFile;
use heckecm::heckechar::{FiniteType, HeckeChar, RootOfUnity};
use heckecm::qexpansion::synthesize;
use heckecm::quadfield::{reduced_forms, Ideal, QuadField, QuadInt};

#[derive(Parser)]
#[command(name = "heckecm", version, about = "CM eigenforms and their congruence companions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the class group of an imaginary quadratic field
    Classgroup {
        /// fundamental negative discriminant
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a CM eigenform and write it as a form file
    Synth {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        /// infinity exponent (the weight is u+1)
        #[arg(long)]
        u: u64,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
        /// finite-type modulus in normal form a:b or content:a:b
        #[arg(long)]
        modulus: Option<String>,
        /// image of a generator, written x,y=exp (repeatable)
        #[arg(long = "assign")]
        assigns: Vec<String>,
        /// the exponent e the assigned images are stated against
        #[arg(long, default_value_t = 1)]
        root_order: u64,
        /// anchor twists d_i, comma separated, for class number > 1
        #[arg(long, value_delimiter = ',')]
        twists: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Construct and verify a companion form modulo an odd integer
    Companion {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
        /// also write the JSON report to this path
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Verify the twisted congruence between two form files
    Verify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        companion: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check inert-prime vanishing of a form file
    DetectCm {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, default_value_t = 200)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Companion weight k' for weight k modulo M
    Weight {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        json: bool,
    },
    /// Ordinarity of a form file at p
    Ordinary {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_modulus(k: &QuadField, s: &str) -> Result<Ideal, Error> {
    let ints: Vec<i64> = s
        .split(':')
        .map(|p| p.parse::<i64>().map_err(|_| Error::Message(format!("bad modulus part {p:?}"))))
        .collect::<Result<_, _>>()?;
    match ints.as_slice() {
        [a, b] => Ideal::new(k, 1.into(), (*a).into(), (*b).into()),
        [g, a, b] => Ideal::new(k, (*g).into(), (*a).into(), (*b).into()),
        _ => Err(Error::Message("modulus must be a:b or content:a:b".into())),
    }
}

fn parse_assign(s: &str, root_order: u64) -> Result<(QuadInt, RootOfUnity), Error> {
    let (lhs, rhs) = s
        .split_once('=')
        .ok_or_else(|| Error::Message(format!("assignment {s:?} must be x,y=exp")))?;
    let (x, y) = lhs
        .split_once(',')
        .ok_or_else(|| Error::Message(format!("generator {lhs:?} must be x,y")))?;
    let x: i64 = x.trim().parse().map_err(|_| Error::Message(format!("bad integer {x:?}")))?;
    let y: i64 = y.trim().parse().map_err(|_| Error::Message(format!("bad integer {y:?}")))?;
    let e: u64 =
        rhs.trim().parse().map_err(|_| Error::Message(format!("bad exponent {rhs:?}")))?;
    Ok((QuadInt::from_i64(x, y), RootOfUnity::new(e, root_order)))
}

fn load_form(path: &PathBuf) -> Result<FormFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Message(format!("cannot read {}: {e}", path.display())))?;
    FormFile::from_json(&text)
}

fn congruence_json(rep: &CongruenceReport) -> serde_json::Value {
    json!({
        "pass": rep.pass,
        "modulus": rep.modulus,
        "checked": rep.checked,
        "skipped": rep.skipped,
        "first_failure": rep.first_failure.as_ref().map(|w| json!({
            "n": w.n,
            "lhs": w.lhs.to_string(),
            "rhs": w.rhs.to_string(),
        })),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Classgroup { disc, json: as_json } => {
            let forms = reduced_forms(disc)?;
            let k = QuadField::from_disc(disc)?;
            let cg = k.class_group(&Ideal::unit())?;
            if as_json {
                let value = json!({
                    "disc": disc,
                    "class_number": cg.h(),
                    "reduced_forms": forms,
                    "reps": cg.reps().iter().map(|r| json!({
                        "content": r.content().to_string(),
                        "a": r.a().to_string(),
                        "b": r.b().to_string(),
                    })).collect::<Vec<_>>(),
                    "orders": cg.orders(),
                    "gens": cg.gens().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!("disc: {disc}");
                println!("class number: {}", cg.h());
                let fstr: Vec<String> =
                    forms.iter().map(|(a, b, c)| format!("({a}, {b}, {c})")).collect();
                println!("reduced forms: {}", fstr.join(", "));
                for (i, rep) in cg.reps().iter().enumerate() {
                    println!(
                        "rep {}: {} order {} generator {}",
                        i,
                        rep,
                        cg.orders()[i],
                        cg.gens()[i]
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Synth { disc, u, bound, out, modulus, assigns, root_order, twists, json: as_json } => {
            let field = QuadField::from_disc(disc)?;
            let m = match &modulus {
                Some(s) => parse_modulus(&field, s)?,
                None => Ideal::unit(),
            };
            let assignments = assigns
                .iter()
                .map(|a| parse_assign(a, root_order))
                .collect::<Result<Vec<_>, _>>()?;
            let ft = FiniteType::from_values(&field, m.clone(), &assignments)?;
            let cg = field.class_group(&m)?;
            let psi = HeckeChar::new(field, ft, u, cg, twists)?;
            let f = synthesize(&psi, bound)?;
            let ff = FormFile::from_synthesis(&psi, &f)?;
            std::fs::write(&out, ff.to_json())
                .map_err(|e| Error::Message(format!("cannot write {}: {e}", out.display())))?;
            let cond = f.nebentypus().conductor();
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "weight": f.weight(),
                        "level": f.level(),
                        "nebentypus_conductor": cond,
                        "bound": bound,
                        "out": out.display().to_string(),
                    }))
                    .unwrap()
                );
            } else {
                println!("weight: {}", f.weight());
                println!("level: {}", f.level());
                println!("nebentypus conductor: {cond}");
                println!("wrote {}", out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Companion { form, modulus, bound, out, report, json: as_json } => {
            let ff = load_form(&form)?;
            let psi = ff.to_char()?;
            let k = ff.weight;
            let res = construct_companion(&psi, k, modulus, bound)?;
            let hf = FormFile::from_synthesis(&res.psi_prime, &res.h)?;
            std::fs::write(&out, hf.to_json())
                .map_err(|e| Error::Message(format!("cannot write {}: {e}", out.display())))?;
            let report_obj = json!({
                "k": k,
                "k_prime": res.k_prime,
                "modulus": modulus,
                "certificates": res.certificates.iter().map(|c| json!({
                    "rep": c.rep,
                    "d": c.d,
                    "order": c.order,
                    "per_prime": c.per_prime.iter().map(|pc| json!({
                        "p": pc.p,
                        "t": pc.t,
                        "d": pc.d,
                        "phi_value": pc.phi_value,
                        "anchor_value": pc.anchor_value,
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "congruence": congruence_json(&res.congruence),
                "out": out.display().to_string(),
            });
            if let Some(path) = &report {
                let mut text = serde_json::to_string_pretty(&report_obj).unwrap();
                text.push('\n');
                std::fs::write(path, text)
                    .map_err(|e| Error::Message(format!("cannot write {}: {e}", path.display())))?;
            }
            if as_json {
                println!("{}", serde_json::to_string_pretty(&report_obj).unwrap());
            } else {
                println!("companion weight: {}", res.k_prime);
                println!(
                    "congruence mod {}: {} ({} checked, {} skipped)",
                    modulus,
                    if res.congruence.pass { "pass" } else { "FAIL" },
                    res.congruence.checked,
                    res.congruence.skipped
                );
                for c in &res.certificates {
                    println!("rep {}: d = {} (order {})", c.rep, c.d, c.order);
                }
                println!("wrote {}", out.display());
            }
            Ok(if res.congruence.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Verify { form, companion, k, modulus, bound, json: as_json } => {
            let f = load_form(&form)?.to_expansion()?;
            let h = load_form(&companion)?.to_expansion()?;
            let rep = twisted_congruence(&f, &h, k, modulus, f.level(), bound)?;
            if as_json {
                println!("{}", serde_json::to_string_pretty(&congruence_json(&rep)).unwrap());
            } else if rep.pass {
                println!(
                    "pass: a_n(f) = n^{} a_n(h) mod {} for all {} checked n <= {}",
                    k - 1,
                    modulus,
                    rep.checked,
                    bound
                );
            } else {
                let w = rep.first_failure.as_ref().unwrap();
                println!("FAIL at n = {}: {} != {} (mod {})", w.n, w.lhs, w.rhs, modulus);
            }
            Ok(if rep.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::DetectCm { form, disc, bound, json: as_json } => {
            let f = load_form(&form)?.to_expansion()?;
            let rep = detect_cm(&f, disc, bound)?;
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "is_cm": rep.is_cm,
                        "witness": rep.witness,
                    }))
                    .unwrap()
                );
            } else {
                match rep.witness {
                    None => println!("true"),
                    Some(q) => println!("false (witness prime {q})"),
                }
            }
            Ok(if rep.is_cm { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Weight { k, modulus, json: as_json } => {
            if k < 2 || modulus < 3 || modulus % 2 == 0 {
                return Err(Error::BadModulus(modulus));
            }
            let kp = companion_weight_modm(k, modulus);
            if as_json {
                println!("{}", json!({ "k": k, "modulus": modulus, "k_prime": kp }));
            } else {
                println!("{kp}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ordinary { form, p, json: as_json } => {
            let f = load_form(&form)?.to_expansion()?;
            let ord = is_ordinary_at(&f, p)?;
            if as_json {
                println!("{}", json!({ "p": p, "ordinary": ord }));
            } else {
                println!("{ord}");
            }
            Ok(if ord { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
