//! `sqz`: exact canonical forms, matrix division, and square-zero / nilpotent
//! decompositions from matrix files.

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sqz_core::canonform::{fitting, invariant_polynomials, rcf};
use sqz_core::certificate::{Certificate, Part, Role};
use sqz_core::densemat::parse_field_name;
use sqz_core::factorize::{nilpotent_product_nilpotent, nilpotent_product_two, sqz_product_chain, sqz_product_three, sqz_product_two};
use sqz_core::matdiv::{quotient_left, quotient_right, sqz_quotient_left, sqz_quotient_right, QuotientRecipe};
use sqz_core::oracle::{census, verify_certificate, Claim};
use sqz_core::summation::{nilpotent_sum, sum_four_sqz, sum_three_decide, sum_two_sqz, ThreeSumStatus};
use sqz_core::{ExactMatrix, FieldSpec, UniPoly};

#[derive(Parser)]
#[command(name = "sqz", version, about = "Exact square-zero and nilpotent decompositions over Q and GF(p)")]
struct Cli {
    /// Reinterpret every input matrix over this field (Q or GF(p))
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = OutMode::Text)]
    out: OutMode,
    /// Seed for randomized polynomial factorization
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutMode {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FactorKind {
    /// Two nilpotent factors of a singular matrix
    Nilpotent2,
    /// Two nilpotent factors of a nilpotent matrix, each of its rank
    Nilnil,
    Sqz2,
    Sqz3,
    Sqzk,
}

/// Number of square-zero summands, or nilpotent summands.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SumKind {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "4")]
    Four,
    Nilpotent,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariant polynomials, with their factorizations
    Invariants { a: String },
    /// Rational canonical form and transform
    Rcf { a: String },
    /// Fitting decomposition into nilpotent and invertible parts
    Fitting { a: String },
    /// Minimal polynomial
    Minpoly { a: String },
    /// Characteristic polynomial
    Charpoly { a: String },
    /// Quotient H with HF = G (or FH = G with --left)
    Divide {
        g: String,
        f: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        left: bool,
        #[arg(long)]
        recipe: Option<String>,
    },
    /// Square-zero quotient
    Sqzq {
        g: String,
        f: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        left: bool,
        #[arg(long)]
        recipe: Option<String>,
    },
    /// Product decompositions
    Factor {
        a: String,
        #[arg(long, value_enum)]
        kind: FactorKind,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated factor ranks
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<usize>>,
    },
    /// Sum decompositions
    Sum {
        a: String,
        #[arg(long, value_enum)]
        k: SumKind,
    },
    /// Decide whether A is a sum of three square-zero matrices
    #[command(name = "sum3-decide")]
    Sum3Decide { a: String },
    /// Check a certificate file
    Verify { cert: String },
    /// Compare brute force with the theorems on every matrix up to order n
    #[command(name = "oracle-scan")]
    OracleScan {
        #[arg(long)]
        n: usize,
        /// One of sum2, sum3, sum4, prod2-sqz, prod3-sqz, prod2-nil, all
        #[arg(long, default_value = "all")]
        claim: String,
    },
}

/// Collects output in one of the two modes.
struct Out {
    structured: bool,
    buf: String,
}

impl Out {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.structured {
            self.buf.push_str(&format!("{}={}\n", key, value));
        } else {
            self.buf.push_str(&format!("{}: {}\n", key, value));
        }
    }

    fn text(&mut self, s: &str) {
        if !self.structured {
            self.buf.push_str(s);
            self.buf.push('\n');
        }
    }

    fn matrix(&mut self, name: &str, m: &ExactMatrix) {
        if self.structured {
            self.buf.push_str(&format!("{}.field={}\n{}.rows={}\n{}.cols={}\n", name, m.field(), name, m.rows(), name, m.cols()));
            for i in 0..m.rows() {
                let row: Vec<String> = m.row(i).iter().map(|s| s.to_string()).collect();
                self.buf.push_str(&format!("{}.row.{}={}\n", name, i, row.join(" ")));
            }
        } else {
            // the comment keeps the block parseable as a matrix file
            self.buf.push_str(&format!("# {}\n{}", name, m.to_text()));
        }
    }

    fn poly(&mut self, name: &str, p: &UniPoly) {
        let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
        if self.structured {
            self.buf.push_str(&format!("{}.degree={}\n{}.coeffs={}\n", name, p.deg(), name, coeffs.join(" ")));
        } else {
            self.buf.push_str(&format!("{}: {}    # ascending: {}\n", name, p, coeffs.join(" ")));
        }
    }

    fn certificate(&mut self, c: &Certificate) {
        if self.structured {
            self.line("certificate.kind", if c.kind == sqz_core::certificate::Combine::Product { "product" } else { "sum" });
            for (i, t) in c.trail.iter().enumerate() {
                self.line(&format!("certificate.trail.{}", i), t);
            }
            self.matrix("certificate.input", &c.input);
            for (i, p) in c.parts.iter().enumerate() {
                self.line(&format!("certificate.part.{}.role", i), p.role);
                if let Some(r) = p.rank {
                    self.line(&format!("certificate.part.{}.rank", i), r);
                }
                self.matrix(&format!("certificate.part.{}", i), &p.matrix);
            }
            self.line("certificate.check", verify_certificate(c));
        } else {
            self.buf.push_str(&c.to_text());
            self.buf.push_str(&format!("# check: {}\n", verify_certificate(c)));
        }
    }
}

struct Ctx {
    field: Option<FieldSpec>,
    seed: u64,
}

impl Ctx {
    fn read(&self, path: &str) -> Result<String, String> {
        fs::read_to_string(path).map_err(|e| format!("cannot read '{}': {}", path, e))
    }

    fn matrix(&self, path: &str) -> Result<ExactMatrix, String> {
        let text = self.read(path)?;
        let text = match self.field {
            Some(f) => override_field(&text, f),
            None => text,
        };
        ExactMatrix::parse(&text).map_err(|e| format!("{}: {}", path, e))
    }

    fn recipe(&self, path: &Option<String>) -> Result<Option<QuotientRecipe>, String> {
        match path {
            Some(p) => QuotientRecipe::parse(&self.read(p)?).map(Some).map_err(|e| format!("{}: {}", p, e)),
            None => Ok(None),
        }
    }
}

fn override_field(text: &str, f: FieldSpec) -> String {
    let mut done = false;
    text.lines()
        .map(|l| {
            if !done && l.trim_start().starts_with("field") {
                done = true;
                format!("field {}", f)
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Runs a subcommand; Ok carries the exit code.
fn run(cli: &Cli, out: &mut Out) -> Result<u8, String> {
    let field = cli.field.as_deref().map(parse_field_name).transpose().map_err(err)?;
    let ctx = Ctx { field, seed: cli.seed };
    match &cli.cmd {
        Cmd::Invariants { a } => {
            let a = ctx.matrix(a)?;
            let inv = invariant_polynomials(&a).map_err(err)?;
            for (i, p) in inv.nonconstant().iter().enumerate() {
                out.poly(&format!("f{}", i + 1), p);
                let fl = p.factor(ctx.seed).map_err(err)?;
                let parts: Vec<String> = fl.factors.iter().map(|(q, e)| if *e == 1 { format!("({})", q) } else { format!("({})^{}", q, e) }).collect();
                let note = if fl.complete { "" } else { " (not fully split over Q)" };
                out.line(&format!("f{}.factors", i + 1), format!("{}{}", parts.join(" "), note));
            }
            Ok(0)
        }
        Cmd::Rcf { a } => {
            let a = ctx.matrix(a)?;
            let r = rcf(&a).map_err(err)?;
            for (i, p) in r.polys.iter().enumerate() {
                out.poly(&format!("f{}", i + 1), p);
            }
            out.matrix("form", &r.form);
            out.matrix("P", &r.p);
            let pinv = r.p.inverse().map_err(err)?;
            let cert = similarity_certificate(&a, &r.p, pinv, r.form.clone(), "P^-1 A P is the rational canonical form");
            out.certificate(&cert);
            Ok(0)
        }
        Cmd::Fitting { a } => {
            let a = ctx.matrix(a)?;
            let r = fitting(&a).map_err(err)?;
            out.matrix("N", &r.n);
            out.matrix("B", &r.b);
            out.matrix("P", &r.p);
            let pinv = r.p.inverse().map_err(err)?;
            let dg = ExactMatrix::block_diag(a.field(), &[&r.n, &r.b]);
            let cert = similarity_certificate(&a, &r.p, pinv, dg, "P^-1 A P = Dg[N, B], N nilpotent, B invertible");
            out.certificate(&cert);
            Ok(0)
        }
        Cmd::Minpoly { a } => {
            let a = ctx.matrix(a)?;
            out.poly("minpoly", &invariant_polynomials(&a).map_err(err)?.minimal_polynomial());
            Ok(0)
        }
        Cmd::Charpoly { a } => {
            let a = ctx.matrix(a)?;
            out.poly("charpoly", &a.char_poly().map_err(err)?);
            Ok(0)
        }
        Cmd::Divide { g, f, rank, left, recipe } | Cmd::Sqzq { g, f, rank, left, recipe } => {
            let sqz = matches!(cli.cmd, Cmd::Sqzq { .. });
            let (g, f) = (ctx.matrix(g)?, ctx.matrix(f)?);
            let recipe = ctx.recipe(recipe)?;
            let q = match (sqz, *left) {
                (false, false) => quotient_right(&g, &f, *rank, recipe.as_ref()),
                (false, true) => quotient_left(&g, &f, *rank, recipe.as_ref()),
                (true, false) => sqz_quotient_right(&g, &f, *rank, recipe.as_ref()),
                (true, true) => sqz_quotient_left(&g, &f, *rank, recipe.as_ref()),
            }
            .map_err(err)?;
            out.line("bounds", format!("{} {}", q.bounds.low, q.bounds.high));
            out.matrix("H", &q.h);
            let role = if sqz { Role::SquareZero } else { Role::Any };
            let hpart = Part::new(q.h.clone(), role);
            let fpart = Part::unranked(f.clone(), Role::Any);
            let parts = if *left { vec![fpart, hpart] } else { vec![hpart, fpart] };
            let cert = Certificate::product(g.clone(), parts, vec![format!("{} quotient", if *left { "left" } else { "right" })]);
            let report = verify_certificate(&cert);
            if !report.passed() {
                return Err(format!("internal check failed: {}", report));
            }
            let eq = if *left { "FH=G" } else { "HF=G" };
            let sq = if sqz { ", H^2=0" } else { "" };
            out.line("verified", format!("{}{}, rank={}", eq, sq, q.h.rank()));
            out.text("# recipe used");
            if !out.structured {
                out.buf.push_str(&q.recipe.to_text());
            }
            out.certificate(&cert);
            Ok(0)
        }
        Cmd::Factor { a, kind, k, ranks } => {
            let a = ctx.matrix(a)?;
            let r = ranks.as_deref();
            let at = |i: usize| r.and_then(|v| v.get(i).copied());
            let cert = match kind {
                FactorKind::Nilpotent2 => nilpotent_product_two(&a),
                FactorKind::Nilnil => nilpotent_product_nilpotent(&a),
                FactorKind::Sqz2 => sqz_product_two(&a, at(0), at(1)),
                FactorKind::Sqz3 => match r {
                    Some(v) if v.len() == 3 => sqz_product_three(&a, Some([v[0], v[1], v[2]])),
                    Some(v) => return Err(format!("--ranks needs 3 values for sqz3, got {}", v.len())),
                    None => sqz_product_three(&a, None),
                },
                FactorKind::Sqzk => sqz_product_chain(&a, k.ok_or("--k is required for sqzk")?, r),
            }
            .map_err(err)?;
            emit_certificate(out, &cert)
        }
        Cmd::Sum { a, k } => {
            let a = ctx.matrix(a)?;
            let cert = match k {
                SumKind::Nilpotent => nilpotent_sum(&a).map_err(err)?,
                SumKind::Two => sum_two_sqz(&a).map_err(err)?,
                SumKind::Four => sum_four_sqz(&a).map_err(err)?,
                SumKind::Three => return decide_three(out, &a),
            };
            emit_certificate(out, &cert)
        }
        Cmd::Sum3Decide { a } => {
            let a = ctx.matrix(a)?;
            decide_three(out, &a)
        }
        Cmd::Verify { cert } => {
            let c = Certificate::parse(&ctx.read(cert)?).map_err(err)?;
            let report = verify_certificate(&c);
            out.line("result", &report);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Cmd::OracleScan { n, claim } => {
            let f = ctx.field.ok_or("--field GF(p) is required")?;
            let claims: Vec<Claim> = if claim == "all" { Claim::ALL.to_vec() } else { vec![Claim::parse(claim).map_err(err)?] };
            out.text(&format!("{:<10} {:<6} {:>2} {:>7} {:>7} {:>7} {:>5}", "claim", "field", "n", "total", "brute", "theorem", "diff"));
            let mut ok = true;
            let mut verdicts = Vec::new();
            for c in claims.iter().filter(|c| c.applies_to(f)) {
                let mut pass = true;
                for order in 1..=*n {
                    let r = census(f, order, *c).map_err(err)?;
                    if out.structured {
                        let key = format!("census.{}.{}", c.name(), order);
                        out.line(&key, format!("total={} brute={} theorem={} mismatches={}", r.total, r.brute_yes, r.theorem_yes, r.mismatches.len()));
                    }
                    out.text(&format!("{:<10} {:<6} {:>2} {:>7} {:>7} {:>7} {:>5}", c.name(), f.to_string(), order, r.total, r.brute_yes, r.theorem_yes, r.mismatches.len()));
                    pass &= r.passed();
                }
                ok &= pass;
                verdicts.push((c.name(), c.predicate(), pass));
            }
            for (name, pred, pass) in verdicts {
                out.line(if pass { "PASS" } else { "FAIL" }, format!("{}: brute force agrees with \"{}\" for n <= {}", name, pred, n));
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn similarity_certificate(a: &ExactMatrix, p: &ExactMatrix, pinv: ExactMatrix, target: ExactMatrix, note: &str) -> Certificate {
    Certificate::product(
        target,
        vec![Part::unranked(pinv, Role::Any), Part::unranked(a.clone(), Role::Any), Part::unranked(p.clone(), Role::Any)],
        vec![note.to_string()],
    )
}

fn emit_certificate(out: &mut Out, cert: &Certificate) -> Result<u8, String> {
    let report = verify_certificate(cert);
    if !report.passed() {
        return Err(format!("internal check failed: {}", report));
    }
    out.certificate(cert);
    Ok(0)
}

fn decide_three(out: &mut Out, a: &ExactMatrix) -> Result<u8, String> {
    let v = sum_three_decide(a);
    for c in &v.checks {
        out.line("check", c);
    }
    match &v.status {
        ThreeSumStatus::Yes(cert) => {
            out.line("verdict", "yes");
            out.certificate(cert);
            Ok(0)
        }
        ThreeSumStatus::No(why) => {
            out.line("verdict", "no");
            out.line("reason", why);
            Ok(1)
        }
        ThreeSumStatus::Unknown(notes) => {
            out.line("verdict", "unknown");
            for n in notes {
                out.line("note", n);
            }
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out { structured: cli.out == OutMode::Structured, buf: String::new() };
    match run(&cli, &mut out) {
        Ok(code) => {
            print!("{}", out.buf);
            ExitCode::from(code)
        }
        Err(e) => {
            print!("{}", out.buf);
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
