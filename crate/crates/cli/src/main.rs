//! `adual`: command-line front end over the text file formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use adual_core::affine::{find_affine_term, GroupStructure, TernaryTermOperation};
use adual_core::duality::{arity_bound, build_alter_ego, generator_bound, verify_duality, AlterEgo};
use adual_core::entailment::{
    certify_with_relations, reduce_to_bounded_arity, refute_entailment, RefutationOutcome, Value,
};
use adual_core::factorize::{factor_morphism, Verification};
use adual_core::homgroups::{
    build_hk_group, cardinal_si_bound, generating_family, hk_bound_check, hom_divisibility_check,
    endomorphism_divisibility_check, prime_signature, CountMode,
};
use adual_core::report::{Report, Verdict};
use adual_core::subcong::{
    is_meet_irreducible, kernel_quotient, meet_irreducibles, theta_of_subalgebra, verify_galois,
    SubalgebraWitness,
};
use adual_core::subuniverse::enumerate_subuniverse_sets;
use adual_core::text::{self, Document};
use adual_core::{Budget, Elem, Error, FiniteAlgebra, Homomorphism, DEFAULT_BUDGET};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "adual", version, about = "Finite Abelian algebras: affine terms, entailment certificates and duality checks")]
struct Cli {
    /// Largest number of elements any single computation may materialize.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for sampled verification; recorded in the output header.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug)]
struct PowerArg {
    /// Work inside A^n.
    #[arg(long, default_value_t = 1)]
    arity: usize,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Find the affine term of an algebra and dump its table.
    CheckAbelian { algebra: PathBuf },
    /// Print the arity bound N and related cardinal bounds.
    Bound { algebra: PathBuf },
    /// List subuniverses of A^n, marking meet-irreducibles and their Θ_B.
    Sub {
        algebra: PathBuf,
        #[command(flatten)]
        power: PowerArg,
    },
    /// Check the subalgebra/congruence correspondence above every subalgebra of A^n.
    Galois {
        algebra: PathBuf,
        #[command(flatten)]
        power: PowerArg,
    },
    /// Count Hom(A, B) and check divisibility of the count.
    Hom {
        domain: PathBuf,
        codomain: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Build 𝓗_k(A², S) for every subdirectly irreducible quotient A^n/Θ_B.
    Hk {
        algebra: PathBuf,
        #[command(flatten)]
        power: PowerArg,
    },
    /// Factor every quotient map A^n -> A^n/Θ_B through an (N+1)-ary morphism.
    Factorize {
        algebra: PathBuf,
        #[command(flatten)]
        power: PowerArg,
        /// Write the quotients and factorizations here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify each relation of a file from relations of arity at most N + 1.
    Entail {
        algebra: PathBuf,
        relations: PathBuf,
        /// Lift to premises that are all relations of this arity (affine term eliminated).
        #[arg(long)]
        arity: Option<usize>,
        /// Write the certificates here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a map preserving the premises but not the target (last relation of the file).
    Refute {
        relations: PathBuf,
        /// Largest arity of candidate maps.
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Re-derive the conclusion of every certificate in a file.
    Replay {
        certificates: PathBuf,
        /// Also check every premise and derived relation is compatible with this algebra.
        algebra: Option<PathBuf>,
    },
    /// Check that evaluation into the double dual is bijective on subalgebras of powers.
    Duality {
        algebra: PathBuf,
        /// Largest power A^k whose subalgebras are tested (at most 3).
        #[arg(long, default_value_t = 2)]
        max_power: usize,
        /// Arity of the alter-ego relations (default: N).
        #[arg(long)]
        arity: Option<usize>,
        /// Use only the relations of this file instead of all compatible ones.
        #[arg(long)]
        partial_relations: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Group,
    Abelian,
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::CheckAbelian { .. } => "check-abelian",
            Verb::Bound { .. } => "bound",
            Verb::Sub { .. } => "sub",
            Verb::Galois { .. } => "galois",
            Verb::Hom { .. } => "hom",
            Verb::Hk { .. } => "hk",
            Verb::Factorize { .. } => "factorize",
            Verb::Entail { .. } => "entail",
            Verb::Refute { .. } => "refute",
            Verb::Replay { .. } => "replay",
            Verb::Duality { .. } => "duality",
        }
    }
}

/// Text for stdout and the overall verdict.
struct Outcome {
    text: String,
    verdict: Verdict,
    /// Serialized blocks destined for `--out` (or appended to `text`).
    blocks: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            text: String::new(),
            verdict: Verdict::Info,
            blocks: String::new(),
        }
    }

    fn report(&mut self, r: &Report) {
        write!(self.text, "{r}").expect("string write");
        self.verdict = combine(self.verdict, r.verdict);
    }

    fn flush_blocks(&mut self, out: Option<&Path>) -> Result<(), Error> {
        let blocks = std::mem::take(&mut self.blocks);
        match out {
            Some(p) => std::fs::write(p, blocks)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
            None => {
                self.text.push_str(&blocks);
                Ok(())
            }
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn combine(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
        _ => Verdict::Info,
    }
}

fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    println!("# adual {} seed={} budget={}", cli.verb.name(), cli.seed, cli.budget);
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}

fn load(path: &Path) -> Result<Document, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    text::parse_document(&path.display().to_string(), &text)
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra, Error> {
    load(path)?.algebra().cloned()
}

fn affine_term(a: &FiniteAlgebra, budget: Budget) -> Result<TernaryTermOperation, Error> {
    find_affine_term(a, budget)?
        .ok_or_else(|| Error::Precondition(format!("{} has no affine term", a.name())))
}

fn power_and_term(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    n: usize,
    budget: Budget,
) -> Result<(FiniteAlgebra, TernaryTermOperation), Error> {
    if n == 0 {
        return Err(Error::InvalidInput("--arity must be positive".into()));
    }
    Ok((a.power(n, budget)?, t.power(n, budget)?))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let budget = Budget(cli.budget);
    let mut out = Outcome::new();
    match &cli.verb {
        Verb::CheckAbelian { algebra } => {
            let a = load_algebra(algebra)?;
            match find_affine_term(&a, budget)? {
                Some(t) => {
                    let mut r = Report::new(format!("{} has an affine term", a.name()), Verdict::Pass);
                    if let Some(p) = t.provenance() {
                        r.push_section("term", [p.render()]);
                    }
                    let g = GroupStructure::from_affine(&t, 0)?;
                    r.push_section(
                        "group x+y = t(x,0,y)",
                        [format!("exponent = {}", g.exponent())],
                    );
                    out.report(&r);
                    let dump = FiniteAlgebra::new("t", a.size(), vec![("t".into(), 3, t.table().to_vec())])?;
                    out.text.push_str(&text::write_algebra(&dump)?);
                }
                None => out.report(&Report::new(
                    format!("{} has an affine term", a.name()),
                    Verdict::Fail,
                ).with_section("result", ["no affine term"])),
            }
        }
        Verb::Bound { algebra } => {
            let a = load_algebra(algebra)?;
            let sig = prime_signature(a.size() as u64);
            let factors: Vec<String> = sig.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
            out.report(&Report::new(format!("arity bound for {}", a.name()), Verdict::Info).with_section(
                "values",
                [
                    format!("|A| = {}", if factors.is_empty() { "1".into() } else { factors.join(" * ") }),
                    format!("max alpha = {}", sig.max_exponent()),
                    format!("generators = {}", generator_bound(a.size())),
                    format!("|S| divides {} for subdirectly irreducible S", cardinal_si_bound(a.size() as u64)?),
                ],
            ));
            out.line(format!("N = {}", arity_bound(&a)));
        }
        Verb::Sub { algebra, power } => {
            let a = load_algebra(algebra)?;
            let t = find_affine_term(&a, budget)?;
            let an = a.power(power.arity, budget)?;
            let t_n = t.as_ref().map(|t| t.power(power.arity, budget)).transpose()?;
            let mut lines = Vec::new();
            for carrier in enumerate_subuniverse_sets(&an, budget)? {
                let b = SubalgebraWitness::new(&an, carrier)?;
                let mut line = format!("{{{}}}", join(b.carrier()));
                if is_meet_irreducible(&an, &b)? {
                    line.push_str(" meet-irreducible");
                }
                if let Some(t_n) = &t_n {
                    let theta = theta_of_subalgebra(&an, t_n, &b)?;
                    let classes: Vec<String> = theta.classes().iter().map(|c| format!("[{}]", join(c))).collect();
                    write!(line, " theta={}", classes.join("")).expect("string write");
                }
                lines.push(line);
            }
            let claim = format!("subuniverses of {}^{}", a.name(), power.arity);
            out.report(&Report::new(claim, Verdict::Info).with_section(format!("{} subuniverses", lines.len()), lines));
        }
        Verb::Galois { algebra, power } => {
            let a = load_algebra(algebra)?;
            let t = affine_term(&a, budget)?;
            let (an, t_n) = power_and_term(&a, &t, power.arity, budget)?;
            for carrier in enumerate_subuniverse_sets(&an, budget)? {
                let b = SubalgebraWitness::new(&an, carrier)?;
                out.report(&verify_galois(&an, &t_n, &b, budget)?.to_report(an.name(), &b));
            }
        }
        Verb::Hom { domain, codomain, mode } => {
            let a = load_algebra(domain)?;
            let b = load_algebra(codomain)?;
            let mode = match mode {
                Some(Mode::Group) => CountMode::Group,
                Some(Mode::Abelian) => CountMode::Abelian,
                None if a.has_constants() => CountMode::Group,
                None => CountMode::Abelian,
            };
            out.report(&hom_divisibility_check(&a, &b, mode, budget)?.to_report());
        }
        Verb::Hk { algebra, power } => {
            let a = load_algebra(algebra)?;
            let t = affine_term(&a, budget)?;
            for_each_quotient(&a, &t, power.arity, budget, &mut out, |q, out| {
                let (div, family, max_ab) = hk_bound_check(a.size() as u64, q.s.size() as u64, &q.hk)?;
                let ends = endomorphism_divisibility_check(&a, &t, &q.s, budget)?;
                let mut r = Report::new(
                    format!("𝓗_k(A², S) for B = {{{}}}", join(q.carrier)),
                    Verdict::from_bool(div.holds() && ends.holds() && family <= max_ab as usize),
                );
                r.push_section(
                    "values",
                    [
                        format!("|S| = {}", q.s.size()),
                        format!("k = {}", join(q.hk.k().map())),
                        format!("|𝓗| = {} divides {} : {}", div.value, div.bound, div.holds()),
                        format!("|S| divides |End⟨A;+⟩| = {} : {}", ends.bound, ends.holds()),
                        format!("generators = {family} <= max alpha*beta = {max_ab}"),
                    ],
                );
                out.report(&r);
                Ok(())
            })?;
        }
        Verb::Factorize { algebra, power, out: out_path } => {
            let a = load_algebra(algebra)?;
            let t = affine_term(&a, budget)?;
            let n = power.arity;
            let mut index = 0;
            for_each_quotient(&a, &t, n, budget, &mut out, |q, out| {
                let gens = generating_family(q.hk.group())?;
                let fact = factor_morphism(&a, &q.s, &t, &q.t_s, &q.f, n, &q.hk, &gens, cli.seed, budget)?;
                let verification = match fact.verification {
                    Verification::Exhaustive { inputs } => format!("exhaustive over {inputs} inputs"),
                    Verification::Sampled { samples, seed } => format!("{samples} samples, seed {seed}"),
                };
                out.report(
                    &Report::new(
                        format!("f = g(p_1, …, p_N+1) for B = {{{}}}", join(q.carrier)),
                        Verdict::Pass,
                    )
                    .with_section("values", [format!("N = {}", fact.generator_count()), verification]),
                );
                index += 1;
                let s_name = format!("S{index}");
                out.blocks.push_str(&text::write_algebra(&q.s.clone().with_name(s_name.clone()))?);
                out.blocks.push_str(&text::write_factorization(&format!("F{index}"), a.name(), &s_name, &fact));
                Ok(())
            })?;
            out.flush_blocks(out_path.as_deref())?;
        }
        Verb::Entail { algebra, relations, arity, out: out_path } => {
            let doc = load(algebra)?;
            let a = doc.algebra()?.clone();
            let t = affine_term(&a, budget)?;
            let rel_doc = load(relations)?;
            let n_bound = generator_bound(a.size());
            for block in &rel_doc.relations {
                let r = rel_doc.relation(block, &a)?;
                let cert = match arity {
                    Some(p) => certify_with_relations(&a, &t, &r, n_bound, *p, budget)?,
                    None => reduce_to_bounded_arity(&a, &t, &r, n_bound, budget)?.certificate,
                };
                let replay = cert.replay(Some(&a), budget)?;
                let mut cert = cert;
                cert.name = block.name.clone();
                let max_premise = cert.premises.iter().map(|p| p.value.arity()).max().unwrap_or(0);
                out.report(
                    &Report::new(match arity {
                        Some(p) => format!("{} is derived from compatible relations of arity {p}", block.name),
                        None => format!("{} is derived from t and relations of arity <= {}", block.name, n_bound + 1),
                    }, Verdict::from_bool(replay.matches))
                        .with_section(
                            "certificate",
                            [
                                format!("premises = {}", cert.premises.len()),
                                format!("largest premise arity = {max_premise}"),
                                format!("steps = {}", replay.steps),
                            ],
                        ),
                );
                out.blocks.push_str(&text::write_certificate(a.name(), &cert));
            }
            if out_path.is_some() {
                out.blocks.insert_str(0, &text::write_algebra(&a)?);
            }
            out.flush_blocks(out_path.as_deref())?;
        }
        Verb::Refute { relations, arity } => {
            let doc = load(relations)?;
            let (target, premises) = doc
                .relations
                .split_last()
                .ok_or_else(|| Error::InvalidInput("no relation blocks".into()))?;
            let base = doc
                .algebras
                .first()
                .map(FiniteAlgebra::size)
                .or_else(|| target.tuples.iter().flatten().max().map(|&m| m as usize + 1))
                .ok_or_else(|| Error::InvalidInput("cannot infer the universe; add an algebra block".into()))?;
            let universe = FiniteAlgebra::new("U", base, vec![])?;
            let values: Vec<Value> = premises
                .iter()
                .map(|b| doc.relation(b, &universe).map(Value::Relation))
                .collect::<Result<_, _>>()?;
            let target_value = Value::Relation(doc.relation(target, &universe)?);
            let claim = format!("premises entail {}", target.name);
            match refute_entailment(base, &values, &target_value, *arity, budget)? {
                RefutationOutcome::Witness { arity, map } => out.report(
                    &Report::new(claim, Verdict::Fail)
                        .with_section("witness", [format!("arity = {arity}"), format!("map = {}", join(&map))]),
                ),
                RefutationOutcome::NoWitness { max_arity, maps_checked } => out.report(
                    &Report::new(claim, Verdict::Info).with_section(
                        "no witness",
                        [
                            format!("maps of arity <= {max_arity} checked = {maps_checked}"),
                            "absence of a witness is not a proof of entailment".to_string(),
                        ],
                    ),
                ),
            }
        }
        Verb::Replay { certificates, algebra } => {
            let doc = load(certificates)?;
            let a = match algebra {
                Some(p) => Some(load_algebra(p)?),
                None => doc.algebras.first().cloned(),
            };
            if doc.certificates.is_empty() {
                return Err(Error::InvalidInput("no cert blocks".into()));
            }
            for block in &doc.certificates {
                let c = &block.certificate;
                let replay = c.replay(a.as_ref(), budget)?;
                out.report(
                    &Report::new(format!("certificate {} replays", c.name), Verdict::from_bool(replay.matches)).with_section(
                        "values",
                        [
                            format!("premises = {}", c.premises.len()),
                            format!("steps = {}", replay.steps),
                            format!("compatibility checked = {}", a.is_some()),
                        ],
                    ),
                );
            }
        }
        Verb::Duality { algebra, max_power, arity, partial_relations } => {
            let a = load_algebra(algebra)?;
            if !(1..=3).contains(max_power) {
                return Err(Error::InvalidInput("--max-power must be 1, 2 or 3".into()));
            }
            let start = Instant::now();
            let ego = match partial_relations {
                Some(p) => {
                    let doc = load(p)?;
                    AlterEgo::partial(&a, doc.all_relations(&a)?)?
                }
                None => build_alter_ego(&a, arity.unwrap_or_else(|| arity_bound(&a)), budget)?,
            };
            if *max_power == 3 {
                let cube = (a.size() as u128).pow(3);
                eprintln!(
                    "cost estimate: A^3 has {cube} elements; every subalgebra B of A^3 needs all maps B -> A preserving {} relations",
                    ego.relations().len()
                );
            }
            let report = verify_duality(&a, &ego, *max_power, budget)?;
            for e in &report.reports {
                let mut r = Report::new(
                    format!("e_B is an isomorphism for B = {{{}}} <= A^{}", join(&e.carrier), e.power),
                    Verdict::from_bool(e.bijective),
                );
                r.push_section(
                    "values",
                    [
                        format!("|B| = {}", e.b_size),
                        format!("|B*| = {}", e.hom_count),
                        format!("|B**| = {}", e.double_dual_size),
                        format!("injective = {}", e.injective),
                    ],
                );
                if !e.missing.is_empty() {
                    r.push_section("missing", e.missing.iter().map(|m| join(m)));
                }
                out.report(&r);
            }
            let verdict = Verdict::from_bool(report.passed());
            out.verdict = verdict;
            out.line(format!(
                "DUALITY {verdict} k_max={} relations={}{} time={:.3}s",
                report.max_power,
                report.relations,
                if report.partial { " partial=true" } else { "" },
                start.elapsed().as_secs_f64()
            ));
        }
    }
    Ok(out)
}

/// A subdirectly irreducible quotient of `A^n` with its `𝓗_k` group.
struct Quotient<'a> {
    carrier: &'a [Elem],
    s: FiniteAlgebra,
    f: Homomorphism,
    t_s: TernaryTermOperation,
    hk: adual_core::homgroups::HkGroup,
}

fn for_each_quotient(
    a: &FiniteAlgebra,
    t: &TernaryTermOperation,
    n: usize,
    budget: Budget,
    out: &mut Outcome,
    mut visit: impl FnMut(&Quotient<'_>, &mut Outcome) -> Result<(), Error>,
) -> Result<(), Error> {
    let (an, t_n) = power_and_term(a, t, n, budget)?;
    let q = a.size();
    let mirr = meet_irreducibles(&an, budget)?;
    if mirr.is_empty() {
        out.report(&Report::new(
            format!("{}^{n} has no meet-irreducible subuniverse", a.name()),
            Verdict::Info,
        ));
    }
    for m in &mirr {
        let kt = kernel_quotient(&an, &t_n, m, budget)?;
        let k_map: Vec<Elem> = (0..q as Elem)
            .map(|x| kt.f.apply(adual_core::algebra::encode(q, &vec![x; n])))
            .collect();
        let k = Homomorphism::new(a, &kt.s, k_map)?;
        let hk = build_hk_group(a, &kt.s, t, &kt.t_s, &k, budget)?;
        visit(
            &Quotient {
                carrier: m.carrier(),
                s: kt.s,
                f: kt.f,
                t_s: kt.t_s,
                hk,
            },
            out,
        )?;
    }
    Ok(())
}
