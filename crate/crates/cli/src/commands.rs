//! Subcommand implementations. Each returns the JSON value to print.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use poset_lumping::formats::{
    self, CoefficientsJson, CrestedJson, ErrorJson, GeneralizedJson, GroupJson, MatrixJson,
    MeasureJson, PartitionJson, PosetJson, SpectrumJson, WitnessJson,
};
use poset_lumping::lumping::{
    deletion_lumping, direct_product_partition, generalized_product_partition, lump,
    lumping_violation, reduced_crested_equivalence, ReducedOutcome,
};
use poset_lumping::operator::Measure;
use poset_lumping::poset::Fibering;
use poset_lumping::product::{crested_product, insect_coefficients, insect_operator};
use poset_lumping::search::{classify_lumpings, enumerate_lumpings, is_group_induced};
use poset_lumping::spectral::{tree_spectrum, DEFAULT_GROUPING_TOL};
use poset_lumping::wreath::{orbit_lump, orbits, random_generators, stabilizer_generators};
use poset_lumping::{
    BlockStructure, ElemSet, Error, LumpedChain, MarkovOperator, Partition, Poset, Rational,
    Scalar, TreeInsect,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{ChainCmd, Cli, Command, CrestedInput, GroupCmd, LumpCmd, PosetCmd, SearchCmd, SpectrumArgs};

/// A failed run: the structured error and the process exit code.
pub struct Failure {
    code: u8,
    body: Box<ErrorJson>,
}

impl Failure {
    fn io(context: &str, e: io::Error) -> Self {
        Failure {
            code: 2,
            body: Box::new(ErrorJson {
                error: "Io".into(),
                message: format!("{context}: {e}"),
                witness: None,
            }),
        }
    }

    pub fn report(self) -> ExitCode {
        eprintln!("{}", formats::to_string_pretty(&*self.body));
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_malformed_input() { 2 } else { 1 },
            body: Box::new(ErrorJson::from(&e)),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

pub fn run(cli: &Cli) -> Outcome<()> {
    let value = if cli.float {
        dispatch::<f64>(&cli.command)?
    } else {
        dispatch::<Rational>(&cli.command)?
    };
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(&path.display().to_string(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io("stdout", e)),
    }
}

fn read_text(path: &str) -> Outcome<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::io("stdin", e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::io(path, e))
    }
}

fn read<J: serde::de::DeserializeOwned>(path: &str) -> Outcome<J> {
    let text = read_text(path)?;
    Ok(formats::parse::<J>(&text).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{path}: {m}")),
        other => other,
    })?)
}

fn read_poset(path: &str) -> Outcome<Poset> {
    Ok(read::<PosetJson>(path)?.to_poset()?)
}

fn read_chain<T: Scalar>(path: &str) -> Outcome<MarkovOperator<T>> {
    Ok(read::<MatrixJson>(path)?.to_operator()?)
}

fn read_partition(path: &str) -> Outcome<Partition> {
    Ok(read::<PartitionJson>(path)?.to_partition()?)
}

fn to_value<J: serde::Serialize>(v: &J) -> Value {
    serde_json::to_value(v).expect("format types serialize")
}

fn elem_set(poset: &Poset, elements: &[usize]) -> Outcome<ElemSet> {
    for &e in elements {
        if e == 0 || e > poset.n() {
            return Err(Error::IndexOutOfRange {
                index: e,
                bound: poset.n(),
            }
            .into());
        }
    }
    Ok(elements.iter().copied().collect())
}

fn dispatch<T: Scalar>(command: &Command) -> Outcome<Value> {
    match command {
        Command::Poset(c) => poset_cmd(c),
        Command::Chain(c) => chain_cmd::<T>(c),
        Command::Lump(c) => lump_cmd::<T>(c),
        Command::Spectrum(a) => spectrum_cmd::<T>(a),
        Command::Group(c) => group_cmd::<T>(c),
        Command::Search(c) => search_cmd::<T>(c),
    }
}

fn poset_cmd(command: &PosetCmd) -> Outcome<Value> {
    match command {
        PosetCmd::Check { poset } => {
            let p = read_poset(poset)?;
            Ok(to_value(&PosetJson::from_poset(&p)))
        }
        PosetCmd::Ancestrals { poset } => {
            let family = read_poset(poset)?.ancestral_subsets()?;
            let sets: Vec<Vec<usize>> = family.sets().iter().map(|s| s.to_vec()).collect();
            let covers: Vec<[usize; 2]> = family.covers().iter().map(|&(i, j)| [i, j]).collect();
            Ok(json!({ "sets": sets, "covers": covers }))
        }
        PosetCmd::Antichains { poset } => {
            let all = read_poset(poset)?.antichains()?;
            let sets: Vec<Vec<usize>> = all.iter().map(|s| s.to_vec()).collect();
            Ok(json!({ "antichains": sets }))
        }
        PosetCmd::Fibered { poset, remove } => {
            let p = read_poset(poset)?;
            let removed = elem_set(&p, remove)?;
            Ok(match p.fibered_over(removed)? {
                Fibering::Fibered(w) => {
                    let fibers: serde_json::Map<String, Value> = w
                        .fibers
                        .iter()
                        .map(|(s, r)| (s.to_string(), json!(r.to_vec())))
                        .collect();
                    json!({ "fibered": true, "S": w.base, "fibers": fibers })
                }
                Fibering::NotFibered(reason) => {
                    json!({ "fibered": false, "reason": reason.to_string() })
                }
            })
        }
    }
}

/// The crested product described on the command line.
fn crested_json(input: &CrestedInput) -> Outcome<CrestedJson> {
    match (&input.spec, &input.poset) {
        (Some(path), None) => read::<CrestedJson>(path),
        (None, Some(poset)) => {
            let poset = read::<PosetJson>(poset)?;
            let factors = if input.factors.is_empty() {
                None
            } else {
                Some(
                    input
                        .factors
                        .iter()
                        .map(|f| read::<MatrixJson>(f))
                        .collect::<Outcome<Vec<_>>>()?,
                )
            };
            let sizes = (!input.sizes.is_empty()).then(|| input.sizes.clone());
            Ok(CrestedJson {
                poset,
                factors,
                sizes,
                weights: input.weights.clone(),
            })
        }
        _ => Err(Error::Format("give a crested product file or --poset with --weights".into()).into()),
    }
}

fn chain_cmd<T: Scalar>(command: &ChainCmd) -> Outcome<Value> {
    match command {
        ChainCmd::Crested(input) => {
            let spec = crested_json(input)?.to_spec::<T>()?;
            Ok(to_value(&MatrixJson::from_operator(&crested_product(&spec)?)))
        }
        ChainCmd::Insect { poset, q, coefficients } => {
            let p = read_poset(poset)?;
            if *coefficients {
                let c = insect_coefficients::<T>(&p, *q)?;
                Ok(to_value(&CoefficientsJson::from_coefficients(&c)))
            } else {
                Ok(to_value(&MatrixJson::from_operator(&insect_operator::<T>(&p, *q)?)))
            }
        }
    }
}

fn lumped_value<T: Scalar>(chain: &LumpedChain<T>) -> Value {
    json!({
        "partition": to_value(&PartitionJson::from_partition(&chain.partition)),
        "operator": to_value(&MatrixJson::from_operator(&chain.operator)),
    })
}

fn lump_cmd<T: Scalar>(command: &LumpCmd) -> Outcome<Value> {
    match command {
        LumpCmd::Verify { chain, partition } => {
            let p = read_chain::<T>(chain)?;
            let l = read_partition(partition)?;
            Ok(match lumping_violation(&p, &l)? {
                None => {
                    let lumped = lump(&p, &l)?;
                    json!({ "lumpable": true, "lumped": MatrixJson::from_operator(&lumped.operator).rows })
                }
                Some(w) => json!({ "lumpable": false, "witness": WitnessJson::from(&w) }),
            })
        }
        LumpCmd::Apply { chain, partition } => {
            let p = read_chain::<T>(chain)?;
            let l = read_partition(partition)?;
            Ok(to_value(&MatrixJson::from_operator(&lump(&p, &l)?.operator)))
        }
        LumpCmd::Delete { crested, remove } => {
            let cj = crested_json(crested)?;
            let spec = cj.to_spec::<T>()?;
            let removed = elem_set(spec.poset(), remove)?;
            let lumped = deletion_lumping(&spec, removed)?;
            let mut out = lumped_value(&lumped);
            if let Some(sizes) = &cj.sizes {
                let reduced = match reduced_crested_equivalence(spec.poset(), removed, spec.weights(), sizes)? {
                    ReducedOutcome::Crested { reduced, weights, .. } => json!({
                        "crested": true,
                        "poset": PosetJson::from_poset(&reduced.poset),
                        "labels": reduced.labels,
                        "weights": weights.iter().map(Scalar::to_repr).collect::<Vec<_>>(),
                    }),
                    ReducedOutcome::NotCrested { reason } => json!({
                        "crested": false,
                        "reason": reason.to_string(),
                    }),
                };
                out["reduced"] = reduced;
            }
            Ok(out)
        }
        LumpCmd::Product { crested, parts } => {
            let spec = crested_json(crested)?.to_spec::<T>()?;
            let factors = parts.iter().map(|f| read_partition(f)).collect::<Outcome<Vec<_>>>()?;
            let partition = direct_product_partition(&spec, &factors)?;
            Ok(lumped_value(&lump(&crested_product(&spec)?, &partition)?))
        }
        LumpCmd::Generalized { crested, tables } => {
            let spec = crested_json(crested)?.to_spec::<T>()?;
            let tables = read::<GeneralizedJson>(tables)?.to_spec()?;
            let partition = generalized_product_partition(&tables, &spec)?;
            Ok(lumped_value(&lump(&crested_product(&spec)?, &partition)?))
        }
        LumpCmd::Orbit { chain, group } => {
            let p = read_chain::<T>(chain)?;
            let g = read::<GroupJson>(group)?;
            let structure = g.structure()?;
            let gens = g.to_generators(&structure)?;
            Ok(lumped_value(&orbit_lump(&p, &structure, &gens)?))
        }
    }
}

/// `(q, n)` when `p` is exactly the Insect chain of the depth-`n` `q`-ary tree.
fn recognize_tree<T: Scalar>(p: &MarkovOperator<T>) -> Outcome<Option<(usize, usize)>> {
    let dim = p.dim();
    for q in 2..=dim {
        let mut n = 1;
        let mut size = q;
        while size < dim {
            size *= q;
            n += 1;
        }
        if size != dim {
            continue;
        }
        let tree = TreeInsect::new(q, n)?;
        let same = (0..dim).all(|x| {
            (0..dim).all(|y| T::parse_repr(&tree.operator().entry(x, y).to_repr())
                .is_some_and(|v| v.approx_eq(p.entry(x, y))))
        });
        if same {
            return Ok(Some((q, n)));
        }
    }
    Ok(None)
}

fn spectrum_cmd<T: Scalar>(args: &SpectrumArgs) -> Outcome<Value> {
    let p = read_chain::<T>(&args.chain)?;
    let pi: Measure<T> = match &args.measure {
        Some(path) => read::<MeasureJson>(path)?.to_measure()?,
        None => {
            let uniform = Measure::uniform(p.dim());
            if p.detailed_balance(&uniform)? {
                uniform
            } else {
                p.stationary_distribution()?
            }
        }
    };
    let numeric = p.spectrum(&pi)?;
    if !args.exact_check {
        return Ok(to_value(&SpectrumJson::from_spectrum(&numeric)));
    }
    match recognize_tree(&p)? {
        Some((q, n)) => {
            let exact = tree_spectrum(q, n)?;
            if !exact.matches(&numeric, DEFAULT_GROUPING_TOL) {
                return Err(Error::ConstructionMismatch(format!(
                    "numeric spectrum differs from the closed form for q={q}, n={n}"
                ))
                .into());
            }
            let mut out = to_value(&SpectrumJson::from_spectrum(&exact));
            out["closed_form"] = json!({ "family": "tree", "q": q, "n": n, "matches": true });
            Ok(out)
        }
        None => {
            let mut out = to_value(&SpectrumJson::from_spectrum(&numeric));
            out["closed_form"] = Value::Null;
            Ok(out)
        }
    }
}

fn group_cmd<T: Scalar>(command: &GroupCmd) -> Outcome<Value> {
    match command {
        GroupCmd::Orbits { group } => {
            let g = read::<GroupJson>(group)?;
            let structure = g.structure()?;
            let gens = g.to_generators(&structure)?;
            let orbit = orbits(&structure, &gens)?;
            Ok(to_value(&PartitionJson::from_partition(&orbit.partition)))
        }
        GroupCmd::Reconstruct { partition, q, n } => {
            let tree = TreeInsect::new(*q, *n)?;
            let l = read_partition(partition)?;
            let gens = tree.reconstruct_group(&l)?;
            Ok(to_value(&GroupJson::from_generators(tree.structure(), &gens)))
        }
        GroupCmd::Induced {
            poset,
            partition,
            q,
            chain,
            cap,
        } => {
            let p = read_poset(poset)?;
            let l = read_partition(partition)?;
            let op = match chain {
                Some(path) => read_chain::<T>(path)?,
                None => insect_operator::<T>(&p, *q)?,
            };
            let structure = BlockStructure::uniform(p, *q)?;
            let report = is_group_induced(&op, &l, &structure, *cap)?;
            Ok(json!({
                "induced": report.induced,
                "stabilizer_order": report.stabilizer_order,
                "stabilizer_orbits": PartitionJson::from_partition(&report.stabilizer_orbits),
            }))
        }
        GroupCmd::Random {
            poset,
            q,
            count,
            seed,
            stabilizer,
        } => {
            let structure = BlockStructure::uniform(read_poset(poset)?, *q)?;
            let gens = match stabilizer {
                Some(x0) => stabilizer_generators(&structure, *x0)?,
                None => random_generators(&structure, *count, &mut ChaCha8Rng::seed_from_u64(*seed)),
            };
            Ok(to_value(&GroupJson::from_generators(&structure, &gens)))
        }
    }
}

fn search_cmd<T: Scalar>(command: &SearchCmd) -> Outcome<Value> {
    match command {
        SearchCmd::Lumpings {
            chain,
            cap,
            poset,
            q,
            group_induced_only,
            not_group_induced,
            group_cap,
        } => {
            let p = read_chain::<T>(chain)?;
            let (Some(poset), Some(q)) = (poset, q) else {
                let all = enumerate_lumpings(&p, *cap)?;
                let parts: Vec<PartitionJson> = all.iter().map(PartitionJson::from_partition).collect();
                return Ok(json!({ "count": parts.len(), "lumpings": parts }));
            };
            let structure = BlockStructure::uniform(read_poset(poset)?, *q)?;
            let classified = classify_lumpings(&p, &structure, *cap, *group_cap)?;
            let induced = classified.iter().filter(|(_, r)| r.induced).count();
            let total = classified.len();
            let lumpings: Vec<Value> = classified
                .iter()
                .filter(|(_, r)| (!group_induced_only || r.induced) && (!not_group_induced || !r.induced))
                .map(|(l, r)| {
                    json!({
                        "dim": l.dim(),
                        "parts": l.parts(),
                        "group_induced": r.induced,
                        "stabilizer_order": r.stabilizer_order,
                    })
                })
                .collect();
            Ok(json!({
                "count": total,
                "group_induced": induced,
                "not_group_induced": total - induced,
                "lumpings": lumpings,
            }))
        }
    }
}
