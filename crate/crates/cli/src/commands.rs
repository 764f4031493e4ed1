use std::fs;
use std::io::Read;
use std::path::Path;

use blowup_core::io::{
    self, ForestFile, PartitionFile, ReportFile, StepFile, TensorFile, TraceFile, WitnessFile,
};
use blowup_core::{
    automorphism_orbits, canonical_form_forest, canonical_form_tensor, contract, final_set,
    forest_automorphism_orbits, forest_isomorphic, marked_forest_equivalent, marked_tensor_equivalent,
    partition_compatible_morphism, partition_compatible_sequence, random_forest, random_forest_arbitrary,
    recover_all_orders, recover_sequence, tensor_equivalent, tensor_from_forest, Error, IntersectionTensor,
    MarkedPartition, ProximityForest,
};
use serde_json::{json, Value};

use crate::{Command, Kind};

pub struct Output {
    pub json: String,
    /// Answer of a yes/no command, for `--exit-status`.
    pub decision: Option<bool>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::SearchLimit(_) | Error::LimitExceeded(_)) => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let (code, message) = match self {
            CliError::Core(e) => (e.code(), e.to_string()),
            CliError::Io(m) => ("io", m.clone()),
        };
        io::to_json(&json!({ "error": { "code": code, "message": message } }))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn forest(path: &Path) -> Result<ProximityForest> {
    Ok(io::parse_forest(&read(path)?)?)
}

fn tensor(path: &Path) -> Result<IntersectionTensor> {
    Ok(io::parse_tensor(&read(path)?)?)
}

fn partition(path: &Path, size: usize) -> Result<MarkedPartition> {
    Ok(io::parse_partition(&read(path)?, size)?)
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("file types serialize")
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn blocks_json(p: &MarkedPartition) -> Value {
    value(&PartitionFile::from_partition(p).blocks)
}

fn answer(v: Value) -> Output {
    Output { json: io::to_json(&v), decision: None }
}

fn decision(v: Value, yes: bool) -> Output {
    Output { json: io::to_json(&v), decision: Some(yes) }
}

pub fn run(command: Command) -> Result<Output> {
    match command {
        Command::Tensor { forest: path, strict } => {
            let f = forest(&path)?;
            if strict {
                let report = f.validate(true);
                if !report.ok {
                    return Err(Error::InvalidForest(report.violations).into());
                }
            }
            Ok(answer(value(&TensorFile::from_tensor(&tensor_from_forest(&f)?))))
        }
        Command::Finals { tensor: path } => {
            let t = tensor(&path)?;
            Ok(answer(json!({ "finals": one_based(&final_set(&t)) })))
        }
        Command::Contract { tensor: path, index } => {
            let t = tensor(&path)?;
            let i = index
                .checked_sub(1)
                .filter(|&i| i < t.size())
                .ok_or(Error::IndexOutOfRange { index, size: t.size() })?;
            let (next, step) = contract(&t, i)?;
            let step = StepFile {
                contracted: step.contracted + 1,
                degree: step.degree,
                proximate_to_current: step.proximate_to_current.iter().map(|j| j + 1).collect(),
            };
            Ok(answer(json!({ "step": value(&step), "tensor": value(&TensorFile::from_tensor(&next)) })))
        }
        Command::Recover { tensor: path, trace } => {
            let t = tensor(&path)?;
            let (f, steps) = recover_sequence(&t)?;
            if let Some(out) = trace {
                fs::write(&out, io::to_json(&TraceFile::from_trace(&steps)))
                    .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            }
            Ok(answer(value(&ForestFile::from_forest(&f))))
        }
        Command::RecoverAll { tensor: path, limit } => {
            let t = tensor(&path)?;
            let runs = recover_all_orders(&t, limit)?;
            let mut isomorphic = true;
            for (g, _) in runs.iter().skip(1) {
                isomorphic &= forest_isomorphic(&runs[0].0, g)?.is_some();
            }
            let orders: Vec<Value> = runs
                .iter()
                .map(|(f, tr)| json!({ "forest": value(&ForestFile::from_forest(f)), "trace": value(&TraceFile::from_trace(tr)) }))
                .collect();
            Ok(answer(json!({ "count": runs.len(), "isomorphic": isomorphic, "orders": orders })))
        }
        Command::Equiv { a, b, kind, partition_a, partition_b, .. } => {
            let found = match (kind.kind, partition_a.zip(partition_b)) {
                (Kind::Forest, None) => forest_isomorphic(&forest(&a)?, &forest(&b)?)?,
                (Kind::Tensor, None) => tensor_equivalent(&tensor(&a)?, &tensor(&b)?)?,
                (Kind::Forest, Some((pa, pb))) => {
                    let (fa, fb) = (forest(&a)?, forest(&b)?);
                    let (qa, qb) = (partition(&pa, fa.len())?, partition(&pb, fb.len())?);
                    marked_forest_equivalent(&fa, &qa, &fb, &qb)?
                }
                (Kind::Tensor, Some((pa, pb))) => {
                    let (ta, tb) = (tensor(&a)?, tensor(&b)?);
                    let (qa, qb) = (partition(&pa, ta.size())?, partition(&pb, tb.size())?);
                    marked_tensor_equivalent(&ta, &qa, &tb, &qb)?
                }
            };
            Ok(decision(value(&WitnessFile::from_result(found.as_ref())), found.is_some()))
        }
        Command::Canon { input, kind } => match kind.kind {
            Kind::Forest => {
                let c = canonical_form_forest(&forest(&input)?)?;
                Ok(answer(json!({
                    "hash": c.hash,
                    "kind": "forest",
                    "labeling": one_based(c.labeling.as_slice()),
                    "object": value(&ForestFile::from_forest(&c.object)),
                })))
            }
            Kind::Tensor => {
                let c = canonical_form_tensor(&tensor(&input)?)?;
                Ok(answer(json!({
                    "hash": c.hash,
                    "kind": "tensor",
                    "labeling": one_based(c.labeling.as_slice()),
                    "object": value(&TensorFile::from_tensor(&c.object)),
                })))
            }
        },
        Command::Orbits { input, kind } => {
            let orbits = match kind.kind {
                Kind::Forest => forest_automorphism_orbits(&forest(&input)?)?,
                Kind::Tensor => automorphism_orbits(&tensor(&input)?)?,
            };
            Ok(answer(json!({ "orbits": blocks_json(&orbits) })))
        }
        Command::Compat { input, partition: p, kind, .. } => {
            let ok = match kind.kind {
                Kind::Forest => {
                    let f = forest(&input)?;
                    partition_compatible_sequence(&f, &partition(&p, f.len())?)?
                }
                Kind::Tensor => {
                    let t = tensor(&input)?;
                    partition_compatible_morphism(&t, &partition(&p, t.size())?)?
                }
            };
            Ok(decision(json!({ "compatible": ok }), ok))
        }
        Command::Quotient { tensor: path, partition: p } => {
            let t = tensor(&path)?;
            let q = t.quotient(&partition(&p, t.size())?)?;
            Ok(answer(value(&TensorFile::from_tensor(&q))))
        }
        Command::Diag { tensor: path } => Ok(answer(json!({ "diagonal": tensor(&path)?.diagonal() }))),
        Command::Validate { forest: path, strict, .. } => {
            let report = forest(&path)?.validate(strict);
            Ok(decision(value(&ReportFile::from_report(&report)), report.ok))
        }
        Command::Gen { dim, points, seed, max_degree, arbitrary } => {
            let f = if arbitrary {
                random_forest_arbitrary(seed, dim, points, max_degree)?
            } else {
                random_forest(seed, dim, points, max_degree)?
            };
            Ok(answer(value(&ForestFile::from_forest(&f))))
        }
    }
}
