#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use num_rational::Ratio;
use rand::Rng;

use keps::dataset::{AttributeClassification, Column, Dataset, Role, Schema, Value};
use keps::hierarchy::{Hierarchy, LatticeNode};
use keps::pipeline::{self, Prepared, RunConfig};
use keps::synth::{self, AnthropometricModel, Measure};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn adult_config() -> RunConfig {
    RunConfig::load(data_dir().join("adult.toml")).expect("adult config")
}

pub fn adult_prepared() -> Prepared<f64> {
    pipeline::prepare(&adult_config()).expect("adult data")
}

/// `n` people with integer ages 18..80, a sex and a synthetic height.
pub fn synthetic_people(n: usize, seed: u64) -> (Dataset<f64>, AttributeClassification) {
    let mut rng = keps::rng::stream(seed, keps::rng::Purpose::Baseline, 0);
    let schema = Schema::new(vec![Column::numeric("age"), Column::categorical("sex")]).unwrap();
    let rows = (0..n)
        .map(|_| {
            let sex = if rng.random_bool(0.5) { "Male" } else { "Female" };
            vec![Value::Num(rng.random_range(18..80) as f64), Value::Text(sex.into())]
        })
        .collect();
    let ds = Dataset::new(schema, rows).unwrap();
    let model = AnthropometricModel::plausible_defaults();
    let ds = synth::augment_dataset(&ds, &model, "age", "sex", &[Measure::Height], seed).unwrap();
    let cls = AttributeClassification::new()
        .with("age", Role::KQuasi)
        .with("sex", Role::KQuasi)
        .with("height", Role::EpsQuasi);
    (ds, cls)
}

pub fn sex_order() -> BTreeMap<String, Vec<String>> {
    let mut m = BTreeMap::new();
    m.insert("sex".to_string(), vec!["Female".to_string(), "Male".to_string()]);
    m
}

/// A small random OLA instance. `tokens[a][v][l]` is the level-`l` token of
/// raw value `v` of attribute `a`, kept for an independent oracle.
pub struct OlaInstance {
    pub ds: Dataset<f64>,
    pub cls: AttributeClassification,
    pub hierarchies: Vec<Hierarchy>,
    pub tokens: Vec<Vec<Vec<String>>>,
    pub values: Vec<Vec<usize>>,
    pub k: usize,
}

pub fn random_ola_instance<R: Rng>(rng: &mut R, k: usize) -> OlaInstance {
    let attrs = rng.random_range(1..=4);
    let mut hierarchies = Vec::new();
    let mut tokens = Vec::new();
    for a in 0..attrs {
        let h = rng.random_range(1..=4);
        let d = rng.random_range(1..=6);
        let mut ids: Vec<usize> = (0..d).collect();
        let mut per_value: Vec<Vec<String>> = (0..d).map(|v| vec![format!("a{a}v{v}")]).collect();
        let mut groups = d;
        for l in 1..h {
            if l == h - 1 {
                per_value.iter_mut().for_each(|t| t.push("*".into()));
                continue;
            }
            let g = rng.random_range(1..=groups);
            let parent: Vec<usize> = (0..groups).map(|_| rng.random_range(0..g)).collect();
            ids = ids.iter().map(|&i| parent[i]).collect();
            for (v, t) in per_value.iter_mut().enumerate() {
                t.push(format!("a{a}l{l}g{}", ids[v]));
            }
            groups = g;
        }
        let hier = Hierarchy::table(format!("q{a}"), per_value.clone()).expect("valid random table");
        hierarchies.push(hier);
        tokens.push(per_value);
    }
    let n = rng.random_range(k.max(1)..=200);
    let skew: Vec<f64> = (0..attrs).map(|_| rng.random_range(0.0..1.0)).collect();
    let values: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            (0..attrs)
                .map(|a| {
                    let d = tokens[a].len();
                    if rng.random_bool(skew[a]) {
                        0
                    } else {
                        rng.random_range(0..d)
                    }
                })
                .collect()
        })
        .collect();
    let mut cols: Vec<Column> = (0..attrs).map(|a| Column::categorical(format!("q{a}"))).collect();
    cols.push(Column::numeric("x"));
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Value<f64>> = r
                .iter()
                .enumerate()
                .map(|(a, &v)| Value::Text(tokens[a][v][0].clone()))
                .collect();
            row.push(Value::Num(100.0 + i as f64));
            row
        })
        .collect();
    let ds = Dataset::new(Schema::new(cols).unwrap(), rows).unwrap();
    let mut cls = AttributeClassification::new().with("x", Role::EpsQuasi);
    for a in 0..attrs {
        cls.set(format!("q{a}"), Role::KQuasi);
    }
    OlaInstance {
        ds,
        cls,
        hierarchies,
        tokens,
        values,
        k,
    }
}

/// Exhaustive search: every node, exact loss, ties by height then levels.
/// The budget is given in percent so feasibility is an exact integer test.
pub fn exhaustive_ola(inst: &OlaInstance, budget_pct: u64) -> Option<LatticeNode> {
    let counts: Vec<usize> = inst.tokens.iter().map(|t| t[0].len()).collect();
    let n = inst.values.len() as u64;
    let mut best: Option<(Ratio<u64>, usize, Vec<usize>)> = None;
    let mut node = vec![0usize; counts.len()];
    loop {
        let mut groups: HashMap<Vec<&str>, u64> = HashMap::new();
        for r in &inst.values {
            let key: Vec<&str> = r
                .iter()
                .enumerate()
                .map(|(a, &v)| inst.tokens[a][v][node[a]].as_str())
                .collect();
            *groups.entry(key).or_insert(0) += 1;
        }
        let suppressed: u64 = groups.values().filter(|&&m| m < inst.k as u64).sum();
        if suppressed * 100 <= budget_pct * n {
            let mut loss = Ratio::from_integer(0u64);
            for (a, &l) in node.iter().enumerate() {
                if counts[a] >= 2 {
                    loss += Ratio::new(l as u64, counts[a] as u64 - 1);
                }
            }
            loss /= Ratio::from_integer(counts.len() as u64);
            let height: usize = node.iter().sum();
            let cand = (loss, height, node.clone());
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        let mut a = 0;
        loop {
            if a == node.len() {
                return best.map(|b| LatticeNode::new(b.2));
            }
            node[a] += 1;
            if node[a] < counts[a] {
                break;
            }
            node[a] = 0;
            a += 1;
        }
    }
}
