//! Generalisation hierarchies and the lattice of generalisation levels.
//!
//! A hierarchy with `h` levels maps every raw value to a token per level:
//! level 0 is the value itself and level `h - 1` is a single constant token.
//! Coarsening is monotone: values that share a token at some level share
//! tokens at every coarser level.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rule {
    /// Tokens for levels `1..h` keyed by raw value.
    Table(BTreeMap<String, Vec<String>>),
    /// Integer years bucketed into intervals aligned to multiples of each
    /// width, then `*`.
    YearIntervals { widths: Vec<i64> },
    /// Fixed-length digit strings masked from the right, one digit per level.
    DigitMask { digits: usize },
    /// Any value, then `*`.
    Suppress,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    attribute: String,
    levels: usize,
    rule: Rule,
}

impl Hierarchy {
    /// Builds a hierarchy from mapping rows `[raw, level1, .., level(h-1)]`.
    pub fn table(attribute: impl Into<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        let attribute = attribute.into();
        let h = rows
            .first()
            .map(|r| r.len())
            .ok_or_else(|| Error::Hierarchy(format!("`{attribute}` has no values")))?;
        if h == 0 {
            return Err(Error::Hierarchy(format!("`{attribute}` has zero levels")));
        }
        let mut map = BTreeMap::new();
        for row in rows {
            if row.len() != h {
                return Err(Error::Hierarchy(format!(
                    "`{attribute}`: row for `{}` has {} levels, expected {h}",
                    row.first().map(String::as_str).unwrap_or(""),
                    row.len()
                )));
            }
            let mut it = row.into_iter();
            let raw = it.next().unwrap();
            if map.insert(raw.clone(), it.collect::<Vec<_>>()).is_some() {
                return Err(Error::Hierarchy(format!(
                    "`{attribute}`: value `{raw}` listed twice"
                )));
            }
        }
        let hier = Hierarchy {
            attribute,
            levels: h,
            rule: Rule::Table(map),
        };
        hier.check_table()?;
        Ok(hier)
    }

    fn check_table(&self) -> Result<()> {
        let Rule::Table(map) = &self.rule else {
            return Ok(());
        };
        let h = self.levels;
        if h >= 2 {
            let mut tops = map.values().map(|t| &t[h - 2]);
            let first = tops.next();
            if tops.any(|t| Some(t) != first) {
                return Err(Error::Hierarchy(format!(
                    "`{}`: top level is not a single token",
                    self.attribute
                )));
            }
        }
        // monotone coarsening: a token at level l determines the token at l+1
        for l in 0..h.saturating_sub(1) {
            let mut parent: HashMap<String, &str> = HashMap::new();
            for (raw, tokens) in map {
                let here = if l == 0 { raw.clone() } else { tokens[l - 1].clone() };
                let up = tokens[l].as_str();
                if let Some(prev) = parent.insert(here.clone(), up) {
                    if prev != up {
                        return Err(Error::Hierarchy(format!(
                            "`{}`: token `{here}` at level {l} maps to both `{prev}` and `{up}` at level {}",
                            self.attribute,
                            l + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Year of birth: value, then intervals of each width, then `*`.
    pub fn year_intervals(attribute: impl Into<String>, widths: Vec<i64>) -> Result<Self> {
        let attribute = attribute.into();
        if widths.iter().any(|&w| w < 1) {
            return Err(Error::Hierarchy("interval widths must be positive".into()));
        }
        if widths.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Hierarchy(
                "each interval width must divide the next one".into(),
            ));
        }
        Ok(Hierarchy {
            attribute,
            levels: widths.len() + 2,
            rule: Rule::YearIntervals { widths },
        })
    }

    /// Digit strings of length `digits`: `h = digits + 1` levels.
    pub fn digit_mask(attribute: impl Into<String>, digits: usize) -> Self {
        Hierarchy {
            attribute: attribute.into(),
            levels: digits + 1,
            rule: Rule::DigitMask { digits },
        }
    }

    /// Two levels: value, `*`.
    pub fn suppress(attribute: impl Into<String>) -> Self {
        Hierarchy {
            attribute: attribute.into(),
            levels: 2,
            rule: Rule::Suppress,
        }
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Same rule bound to another column name.
    pub fn renamed(&self, attribute: impl Into<String>) -> Self {
        Hierarchy {
            attribute: attribute.into(),
            ..self.clone()
        }
    }

    /// Raw values of a table hierarchy; `None` for rule-based ones.
    pub fn domain(&self) -> Option<Vec<&str>> {
        match &self.rule {
            Rule::Table(map) => Some(map.keys().map(String::as_str).collect()),
            _ => None,
        }
    }

    pub fn generalise(&self, value: &str, level: usize) -> Result<String> {
        if level >= self.levels {
            return Err(Error::LevelRange {
                level,
                levels: self.levels,
            });
        }
        let unknown = || {
            Error::Domain(format!(
                "`{value}` is not in the domain of hierarchy `{}`",
                self.attribute
            ))
        };
        match &self.rule {
            Rule::Table(map) => {
                let tokens = map.get(value).ok_or_else(unknown)?;
                Ok(if level == 0 {
                    value.to_string()
                } else {
                    tokens[level - 1].clone()
                })
            }
            Rule::YearIntervals { widths } => {
                let year = parse_year(value).ok_or_else(unknown)?;
                Ok(match level {
                    0 => value.to_string(),
                    l if l <= widths.len() => {
                        let w = widths[l - 1];
                        let lo = year.div_euclid(w) * w;
                        format!("[{}-{}]", lo, lo + w - 1)
                    }
                    _ => "*".to_string(),
                })
            }
            Rule::DigitMask { digits } => {
                if value.chars().count() != *digits || !value.chars().all(|c| c.is_ascii_digit()) {
                    return Err(unknown());
                }
                let keep = digits - level;
                Ok(value.chars().take(keep).chain(std::iter::repeat_n('*', level)).collect())
            }
            Rule::Suppress => {
                if value.is_empty() {
                    return Err(unknown());
                }
                Ok(if level == 0 { value.to_string() } else { "*".to_string() })
            }
        }
    }

    pub fn contains(&self, value: &str) -> bool {
        self.generalise(value, 0).is_ok()
    }

    pub fn description(&self) -> String {
        match &self.rule {
            Rule::Table(map) => format!("table with {} values", map.len()),
            Rule::YearIntervals { widths } => {
                let parts: Vec<String> = widths.iter().map(|w| format!("{w}-yr interval")).collect();
                format!("value, {}, *", parts.join(", "))
            }
            Rule::DigitMask { digits } => format!("{digits}-digit code masked from the right"),
            Rule::Suppress => "value, *".to_string(),
        }
    }
}

fn parse_year(value: &str) -> Option<i64> {
    let v = value.trim();
    if let Ok(y) = v.parse::<i64>() {
        return Some(y);
    }
    let f = v.parse::<f64>().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 1e15).then_some(f as i64)
}

/// Reads a hierarchy file: a header whose first cell names the attribute and
/// has one cell per level, then one row per raw value with the level-0 ..
/// level-(h-1) tokens.
pub fn read_hierarchy<R: Read>(reader: R) -> Result<Hierarchy> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let attribute = header
        .get(0)
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::Hierarchy("header does not name the attribute".into()))?;
    let h = header.len();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Hierarchy(format!("row {}: {e}", i + 1)))?;
        if rec.len() != h {
            return Err(Error::Hierarchy(format!(
                "row {} has {} cells, header has {h}",
                i + 1,
                rec.len()
            )));
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Hierarchy::table(attribute, rows)
}

pub fn load_hierarchy(path: impl AsRef<Path>) -> Result<Hierarchy> {
    read_hierarchy(std::fs::File::open(path)?)
}

/// Built-in hierarchies keyed by name: `year_of_birth` (5 levels), `gender`
/// (2), `race` (2), `marital_status` (3) and `zip` (6).
pub fn builtin_hierarchies() -> BTreeMap<String, Hierarchy> {
    let mut out = BTreeMap::new();
    out.insert(
        "year_of_birth".to_string(),
        Hierarchy::year_intervals("year_of_birth", vec![2, 4, 8]).expect("valid widths"),
    );
    let gender = ["Male", "Female"]
        .iter()
        .map(|v| vec![v.to_string(), "Person".to_string()])
        .collect();
    out.insert(
        "gender".to_string(),
        Hierarchy::table("gender", gender).expect("valid table"),
    );
    out.insert("race".to_string(), Hierarchy::suppress("race"));

    // Adult census spellings plus plain ones.
    let in_marriage = [
        "Married",
        "Married-civ-spouse",
        "Married-AF-spouse",
        "Married-spouse-absent",
    ];
    let alone = ["Single", "Never-married", "Divorced", "Separated", "Widowed"];
    let marital = in_marriage
        .iter()
        .map(|v| (v, "In marriage"))
        .chain(alone.iter().map(|v| (v, "Alone")))
        .map(|(v, g)| vec![v.to_string(), g.to_string(), "*".to_string()])
        .collect();
    out.insert(
        "marital_status".to_string(),
        Hierarchy::table("marital_status", marital).expect("valid table"),
    );
    out.insert("zip".to_string(), Hierarchy::digit_mask("zip", 5));
    out
}

pub fn builtin(name: &str) -> Option<Hierarchy> {
    builtin_hierarchies().remove(name)
}

/// A point in the generalisation lattice: one level per k-quasi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeNode {
    pub levels: Vec<usize>,
}

impl LatticeNode {
    pub fn new(levels: Vec<usize>) -> Self {
        LatticeNode { levels }
    }

    pub fn height(&self) -> usize {
        self.levels.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn generalised_by(&self, other: &LatticeNode) -> bool {
        self.levels.len() == other.levels.len()
            && self.levels.iter().zip(&other.levels).all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    level_counts: Vec<usize>,
}

impl Lattice {
    pub fn new(level_counts: Vec<usize>) -> Result<Self> {
        if level_counts.is_empty() {
            return Err(Error::Parameter("lattice needs at least one attribute".into()));
        }
        if level_counts.contains(&0) {
            return Err(Error::Parameter("every hierarchy needs at least one level".into()));
        }
        Ok(Lattice { level_counts })
    }

    pub fn from_hierarchies(hiers: &[Hierarchy]) -> Result<Self> {
        Self::new(hiers.iter().map(Hierarchy::levels).collect())
    }

    pub fn level_counts(&self) -> &[usize] {
        &self.level_counts
    }

    pub fn size(&self) -> usize {
        self.level_counts.iter().product()
    }

    pub fn bottom(&self) -> LatticeNode {
        LatticeNode::new(vec![0; self.level_counts.len()])
    }

    pub fn top(&self) -> LatticeNode {
        LatticeNode::new(self.level_counts.iter().map(|h| h - 1).collect())
    }

    pub fn max_height(&self) -> usize {
        self.top().height()
    }

    /// Nodes `n` with `lo <= n <= hi` and `n.height() == height`, in
    /// lexicographic order.
    pub fn nodes_between(&self, lo: &LatticeNode, hi: &LatticeNode, height: usize) -> Vec<LatticeNode> {
        fn rec(a: usize, lo: &[usize], hi: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<LatticeNode>) {
            if a == lo.len() {
                if left == 0 {
                    out.push(LatticeNode::new(cur.clone()));
                }
                return;
            }
            let rest_max: usize = hi[a + 1..].iter().zip(&lo[a + 1..]).map(|(h, l)| h - l).sum();
            for v in lo[a]..=hi[a] {
                let used = v - lo[a];
                if used > left {
                    break;
                }
                if left - used > rest_max {
                    continue;
                }
                cur.push(v);
                rec(a + 1, lo, hi, left - used, cur, out);
                cur.pop();
            }
        }
        let base = lo.height();
        let mut out = Vec::new();
        if height < base || !lo.generalised_by(hi) {
            return out;
        }
        rec(0, &lo.levels, &hi.levels, height - base, &mut Vec::new(), &mut out);
        out
    }

    /// All nodes grouped by height `0..=max_height`.
    pub fn nodes_by_height(&self) -> Vec<Vec<LatticeNode>> {
        let (b, t) = (self.bottom(), self.top());
        (0..=self.max_height())
            .map(|h| self.nodes_between(&b, &t, h))
            .collect()
    }
}

pub fn lattice_enumerate(hiers: &[Hierarchy]) -> Result<Vec<Vec<LatticeNode>>> {
    Ok(Lattice::from_hierarchies(hiers)?.nodes_by_height())
}
