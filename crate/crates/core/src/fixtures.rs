//! Bundled reference rows: four published families of worked examples plus two
//! counterexample rows, embedded as CSV so golden tests and the `tables`
//! command need no network.

use std::fmt;
use std::sync::OnceLock;

const RAW: &str = include_str!("../data/reference_tables.csv");

/// Which reference set a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixtureSet {
    /// Congruent members of the q = 7 (mod 8) family (t = 3).
    T1,
    /// Certified non-congruent members of the q = 7 (mod 8) family (t = 3).
    T2,
    /// Congruent members of the q = 3 (mod 8) family (t = 2).
    T3,
    /// Certified non-congruent members of the q = 3 (mod 8) family (t = 2).
    T4,
    /// Non-congruent members on which the criteria are inconclusive.
    Extra,
}

impl fmt::Display for FixtureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureSet::T1 => write!(f, "t1"),
            FixtureSet::T2 => write!(f, "t2"),
            FixtureSet::T3 => write!(f, "t3"),
            FixtureSet::T4 => write!(f, "t4"),
            FixtureSet::Extra => write!(f, "extra"),
        }
    }
}

/// One transcribed reference row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureRow {
    pub set: FixtureSet,
    pub n: u64,
    pub q: u64,
    pub p_primes: Vec<u64>,
    pub h_n: u64,
    pub h_p: Option<u64>,
    pub congruent: bool,
}

impl FixtureRow {
    pub fn p(&self) -> u64 {
        self.p_primes.iter().product()
    }

    pub fn t(&self) -> usize {
        self.p_primes.len()
    }
}

/// All 42 reference rows, parsed once from the embedded CSV.
pub fn rows() -> &'static [FixtureRow] {
    static ROWS: OnceLock<Vec<FixtureRow>> = OnceLock::new();
    ROWS.get_or_init(|| RAW.lines().filter_map(parse_line).collect())
}

/// The rows of one set, in file order (ascending n within each set).
pub fn rows_in(set: FixtureSet) -> Vec<&'static FixtureRow> {
    rows().iter().filter(|r| r.set == set).collect()
}

fn parse_line(line: &str) -> Option<FixtureRow> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') || line.starts_with("set,") {
        return None;
    }
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields.len(), 7, "malformed fixture line: {line}");
    let set = match fields[0] {
        "t1" => FixtureSet::T1,
        "t2" => FixtureSet::T2,
        "t3" => FixtureSet::T3,
        "t4" => FixtureSet::T4,
        "extra" => FixtureSet::Extra,
        other => panic!("unknown fixture set {other}"),
    };
    let p_primes: Vec<u64> = fields[3]
        .split('*')
        .map(|s| s.parse().expect("prime"))
        .collect();
    Some(FixtureRow {
        set,
        n: fields[1].parse().expect("n"),
        q: fields[2].parse().expect("q"),
        p_primes,
        h_n: fields[4].parse().expect("h_n"),
        h_p: if fields[5].is_empty() { None } else { Some(fields[5].parse().expect("h_P")) },
        congruent: fields[6] == "true",
    })
}
