//! Listening-test ratings and MOS aggregation.
//!
//! Warmth pools the friendliness and likability scores of a system into one
//! mean; competence is the mean skilfulness score. Pooling weights each
//! rating equally, so with unequal scale counts the result differs from the
//! mean of the two per-scale means.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantize::ClassId;

pub const RATINGS_HEADER: [&str; 6] = ["listener_id", "stimulus_id", "system", "class_id", "scale", "score"];

/// Systems in reporting order; other names sort after these.
pub const KNOWN_SYSTEMS: [&str; 7] = ["baseline", "f1", "f2", "flux", "warmth_combo", "slope", "comp_combo"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Friendliness,
    Likability,
    Skilfulness,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "friendliness" => Ok(Scale::Friendliness),
            "likability" | "likeability" => Ok(Scale::Likability),
            "skilfulness" | "skillfulness" => Ok(Scale::Skilfulness),
            other => Err(format!("unknown scale '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Warmth,
    Competence,
}

impl Dimension {
    pub fn scales(self) -> &'static [Scale] {
        match self {
            Dimension::Warmth => &[Scale::Friendliness, Scale::Likability],
            Dimension::Competence => &[Scale::Skilfulness],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Warmth => "warmth",
            Dimension::Competence => "competence",
        })
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "warmth" => Ok(Dimension::Warmth),
            "competence" => Ok(Dimension::Competence),
            other => Err(format!("unknown dimension '{other}' (warmth or competence)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub listener_id: String,
    pub stimulus_id: String,
    pub system: String,
    pub class_id: ClassId,
    pub scale: Scale,
    /// Likert score, 1 to 5.
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ratings {
    pub records: Vec<RatingRecord>,
    pub rejected: Vec<RejectedRow>,
}

/// Reads a ratings CSV. Invalid rows are rejected with their line numbers;
/// the whole file fails when more than half the rows are rejected.
pub fn load_ratings(path: impl AsRef<Path>) -> Result<Ratings> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ratings(&text, path)
}

pub fn parse_ratings(text: &str, path: &Path) -> Result<Ratings> {
    if text.trim().is_empty() {
        return Err(Error::NoRatings(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Row {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })?;
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Row {
            path: path.to_path_buf(),
            line: 1,
            message: format!("header lacks column '{name}'"),
        })
    };
    let idx: Vec<usize> = RATINGS_HEADER.iter().map(|c| column(c)).collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for row in reader.records() {
        let (line, parsed) = match row {
            Ok(r) => {
                let line = r.position().map_or(0, |p| p.line() as usize);
                (line, parse_row(&r, &idx))
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                (line, Err(e.to_string()))
            }
        };
        match parsed {
            Ok(rec) => records.push(rec),
            Err(reason) => rejected.push(RejectedRow { line, reason }),
        }
    }
    let total = records.len() + rejected.len();
    if total == 0 {
        return Err(Error::NoRatings(path.to_path_buf()));
    }
    if rejected.len() * 2 > total {
        return Err(Error::TooManyRejected {
            path: path.to_path_buf(),
            rejected: rejected.len(),
            total,
            first: format!("line {}: {}", rejected[0].line, rejected[0].reason),
        });
    }
    Ok(Ratings { records, rejected })
}

fn parse_row(row: &csv::StringRecord, idx: &[usize]) -> std::result::Result<RatingRecord, String> {
    let field = |i: usize| row.get(idx[i]).ok_or_else(|| format!("missing {}", RATINGS_HEADER[i]));
    let non_empty = |i: usize| {
        field(i).and_then(|v| {
            if v.is_empty() {
                Err(format!("empty {}", RATINGS_HEADER[i]))
            } else {
                Ok(v.to_string())
            }
        })
    };
    let class: u8 = field(3)?.parse().map_err(|_| format!("bad class_id {:?}", field(3).unwrap_or("")))?;
    let score: u8 = field(5)?.parse().map_err(|_| format!("bad score {:?}", field(5).unwrap_or("")))?;
    if !(1..=5).contains(&score) {
        return Err(format!("score {score} outside 1..=5"));
    }
    Ok(RatingRecord {
        listener_id: non_empty(0)?,
        stimulus_id: non_empty(1)?,
        system: non_empty(2)?,
        class_id: ClassId::new(class).map_err(|e| e.to_string())?,
        scale: field(4)?.parse()?,
        score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosSummary {
    pub system: String,
    /// `None` for the summary pooled over all classes.
    pub class_id: Option<ClassId>,
    pub warmth_mos: Option<f64>,
    pub competence_mos: Option<f64>,
    pub n_ratings: usize,
    /// Standard error of the mean (sample standard deviation / sqrt(n)).
    pub stderr: f64,
}

impl MosSummary {
    pub fn mos(&self) -> f64 {
        self.warmth_mos.or(self.competence_mos).unwrap_or(f64::NAN)
    }
}

fn system_rank(system: &str) -> (usize, &str) {
    let rank = KNOWN_SYSTEMS
        .iter()
        .position(|s| *s == system)
        .unwrap_or(KNOWN_SYSTEMS.len());
    (rank, system)
}

fn summarize(
    records: &[RatingRecord],
    dimension: Dimension,
    by_class: bool,
) -> Result<Vec<MosSummary>> {
    let scales = dimension.scales();
    let mut groups: BTreeMap<(usize, String, Option<ClassId>), Vec<u8>> = BTreeMap::new();
    for r in records.iter().filter(|r| scales.contains(&r.scale)) {
        let (rank, _) = system_rank(&r.system);
        let class = by_class.then_some(r.class_id);
        groups
            .entry((rank, r.system.clone(), class))
            .or_default()
            .push(r.score);
    }
    if groups.is_empty() {
        return Err(Error::NoMatchingRatings(dimension.to_string()));
    }
    Ok(groups
        .into_iter()
        .map(|((_, system, class_id), scores)| {
            let n = scores.len();
            // Integer sum, one division: a mean such as 159/50 lands on the
            // same double as the literal 3.18.
            let sum: u64 = scores.iter().map(|&s| s as u64).sum();
            let mean = sum as f64 / n as f64;
            let stderr = if n > 1 {
                let ss: f64 = scores.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
                (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
            } else {
                0.0
            };
            let (warmth_mos, competence_mos) = match dimension {
                Dimension::Warmth => (Some(mean), None),
                Dimension::Competence => (None, Some(mean)),
            };
            MosSummary {
                system,
                class_id,
                warmth_mos,
                competence_mos,
                n_ratings: n,
                stderr,
            }
        })
        .collect())
}

/// One pooled MOS per system.
pub fn aggregate_mos(records: &[RatingRecord], dimension: Dimension) -> Result<Vec<MosSummary>> {
    summarize(records, dimension, false)
}

/// One MOS per (system, class).
pub fn aggregate_mos_by_class(records: &[RatingRecord], dimension: Dimension) -> Result<Vec<MosSummary>> {
    summarize(records, dimension, true)
}

/// Aligned plain-text table.
pub fn render_table(dimension: Dimension, summaries: &[MosSummary]) -> String {
    let width = summaries.iter().map(|s| s.system.len()).max().unwrap_or(6).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>5}  {:>7}  {:>6}  {:>5}", "system", "class", dimension.to_string(), "stderr", "n");
    for s in summaries {
        let class = s.class_id.map_or_else(|| "all".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "{:<width$}  {:>5}  {:>7.3}  {:>6.3}  {:>5}",
            s.system,
            class,
            s.mos(),
            s.stderr,
            s.n_ratings
        );
    }
    out
}

pub fn summaries_csv(dimension: Dimension, summaries: &[MosSummary]) -> String {
    let mut out = String::from("system,class_id,dimension,mos,stderr,n_ratings\n");
    for s in summaries {
        let class = s.class_id.map_or_else(|| "all".to_string(), |c| c.to_string());
        let _ = writeln!(out, "{},{},{},{},{},{}", s.system, class, dimension, s.mos(), s.stderr, s.n_ratings);
    }
    out
}

/// Per-system bars with 95% normal intervals, clipped to the 1-5 scale.
pub fn error_bar_csv(summaries: &[MosSummary]) -> String {
    let mut out = String::from("system,mos,stderr,ci95_low,ci95_high\n");
    for s in summaries.iter().filter(|s| s.class_id.is_none()) {
        let half = 1.96 * s.stderr;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.system,
            s.mos(),
            s.stderr,
            (s.mos() - half).max(1.0),
            (s.mos() + half).min(5.0)
        );
    }
    out
}
