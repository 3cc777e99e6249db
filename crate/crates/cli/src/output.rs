use serde::{Deserialize, Serialize};

/// Tolerance echoed into every JSON document.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub distance: String,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    /// `None` when `q` cannot be reached from `p`.
    pub value: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectScore {
    pub object: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub ranking: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cost: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub scores: Vec<ObjectScore>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectBound {
    pub object: usize,
    pub mean: f64,
    pub d: f64,
    pub r: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: u64,
    pub bound: f64,
    pub m: usize,
    pub lambda2: f64,
    /// Objects in ascending order of mean score.
    pub objects: Vec<ObjectBound>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: u64,
    pub empirical_tail: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub theoretical_bound: f64,
}

/// A tail table: `#`-prefixed metadata lines, then CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct TailTable {
    pub comments: Vec<String>,
    pub rows: Vec<TailRow>,
}

impl TailTable {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row)?;
        }
        if self.rows.is_empty() {
            writer.write_record(["t", "empirical_tail", "wilson_lo", "wilson_hi", "theoretical_bound"])?;
        }
        let body = writer.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, csv::Error> {
        let comments = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim_start().to_string())
            .collect();
        let rows = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<TailRow>, _>>()?;
        Ok(Self { comments, rows })
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_csv_round_trip() {
        let table = TailTable {
            comments: vec!["seed=7".into(), "trials=10".into()],
            rows: vec![
                TailRow { t: 0, empirical_tail: 1.0, wilson_lo: 0.72, wilson_hi: 1.0, theoretical_bound: 312.5 },
                TailRow { t: 50, empirical_tail: 0.1, wilson_lo: 0.017, wilson_hi: 0.404, theoretical_bound: 1e-3 / 3.0 },
            ],
        };
        let text = table.to_csv().unwrap();
        assert!(text.starts_with("# seed=7\n# trials=10\nt,empirical_tail,"));
        let back = TailTable::from_csv(&text).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.to_csv().unwrap(), text);
    }

    #[test]
    fn aggregate_json_round_trip() {
        let report = AggregateReport {
            rule: "borda".into(),
            distance: None,
            seed: None,
            ranking: vec![1, 2, 3],
            cost: None,
            scores: vec![ObjectScore { object: 1, score: 1.5 }],
            tolerance: TOLERANCE,
        };
        let text = to_json(&report);
        let back: AggregateReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back), text);
    }
}
