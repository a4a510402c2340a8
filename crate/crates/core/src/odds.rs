//! Bookmaker odds ingestion and conversion to probability forecasts.
//!
//! Decimal odds carry a bookmaker margin: the implied probabilities
//! 1/O sum to slightly more than one. Dividing by their sum removes the
//! margin under the assumption that it is spread proportionally across
//! the three outcomes. To soften any single bookmaker's margin shaping,
//! each outcome takes the best (maximum) odds available across the
//! configured columns before conversion.

use crate::error::{Error, Result};
use crate::score::ForecastVector;
use rand::Rng;
use std::collections::HashMap;
use std::path::Path;

/// Implied-probability sums outside this band mean the row is not a
/// plausible three-way market (data error, or odds in the wrong format).
pub const MARGIN_BAND: (f64, f64) = (0.9, 1.3);

/// Best available decimal odds for one match.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOdds {
    pub o_home: f64,
    pub o_draw: f64,
    pub o_away: f64,
    pub league: String,
    pub season: String,
    pub match_id: String,
}

impl MatchOdds {
    pub fn new(
        o_home: f64,
        o_draw: f64,
        o_away: f64,
        league: impl Into<String>,
        season: impl Into<String>,
        match_id: impl Into<String>,
    ) -> Result<Self> {
        for (name, o) in [("home", o_home), ("draw", o_draw), ("away", o_away)] {
            if !o.is_finite() || o <= 1.0 {
                return Err(Error::InvalidOdds(format!(
                    "{name} odds {o} must be finite and greater than 1"
                )));
            }
        }
        let implied = 1.0 / o_home + 1.0 / o_draw + 1.0 / o_away;
        if implied <= MARGIN_BAND.0 || implied >= MARGIN_BAND.1 {
            return Err(Error::InvalidOdds(format!(
                "implied probabilities sum to {implied}, outside ({}, {})",
                MARGIN_BAND.0, MARGIN_BAND.1
            )));
        }
        Ok(Self {
            o_home,
            o_draw,
            o_away,
            league: league.into(),
            season: season.into(),
            match_id: match_id.into(),
        })
    }
}

/// Normalised inverse odds. Scaling all implied probabilities by a
/// common factor cancels, so the bookmaker margin drops out.
pub fn odds_to_forecast(odds: &MatchOdds) -> ForecastVector {
    let inv = [1.0 / odds.o_home, 1.0 / odds.o_draw, 1.0 / odds.o_away];
    let sum: f64 = inv.iter().sum();
    ForecastVector::new(inv.iter().map(|v| v / sum).collect())
        .expect("normalised inverse odds form a distribution")
}

/// A forecast with a stable identifier, as drawn from one data row.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub forecast: ForecastVector,
}

/// The pool of forecasts an experiment draws from.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    members: Vec<Candidate>,
}

impl CandidateSet {
    pub fn new(members: Vec<Candidate>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Candidate> {
        self.members.get(i)
    }
}

/// Column mapping for odds CSV files.
///
/// Each outcome has a list of candidate columns; a row's odds for that
/// outcome is the maximum over the columns present and parseable.
/// Defaults follow the familiar results-archive convention of per-
/// bookmaker columns (B365H and friends) plus market-maximum columns.
#[derive(Debug, Clone)]
pub struct OddsSchema {
    pub home_cols: Vec<String>,
    pub draw_cols: Vec<String>,
    pub away_cols: Vec<String>,
    /// Columns joined with '|' to form the match id; falls back to the
    /// row number when any are missing.
    pub id_cols: Vec<String>,
    pub league_col: String,
    /// Keep only rows whose league column equals this value.
    pub league_filter: Option<String>,
    /// Season label attached to every row of the file.
    pub season: String,
}

fn cols(prefixes: &[&str], suffix: &str) -> Vec<String> {
    prefixes.iter().map(|p| format!("{p}{suffix}")).collect()
}

impl Default for OddsSchema {
    fn default() -> Self {
        let bookies = ["B365", "BW", "IW", "PS", "WH", "VC", "Max", "BbMx"];
        Self {
            home_cols: cols(&bookies, "H"),
            draw_cols: cols(&bookies, "D"),
            away_cols: cols(&bookies, "A"),
            id_cols: vec!["Date".into(), "HomeTeam".into(), "AwayTeam".into()],
            league_col: "Div".into(),
            league_filter: None,
            season: String::new(),
        }
    }
}

/// What came out of one file.
#[derive(Debug)]
pub struct LoadOutcome {
    pub candidates: CandidateSet,
    /// Data rows seen in the file.
    pub rows_read: usize,
    /// Rows dropped by the league filter.
    pub filtered_out: usize,
    /// Rows with missing or invalid odds.
    pub skipped: usize,
    /// Reasons for the first few skipped rows.
    pub diagnostics: Vec<String>,
}

const MAX_DIAGNOSTICS: usize = 20;

fn best_odds(record: &csv::StringRecord, indices: &[usize]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for &i in indices {
        if let Some(field) = record.get(i) {
            if let Ok(v) = field.trim().parse::<f64>() {
                if v.is_finite() && best.is_none_or(|b| v > b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

/// Read an odds CSV and convert every usable row into a candidate
/// forecast. Rows with missing or invalid odds are skipped and counted,
/// not fatal; a file with no usable rows at all is an error.
pub fn load_candidates(path: &Path, schema: &OddsSchema) -> Result<LoadOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let index: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, name)| (name.trim(), i))
        .collect();
    let resolve = |names: &[String]| -> Vec<usize> {
        names
            .iter()
            .filter_map(|n| index.get(n.as_str()).copied())
            .collect()
    };
    let home_idx = resolve(&schema.home_cols);
    let draw_idx = resolve(&schema.draw_cols);
    let away_idx = resolve(&schema.away_cols);
    if home_idx.is_empty() || draw_idx.is_empty() || away_idx.is_empty() {
        return Err(Error::Ingestion(format!(
            "{}: no recognised odds columns for all three outcomes",
            path.display()
        )));
    }
    let id_idx: Vec<Option<usize>> = schema
        .id_cols
        .iter()
        .map(|n| index.get(n.as_str()).copied())
        .collect();
    let league_idx = index.get(schema.league_col.as_str()).copied();

    let mut members = Vec::new();
    let mut rows_read = 0usize;
    let mut filtered_out = 0usize;
    let mut skipped = 0usize;
    let mut diagnostics = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        rows_read += 1;
        let league = league_idx
            .and_then(|i| record.get(i))
            .unwrap_or("")
            .trim()
            .to_string();
        if let Some(filter) = &schema.league_filter {
            if league != *filter {
                filtered_out += 1;
                continue;
            }
        }
        let mut skip = |reason: String, diagnostics: &mut Vec<String>| {
            skipped += 1;
            if diagnostics.len() < MAX_DIAGNOSTICS {
                diagnostics.push(format!("row {}: {reason}", row + 1));
            }
        };
        let (Some(h), Some(d), Some(a)) = (
            best_odds(&record, &home_idx),
            best_odds(&record, &draw_idx),
            best_odds(&record, &away_idx),
        ) else {
            skip("missing odds for at least one outcome".into(), &mut diagnostics);
            continue;
        };
        let id_parts: Vec<&str> = id_idx
            .iter()
            .filter_map(|i| i.and_then(|i| record.get(i)))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        let match_id = if id_parts.len() == schema.id_cols.len() {
            id_parts.join("|")
        } else {
            format!("row{}", row + 1)
        };
        match MatchOdds::new(h, d, a, league, schema.season.clone(), match_id) {
            Ok(odds) => members.push(Candidate {
                id: odds.match_id.clone(),
                forecast: odds_to_forecast(&odds),
            }),
            Err(e) => skip(e.to_string(), &mut diagnostics),
        }
    }
    if members.is_empty() {
        return Err(Error::Ingestion(format!(
            "{}: no usable rows ({rows_read} read, {skipped} skipped, {filtered_out} filtered)",
            path.display()
        )));
    }
    Ok(LoadOutcome {
        candidates: CandidateSet::new(members),
        rows_read,
        filtered_out,
        skipped,
        diagnostics,
    })
}

/// Generate a synthetic candidate pool with football-like marginals:
/// home probability uniform on [0.1, 0.8], draw probability uniform on
/// [0.15, 0.35] but capped so the away side keeps at least 0.02.
pub fn synthesize_candidates(count: usize, rng: &mut impl Rng) -> CandidateSet {
    let mut members = Vec::with_capacity(count);
    for i in 0..count {
        let h = rng.random_range(0.1..0.8);
        let d = rng.random_range(0.15..0.35f64).min(1.0 - h - 0.02);
        let a = 1.0 - h - d;
        members.push(Candidate {
            id: format!("syn-{i:05}"),
            forecast: ForecastVector::new(vec![h, d, a])
                .expect("synthetic probabilities are a distribution"),
        });
    }
    CandidateSet::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::substream;
    use std::fs;
    use std::path::PathBuf;

    const TOL: f64 = 1e-12;

    fn odds(h: f64, d: f64, a: f64) -> MatchOdds {
        MatchOdds::new(h, d, a, "E0", "2015-16", "test").unwrap()
    }

    fn write_temp(name: &str, content: &str) -> PathBuf {
        let path = std::env::temp_dir().join(format!("odds-{}-{name}", std::process::id()));
        fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn fair_odds_convert_to_their_reciprocals() {
        let f = odds_to_forecast(&odds(2.0, 3.0, 6.0));
        assert!((f.probs()[0] - 0.5).abs() < TOL);
        assert!((f.probs()[1] - 1.0 / 3.0).abs() < TOL);
        assert!((f.probs()[2] - 1.0 / 6.0).abs() < TOL);
    }

    #[test]
    fn margin_is_spread_proportionally() {
        // 5% overround on a (0.5, 0.25, 0.25) book.
        let f = odds_to_forecast(&odds(1.8, 3.6, 3.6));
        assert!((f.probs()[0] - 0.5).abs() < TOL);
        assert!((f.probs()[1] - 0.25).abs() < TOL);
        assert!((f.probs()[2] - 0.25).abs() < TOL);
    }

    #[test]
    fn uniform_odds_give_the_uniform_forecast() {
        let f = odds_to_forecast(&odds(3.0, 3.0, 3.0));
        for p in f.probs() {
            assert!((p - 1.0 / 3.0).abs() < TOL);
        }
    }

    #[test]
    fn scaling_all_odds_leaves_the_forecast_unchanged() {
        let base = odds(2.0, 3.0, 6.0);
        let scale = 1.05;
        let scaled = odds(2.0 / scale, 3.0 / scale, 6.0 / scale);
        let a = odds_to_forecast(&base);
        let b = odds_to_forecast(&scaled);
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn odds_validation_rejects_junk() {
        assert!(MatchOdds::new(1.0, 3.0, 6.0, "", "", "").is_err());
        assert!(MatchOdds::new(0.5, 3.0, 6.0, "", "", "").is_err());
        assert!(MatchOdds::new(f64::NAN, 3.0, 6.0, "", "", "").is_err());
        assert!(MatchOdds::new(f64::INFINITY, 3.0, 6.0, "", "", "").is_err());
        // Implied sum 2.0: not a three-way book.
        assert!(MatchOdds::new(1.5, 1.5, 1.5, "", "", "").is_err());
        // Implied sum 0.3: odds far too long across the board.
        assert!(MatchOdds::new(10.0, 10.0, 10.0, "", "", "").is_err());
    }

    #[test]
    fn loader_takes_the_best_odds_per_outcome() {
        let path = write_temp(
            "best.csv",
            "Div,Date,HomeTeam,AwayTeam,B365H,B365D,B365A,PSH,PSD,PSA\n\
             E0,2015-08-08,Bournemouth,Aston Villa,2.0,3.0,6.0,2.1,3.0,5.8\n",
        );
        let out = load_candidates(&path, &OddsSchema::default()).unwrap();
        assert_eq!(out.rows_read, 1);
        assert_eq!(out.skipped, 0);
        let expected = odds_to_forecast(&odds(2.1, 3.0, 6.0));
        let got = &out.candidates.members()[0];
        assert_eq!(got.id, "2015-08-08|Bournemouth|Aston Villa");
        for (x, y) in got.forecast.probs().iter().zip(expected.probs()) {
            assert!((x - y).abs() < TOL);
        }
        fs::remove_file(path).ok();
    }

    #[test]
    fn loader_skips_rows_with_missing_or_absurd_odds() {
        let path = write_temp(
            "skip.csv",
            "Div,Date,HomeTeam,AwayTeam,B365H,B365D,B365A\n\
             E0,2015-08-08,A,B,2.0,3.0,6.0\n\
             E0,2015-08-09,C,D,2.0,3.0,\n\
             E0,2015-08-10,E,F,1.5,1.5,1.5\n\
             E0,2015-08-11,G,H,not-a-number,3.0,6.0\n",
        );
        let out = load_candidates(&path, &OddsSchema::default()).unwrap();
        assert_eq!(out.rows_read, 4);
        assert_eq!(out.candidates.len(), 1);
        assert_eq!(out.skipped, 3);
        assert_eq!(out.diagnostics.len(), 3);
        fs::remove_file(path).ok();
    }

    #[test]
    fn loader_applies_the_league_filter_without_counting_it_as_skips() {
        let path = write_temp(
            "filter.csv",
            "Div,Date,HomeTeam,AwayTeam,B365H,B365D,B365A\n\
             E0,2015-08-08,A,B,2.0,3.0,6.0\n\
             E1,2015-08-08,C,D,2.0,3.0,6.0\n",
        );
        let schema = OddsSchema {
            league_filter: Some("E0".into()),
            ..OddsSchema::default()
        };
        let out = load_candidates(&path, &schema).unwrap();
        assert_eq!(out.candidates.len(), 1);
        assert_eq!(out.filtered_out, 1);
        assert_eq!(out.skipped, 0);
        fs::remove_file(path).ok();
    }

    #[test]
    fn loader_with_no_usable_rows_is_an_error() {
        let path = write_temp(
            "empty.csv",
            "Div,Date,HomeTeam,AwayTeam,B365H,B365D,B365A\n\
             E0,2015-08-08,A,B,,3.0,6.0\n",
        );
        assert!(matches!(
            load_candidates(&path, &OddsSchema::default()),
            Err(Error::Ingestion(_))
        ));
        fs::remove_file(path).ok();
    }

    #[test]
    fn loader_requires_odds_columns_in_the_header() {
        let path = write_temp("noodds.csv", "Div,Date,HomeTeam,AwayTeam\nE0,x,A,B\n");
        assert!(matches!(
            load_candidates(&path, &OddsSchema::default()),
            Err(Error::Ingestion(_))
        ));
        fs::remove_file(path).ok();
    }

    #[test]
    fn synthetic_pool_is_valid_and_reproducible() {
        let mut rng = substream(8, &[0]);
        let a = synthesize_candidates(2000, &mut rng);
        assert_eq!(a.len(), 2000);
        for c in a.members() {
            let p = c.forecast.probs();
            assert!(p[0] >= 0.1 - TOL && p[0] <= 0.8 + TOL, "home {}", p[0]);
            assert!(p[1] >= 0.15 - TOL && p[1] <= 0.35 + TOL, "draw {}", p[1]);
            assert!(p[2] >= 0.02 - TOL, "away {}", p[2]);
        }
        let mut rng = substream(8, &[0]);
        let b = synthesize_candidates(2000, &mut rng);
        assert_eq!(a, b);
    }
}
