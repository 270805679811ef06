//! Empirical team profiles from co-authorship records, and their projection
//! onto model parameters.
//!
//! Internal authors are read as incumbents and external authors as
//! newcomers; a paper's team culture is its `classification` column.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::export::EdgeList;
use crate::types::{Culture, ModelParams, ParamErrors, PerCulture};

pub const BIB_HEADER: &str = "paper_id,year,author_id,is_internal,culture,classification";
const BIB_COLUMNS: [&str; 6] = ["paper_id", "year", "author_id", "is_internal", "culture", "classification"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Author {
    pub id: String,
    pub is_internal: bool,
    pub culture: Culture,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibRecord {
    pub paper_id: String,
    pub year: i32,
    pub authors: Vec<Author>,
    pub classification: Culture,
}

impl BibRecord {
    pub fn internal_count(&self) -> usize {
        self.authors.iter().filter(|a| a.is_internal).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum BibError {
    #[error("unreadable bibliography: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed bibliography:{}", .0.iter().map(|e| format!("\n  {e}")).collect::<String>())]
    Malformed(Vec<LineError>),
}

/// Parses the one-row-per-(paper, author) CSV. Rows of one paper need not be
/// contiguous; records come out in order of first appearance. All malformed
/// lines are reported together.
pub fn parse_bibliography(source: &str) -> Result<Vec<BibRecord>, BibError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source.as_bytes());

    let mut errors = Vec::new();
    let mut papers: IndexMap<String, BibRecord> = IndexMap::new();
    let mut seen_authors: HashSet<(String, String)> = HashSet::new();
    let mut header_seen = false;

    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            header_seen = true;
            if rec.iter().ne(BIB_COLUMNS) {
                errors.push(LineError {
                    line,
                    message: format!("expected header `{BIB_HEADER}`"),
                });
                break;
            }
            continue;
        }
        let mut fail = |message: String| errors.push(LineError { line, message });
        if rec.len() != BIB_COLUMNS.len() {
            fail(format!("expected {} fields, found {}", BIB_COLUMNS.len(), rec.len()));
            continue;
        }
        let (paper_id, author_id) = (&rec[0], &rec[2]);
        let mut ok = true;
        if paper_id.is_empty() {
            fail("empty paper_id".into());
            ok = false;
        }
        if author_id.is_empty() {
            fail("empty author_id".into());
            ok = false;
        }
        let year = rec[1].parse::<i32>().map_err(|_| format!("invalid year `{}`", &rec[1]));
        let internal = match &rec[3] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(format!("is_internal must be 0 or 1, got `{other}`")),
        };
        let culture = rec[4]
            .parse::<Culture>()
            .map_err(|e| format!("culture: {e}"));
        let class = rec[5]
            .parse::<Culture>()
            .map_err(|e| format!("classification: {e}"));
        let (year, internal, culture, class) = match (year, internal, culture, class) {
            (Ok(y), Ok(i), Ok(c), Ok(k)) if ok => (y, i, c, k),
            (y, i, c, k) => {
                for e in [y.err(), i.err(), c.err(), k.err()].into_iter().flatten() {
                    fail(e);
                }
                continue;
            }
        };
        if !seen_authors.insert((paper_id.to_string(), author_id.to_string())) {
            fail(format!("duplicate author `{author_id}` in paper `{paper_id}`"));
            continue;
        }
        let record = papers.entry(paper_id.to_string()).or_insert_with(|| BibRecord {
            paper_id: paper_id.to_string(),
            year,
            authors: Vec::new(),
            classification: class,
        });
        if record.year != year {
            fail(format!("paper `{paper_id}` already has year {}", record.year));
            continue;
        }
        if record.classification != class {
            fail(format!(
                "paper `{paper_id}` already classified as {}",
                record.classification
            ));
            continue;
        }
        record.authors.push(Author {
            id: author_id.to_string(),
            is_internal: internal,
            culture,
        });
    }

    if errors.is_empty() {
        Ok(papers.into_values().collect())
    } else {
        Err(BibError::Malformed(errors))
    }
}

/// Inverse of [`parse_bibliography`].
pub fn write_bibliography(records: &[BibRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BIB_COLUMNS).expect("in-memory write");
    for r in records {
        for a in &r.authors {
            w.write_record([
                r.paper_id.as_str(),
                &r.year.to_string(),
                a.id.as_str(),
                if a.is_internal { "1" } else { "0" },
                a.culture.as_str(),
                r.classification.as_str(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeamProfile {
    pub culture: Culture,
    pub team_count: usize,
    pub avg_team_size: f64,
    pub avg_internal_fraction: f64,
    pub pct_teams_with_2plus_internal: f64,
}

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("no records")]
    NoRecords,
    #[error(transparent)]
    Params(#[from] ParamErrors),
}

pub fn team_profiles(records: &[BibRecord]) -> Result<PerCulture<TeamProfile>, CalibrationError> {
    if records.is_empty() {
        return Err(CalibrationError::NoRecords);
    }
    Ok(PerCulture::from_fn(|culture| {
        let mut n = 0usize;
        let mut authors = 0usize;
        let mut frac = 0.0;
        let mut two_plus = 0usize;
        for r in records.iter().filter(|r| r.classification == culture) {
            let internal = r.internal_count();
            n += 1;
            authors += r.authors.len();
            frac += internal as f64 / r.authors.len() as f64;
            if internal >= 2 {
                two_plus += 1;
            }
        }
        let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
        TeamProfile {
            culture,
            team_count: n,
            avg_team_size: mean(authors as f64),
            avg_internal_fraction: mean(frac),
            pct_teams_with_2plus_internal: mean(100.0 * two_plus as f64),
        }
    }))
}

/// Copies each culture's internal fraction into `p_incumbent` and its mean
/// team size into `mean_team_size`; everything else comes from `defaults`.
pub fn profiles_to_params(
    profiles: &PerCulture<TeamProfile>,
    defaults: &ModelParams,
) -> Result<ModelParams, ParamErrors> {
    let mut params = defaults.clone();
    for culture in Culture::ALL {
        let cp = &mut params.per_culture[culture];
        cp.p_incumbent = profiles[culture].avg_internal_fraction;
        cp.mean_team_size = profiles[culture].avg_team_size;
    }
    params.validate()?;
    Ok(params)
}

/// Config text for calibrated parameters, flagging the values that the
/// profiles cannot identify.
pub fn calibrated_config(params: &ModelParams, source: &str) -> String {
    format!(
        "# calibrated from {source}\n\
         # p_incumbent <- average internal-author fraction; mean_team_size <- average author count\n\
         # q_repeat is not estimable from team profiles: copied from defaults ({}, {})\n{}",
        params.per_culture.basic.q_repeat,
        params.per_culture.clinical.q_repeat,
        params.to_config()
    )
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct YearSlice {
    pub papers: usize,
    pub network: EdgeList,
}

/// Co-authorship network of each year; edge weight = shared papers that year.
pub fn slice_by_year(records: &[BibRecord]) -> BTreeMap<i32, YearSlice> {
    let mut out: BTreeMap<i32, YearSlice> = BTreeMap::new();
    for r in records {
        let slice = out.entry(r.year).or_default();
        slice.papers += 1;
        for a in &r.authors {
            slice.network.add_node(&a.id, a.culture);
        }
        for (i, a) in r.authors.iter().enumerate() {
            for b in &r.authors[i + 1..] {
                slice.network.add_edge(&a.id, &b.id, 1);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(id: &str, year: i32, class: Culture, authors: &[(&str, bool)]) -> BibRecord {
        BibRecord {
            paper_id: id.into(),
            year,
            classification: class,
            authors: authors
                .iter()
                .map(|(a, internal)| Author {
                    id: a.to_string(),
                    is_internal: *internal,
                    culture: class,
                })
                .collect(),
        }
    }

    fn sized(id: &str, class: Culture, size: usize, internal: usize) -> BibRecord {
        let names: Vec<String> = (0..size).map(|i| format!("{id}-a{i}")).collect();
        let authors: Vec<(&str, bool)> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i < internal)).collect();
        paper(id, 2014, class, &authors)
    }

    #[test]
    fn happy_path() {
        let src = "paper_id,year,author_id,is_internal,culture,classification\n\
                   p1,2014,ana,1,clinical,clinical\n\
                   p1,2014,ben,0,clinical,clinical\n\
                   p1,2014,cy,0,basic,clinical\n";
        let recs = parse_bibliography(src).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].authors.len(), 3);
        assert_eq!(recs[0].authors[2].culture, Culture::Basic);
        assert_eq!(recs[0].internal_count(), 1);
    }

    #[test]
    fn reports_every_bad_line() {
        let src = "paper_id,year,author_id,is_internal,culture,classification\n\
                   p1,2014,ana,1,biomedical,clinical\n\
                   p1,2014,ben,0,clinical,clinical\n\
                   p1,2014,ben,1,clinical,clinical\n\
                   p2,20x4,cy,2,basic,basic\n\
                   p3,2015,,0,basic,basic\n\
                   p4,2015,dee,0\n";
        let Err(BibError::Malformed(errs)) = parse_bibliography(src) else {
            panic!("expected errors")
        };
        let lines: Vec<u64> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 4, 5, 5, 6, 7]);
        assert!(errs[0].message.contains("biomedical"));
        assert!(errs[1].message.contains("duplicate author `ben`"));
    }

    #[test]
    fn inconsistent_paper_metadata() {
        let src = "paper_id,year,author_id,is_internal,culture,classification\n\
                   p1,2014,a,1,basic,basic\n\
                   p1,2015,b,1,basic,basic\n\
                   p1,2014,c,1,basic,clinical\n";
        let Err(BibError::Malformed(errs)) = parse_bibliography(src) else {
            panic!("expected errors")
        };
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn wrong_header() {
        assert!(parse_bibliography("paper,year\np1,2014\n").is_err());
        assert_eq!(parse_bibliography("").unwrap(), vec![]);
    }

    #[test]
    fn single_clinical_profile() {
        let recs = [sized("p", Culture::Clinical, 4, 2)];
        let prof = team_profiles(&recs).unwrap();
        let c = prof.clinical;
        assert_eq!(
            (c.team_count, c.avg_team_size, c.avg_internal_fraction, c.pct_teams_with_2plus_internal),
            (1, 4.0, 0.5, 100.0)
        );
        assert_eq!(prof.basic.team_count, 0);
    }

    #[test]
    fn two_basic_papers() {
        let recs = [sized("p", Culture::Basic, 8, 1), sized("q", Culture::Basic, 6, 3)];
        let b = team_profiles(&recs).unwrap().basic;
        assert_eq!(b.team_count, 2);
        assert_eq!(b.avg_team_size, 7.0);
        assert_eq!(b.avg_internal_fraction, 0.3125);
        assert_eq!(b.pct_teams_with_2plus_internal, 50.0);
    }

    #[test]
    fn empty_records() {
        assert!(matches!(team_profiles(&[]), Err(CalibrationError::NoRecords)));
    }

    fn profile(culture: Culture, size: f64, frac: f64) -> TeamProfile {
        TeamProfile {
            culture,
            team_count: 1,
            avg_team_size: size,
            avg_internal_fraction: frac,
            pct_teams_with_2plus_internal: 0.0,
        }
    }

    #[test]
    fn projection_onto_params() {
        let defaults = ModelParams { mixing: 0.46, seed: 99, ..ModelParams::default() };
        let profiles = PerCulture::new(
            profile(Culture::Basic, 7.48, 0.22),
            profile(Culture::Clinical, 4.78, 0.0),
        );
        let p = profiles_to_params(&profiles, &defaults).unwrap();
        assert_eq!(p.per_culture.basic.p_incumbent, 0.22);
        assert_eq!(p.per_culture.basic.mean_team_size, 7.48);
        assert_eq!(p.per_culture.clinical.p_incumbent, 0.0);
        assert_eq!(p.per_culture.clinical.mean_team_size, 4.78);
        let mut expected = defaults.clone();
        expected.per_culture.basic.p_incumbent = 0.22;
        expected.per_culture.basic.mean_team_size = 7.48;
        expected.per_culture.clinical.p_incumbent = 0.0;
        expected.per_culture.clinical.mean_team_size = 4.78;
        assert_eq!(p, expected);
    }

    #[test]
    fn projection_rejects_tiny_teams() {
        let profiles = PerCulture::new(
            profile(Culture::Basic, 2.0, 0.3),
            profile(Culture::Clinical, 4.78, 0.45),
        );
        let err = profiles_to_params(&profiles, &ModelParams::default()).unwrap_err();
        assert_eq!(err.0[0].constraint, "minimum drawn team size below 2");
    }

    #[test]
    fn year_slices() {
        let recs = [
            paper("a", 2014, Culture::Basic, &[("x", true), ("y", false), ("z", false)]),
            paper("b", 2015, Culture::Clinical, &[("u", true), ("v", true)]),
            paper("c", 2015, Culture::Clinical, &[("v", true), ("u", false)]),
        ];
        let slices = slice_by_year(&recs);
        let s14 = &slices[&2014];
        assert_eq!(s14.papers, 1);
        assert_eq!(s14.network.edges.len(), 3);
        assert!(s14.network.edges.values().all(|w| *w == 1));
        let s15 = &slices[&2015];
        assert_eq!(s15.papers, 2);
        assert_eq!(s15.network.edges.len(), 1);
        assert_eq!(s15.network.weight("u", "v"), 2);
    }

    #[test]
    fn config_flags_q_repeat() {
        let text = calibrated_config(&ModelParams::default(), "bib.csv");
        assert!(text.contains("q_repeat is not estimable"));
        assert_eq!(ModelParams::from_config(&text).unwrap(), ModelParams::default());
    }
}
