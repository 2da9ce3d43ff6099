//! The sample as the estimators see it.
//!
//! A [`Survey`] holds, for every interviewed subject, an identity (a vertex
//! ID for plaintext samples, a hash code for anonymized ones), the recruiter,
//! the referral component, the self-reported degree and the free alters
//! `N(u, F)`, i.e. the alter list with referral ties removed. Nothing else
//! about the underlying graph is consulted, so the same code estimates from
//! simulated samples and from field data read off a sample dump.
//!
//! Match counting treats the subject identities as a multiset `S`: a free
//! alter `y` reported `a` times by one subject contributes `min(a, χ_S(y))`.
//! For distinct plaintext IDs this is the set intersection with `S`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, Vertex};
use crate::multiset::Multiset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Respondent<K: Ord> {
    pub id: K,
    pub recruiter: Option<K>,
    pub component: usize,
    pub degree: u64,
    pub free_alters: Multiset<K>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Survey<K: Ord> {
    respondents: Vec<Respondent<K>>,
}

impl<K: Ord + Clone> Survey<K> {
    pub fn new(respondents: Vec<Respondent<K>>) -> Self {
        Survey { respondents }
    }

    pub fn respondents(&self) -> &[Respondent<K>] {
        &self.respondents
    }

    pub fn len(&self) -> usize {
        self.respondents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.respondents.is_empty()
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.respondents.iter().map(|r| r.degree).collect()
    }

    /// Subject identities as a multiset (`S`, or `S^ψ` when hashed).
    pub fn subject_ids(&self) -> Multiset<K> {
        self.respondents.iter().map(|r| r.id.clone()).collect()
    }

    /// Respondent indices grouped by component, components in ascending order.
    pub fn components(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.respondents.iter().enumerate() {
            out.entry(r.component).or_default().push(i);
        }
        out
    }

    /// `⟨R(S, F)⟩`.
    pub fn free_end_count(&self) -> u64 {
        self.respondents
            .iter()
            .map(|r| r.free_alters.cardinality())
            .sum()
    }

    /// `⟨R(C, F)⟩` for the given respondents.
    pub fn free_end_count_of(&self, members: &[usize]) -> u64 {
        members
            .iter()
            .map(|&i| self.respondents[i].free_alters.cardinality())
            .sum()
    }

    /// `M(S, F)`: each subject's free alters intersected with `S`.
    pub fn matches(&self) -> Multiset<K> {
        let ids = self.subject_ids();
        self.respondents.iter().fold(Multiset::new(), |acc, r| {
            acc.sum(&r.free_alters.intersection(&ids))
        })
    }

    /// `⟨M(S, F)⟩`.
    pub fn match_count(&self) -> u64 {
        let ids = self.subject_ids();
        self.respondents
            .iter()
            .map(|r| r.free_alters.intersection_cardinality(&ids))
            .sum()
    }

    /// `X(s, F, γ)` for `component`: free alters of its members intersected
    /// with the identities of all subjects outside it.
    pub fn cross_matches(&self, component: usize) -> Multiset<K> {
        let outside = self.complement_ids(component);
        self.respondents
            .iter()
            .filter(|r| r.component == component)
            .fold(Multiset::new(), |acc, r| {
                acc.sum(&r.free_alters.intersection(&outside))
            })
    }

    /// Identities of subjects outside `component` (`C̃_γ(s)` as a multiset).
    pub fn complement_ids(&self, component: usize) -> Multiset<K> {
        self.respondents
            .iter()
            .filter(|r| r.component != component)
            .map(|r| r.id.clone())
            .collect()
    }

    /// Relabels identities, e.g. vertex IDs to hash codes.
    pub fn map_ids<U: Ord + Clone, F: FnMut(&K) -> U>(&self, mut f: F) -> Survey<U> {
        Survey {
            respondents: self
                .respondents
                .iter()
                .map(|r| Respondent {
                    id: f(&r.id),
                    recruiter: r.recruiter.as_ref().map(&mut f),
                    component: r.component,
                    degree: r.degree,
                    free_alters: r.free_alters.map(&mut f),
                })
                .collect(),
        }
    }
}

impl Survey<Vertex> {
    /// Survey of a uniform sample: no referral ties, every subject its own
    /// component, free alters equal to the full neighbor multiset.
    pub fn uniform(g: &MultiGraph, subjects: &[Vertex]) -> Result<Self> {
        let respondents = subjects
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let degree = g.degree(u)? as u64;
                Ok(Respondent {
                    id: u,
                    recruiter: None,
                    component: i,
                    degree,
                    free_alters: g.neighbor_multiset(u),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Survey { respondents })
    }
}

/// Column header of the sample dump.
pub const DUMP_HEADER: [&str; 5] = ["subject", "recruiter", "component", "degree", "alters"];

impl<K: Ord + Clone + Display> Survey<K> {
    /// Writes the sample dump: one row per subject with its identity, the
    /// recruiter's identity or `SEED`, component, reported degree and the
    /// free alters joined by `;`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(DUMP_HEADER)?;
        for r in &self.respondents {
            let alters: Vec<String> = r
                .free_alters
                .occurrences()
                .map(ToString::to_string)
                .collect();
            w.write_record([
                r.id.to_string(),
                r.recruiter
                    .as_ref()
                    .map_or_else(|| "SEED".to_owned(), ToString::to_string),
                r.component.to_string(),
                r.degree.to_string(),
                alters.join(";"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<K: Ord + Clone + FromStr> Survey<K> {
    pub fn read_csv<Rd: Read>(reader: Rd, path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let headers = rdr.headers()?.clone();
        if headers.iter().map(str::trim).ne(DUMP_HEADER) {
            return Err(parse_err(
                1,
                format!("expected header {}", DUMP_HEADER.join(",")),
            ));
        }
        let mut respondents = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2;
            let record = record?;
            if record.len() != DUMP_HEADER.len() {
                return Err(parse_err(
                    line,
                    format!("expected 5 fields, found {}", record.len()),
                ));
            }
            let field = |j: usize| record[j].trim();
            let id = field(0)
                .parse::<K>()
                .map_err(|_| parse_err(line, format!("bad subject {:?}", field(0))))?;
            let recruiter = match field(1) {
                "SEED" => None,
                s => Some(
                    s.parse::<K>()
                        .map_err(|_| parse_err(line, format!("bad recruiter {s:?}")))?,
                ),
            };
            let component = field(2)
                .parse()
                .map_err(|_| parse_err(line, format!("bad component {:?}", field(2))))?;
            let degree = field(3)
                .parse()
                .map_err(|_| parse_err(line, format!("bad degree {:?}", field(3))))?;
            let mut free_alters = Multiset::new();
            for a in field(4).split(';').map(str::trim).filter(|a| !a.is_empty()) {
                free_alters.insert(
                    a.parse::<K>()
                        .map_err(|_| parse_err(line, format!("bad alter {a:?}")))?,
                );
            }
            respondents.push(Respondent {
                id,
                recruiter,
                component,
                degree,
                free_alters,
            });
        }
        Ok(Survey { respondents })
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn respondent(
        id: u64,
        recruiter: Option<u64>,
        component: usize,
        degree: u64,
        alters: &[u64],
    ) -> Respondent<u64> {
        Respondent {
            id,
            recruiter,
            component,
            degree,
            free_alters: alters.iter().copied().collect(),
        }
    }

    #[test]
    fn counts_on_small_survey() {
        let s = Survey::new(vec![
            respondent(1, None, 0, 2, &[]),
            respondent(2, Some(1), 0, 2, &[3]),
            respondent(4, Some(1), 0, 2, &[3]),
            respondent(3, None, 1, 2, &[2, 4]),
        ]);
        assert_eq!(s.free_end_count(), 4);
        assert_eq!(s.match_count(), 4);
        assert_eq!(s.cross_matches(0).cardinality(), 2);
        assert_eq!(s.cross_matches(1).cardinality(), 2);
        assert_eq!(s.components().len(), 2);
    }

    #[test]
    fn colliding_codes_match_with_multiplicity() {
        // two subjects share code 7; an alter reported twice with code 7
        // matches twice, once it is only reported once
        let s = Survey::new(vec![
            respondent(7, None, 0, 3, &[7, 7, 9]),
            respondent(7, None, 1, 1, &[]),
            respondent(8, None, 2, 1, &[7]),
        ]);
        assert_eq!(s.match_count(), 3);
    }

    #[test]
    fn dump_round_trip() {
        let s = Survey::new(vec![
            respondent(10, None, 0, 3, &[4, 4, 11]),
            respondent(11, Some(10), 0, 1, &[]),
        ]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "subject,recruiter,component,degree,alters\n10,SEED,0,3,4;4;11\n11,10,0,1,\n"
        );
        let back: Survey<u64> = Survey::read_csv(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn dump_errors_carry_line_numbers() {
        let bad = "subject,recruiter,component,degree,alters\n1,SEED,0,2,\n2,1,zero,2,\n";
        let err = Survey::<u64>::read_csv(bad.as_bytes(), Path::new("s.csv")).unwrap_err();
        assert!(err.to_string().contains("s.csv:3"), "{err}");
        let err = Survey::<u64>::read_csv("a,b\n".as_bytes(), Path::new("s.csv")).unwrap_err();
        assert!(err.to_string().contains("expected header"), "{err}");
    }
}
