use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordId(pub u64);

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for RecordId {
    fn from(v: u64) -> Self {
        RecordId(v)
    }
}

/// One row of the single relation being deduplicated. `None` is NULL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: RecordId,
    pub attributes: Vec<Option<String>>,
}

impl Record {
    pub fn new<S: AsRef<str>>(id: u64, attributes: impl IntoIterator<Item = S>) -> Self {
        Record {
            id: RecordId(id),
            attributes: attributes.into_iter().map(|a| Some(a.as_ref().to_string())).collect(),
        }
    }

    /// A record with no attributes; used by lookup-table instances where
    /// only the identity matters.
    pub fn bare(id: u64) -> Self {
        Record {
            id: RecordId(id),
            attributes: Vec::new(),
        }
    }

    pub fn attribute(&self, idx: usize) -> Option<&str> {
        self.attributes.get(idx).and_then(|a| a.as_deref())
    }
}

/// Whitespace tokens of every non-NULL attribute, lowercased.
pub fn tokens(record: &Record) -> impl Iterator<Item = String> + '_ {
    record
        .attributes
        .iter()
        .flatten()
        .flat_map(|a| a.split_whitespace())
        .map(str::to_lowercase)
}

/// A schema-consistent collection of records with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    records: Vec<Record>,
    arity: usize,
    index: HashMap<RecordId, usize>,
}

impl Dataset {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let arity = records.first().map_or(0, |r| r.attributes.len());
        let mut index = HashMap::with_capacity(records.len());
        for (pos, r) in records.iter().enumerate() {
            if r.attributes.len() != arity {
                return Err(Error::contract(format!(
                    "record {} has {} attributes, expected {}",
                    r.id,
                    r.attributes.len(),
                    arity
                )));
            }
            if index.insert(r.id, pos).is_some() {
                return Err(Error::contract(format!("duplicate record id {}", r.id)));
            }
        }
        Ok(Dataset { records, arity, index })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: RecordId) -> Option<&Record> {
        self.index.get(&id).map(|&p| &self.records[p])
    }

    /// Resolves ids to records, failing on the first unknown id.
    pub fn resolve(&self, ids: &[RecordId]) -> Result<Vec<&Record>> {
        ids.iter()
            .map(|id| {
                self.get(*id)
                    .ok_or_else(|| Error::contract(format!("unknown record id {id}")))
            })
            .collect()
    }

    /// Reads CSV: first column is the integer id, the rest are attributes.
    /// Empty fields are NULL.
    pub fn read_csv<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .from_reader(reader);
        let mut records = Vec::new();
        for (line, row) in rdr.records().enumerate() {
            let row = row?;
            let line = line + 1 + usize::from(has_header);
            let mut fields = row.iter();
            let id = fields
                .next()
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: "empty row".into(),
                })?
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad record id: {e}"),
                })?;
            let attributes = fields.map(|f| (!f.is_empty()).then(|| f.to_string())).collect();
            records.push(Record {
                id: RecordId(id),
                attributes,
            });
        }
        Dataset::new(records)
    }

    pub fn write_csv<W: Write>(&self, writer: W, header: Option<&[&str]>) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if let Some(h) = header {
            w.write_record(h)?;
        }
        for r in &self.records {
            let mut row = vec![r.id.to_string()];
            row.extend(r.attributes.iter().map(|a| a.clone().unwrap_or_default()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
