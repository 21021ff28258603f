use std::fmt;
use std::str::FromStr;

use super::record::Record;
use crate::error::{Error, Result};

/// A functional blocking key: every record maps to exactly one BKV string.
///
/// BKVs are totally ordered by raw byte comparison of the string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockingKeySpec {
    /// First character of every whitespace token, concatenated in attribute
    /// order. `None` means all attributes.
    TokenInitials { attrs: Option<Vec<usize>> },
    /// The first `k` characters of one attribute.
    FirstChars { attr: usize, k: usize },
    /// One attribute, unchanged.
    Verbatim { attr: usize },
    /// Concatenation of sub-keys joined by `|`.
    Composite(Vec<BlockingKeySpec>),
}

impl BlockingKeySpec {
    pub fn initials() -> Self {
        BlockingKeySpec::TokenInitials { attrs: None }
    }

    pub fn apply(&self, record: &Record) -> Result<String> {
        let attr = |idx: usize| -> Result<Option<&str>> {
            match record.attributes.get(idx) {
                Some(v) => Ok(v.as_deref()),
                None => Err(Error::config(format!(
                    "attribute index {idx} out of range for record {} with {} attributes",
                    record.id,
                    record.attributes.len()
                ))),
            }
        };
        match self {
            BlockingKeySpec::TokenInitials { attrs } => {
                let mut out = String::new();
                let mut push = |v: Option<&str>| {
                    for tok in v.into_iter().flat_map(str::split_whitespace) {
                        out.extend(tok.chars().next());
                    }
                };
                match attrs {
                    None => record.attributes.iter().for_each(|a| push(a.as_deref())),
                    Some(idxs) => {
                        for &i in idxs {
                            push(attr(i)?);
                        }
                    }
                }
                Ok(out)
            }
            BlockingKeySpec::FirstChars { attr: i, k } => {
                Ok(attr(*i)?.map(|v| v.chars().take(*k).collect()).unwrap_or_default())
            }
            BlockingKeySpec::Verbatim { attr: i } => Ok(attr(*i)?.unwrap_or_default().to_string()),
            BlockingKeySpec::Composite(parts) => {
                let keys = parts.iter().map(|p| p.apply(record)).collect::<Result<Vec<_>>>()?;
                Ok(keys.join("|"))
            }
        }
    }

    /// Checks every referenced attribute index against a schema arity.
    pub fn validate(&self, arity: usize) -> Result<()> {
        let check = |i: usize| {
            if i < arity {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "blocking key references attribute {i}, schema has {arity}"
                )))
            }
        };
        match self {
            BlockingKeySpec::TokenInitials { attrs: None } => Ok(()),
            BlockingKeySpec::TokenInitials { attrs: Some(a) } => a.iter().try_for_each(|&i| check(i)),
            BlockingKeySpec::FirstChars { attr, .. } | BlockingKeySpec::Verbatim { attr } => check(*attr),
            BlockingKeySpec::Composite(parts) => parts.iter().try_for_each(|p| p.validate(arity)),
        }
    }
}

impl fmt::Display for BlockingKeySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockingKeySpec::TokenInitials { attrs: None } => write!(f, "initials"),
            BlockingKeySpec::TokenInitials { attrs: Some(a) } => {
                let list: Vec<String> = a.iter().map(|i| i.to_string()).collect();
                write!(f, "initials:{}", list.join(","))
            }
            BlockingKeySpec::FirstChars { attr, k } => write!(f, "first:{attr}:{k}"),
            BlockingKeySpec::Verbatim { attr } => write!(f, "attr:{attr}"),
            BlockingKeySpec::Composite(parts) => {
                let list: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "composite:{}", list.join("+"))
            }
        }
    }
}

/// Parses `initials`, `initials:0,2`, `first:1:3`, `attr:2` and
/// `composite:first:0:1+attr:2`.
impl FromStr for BlockingKeySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::config(format!("unrecognised blocking key `{s}`"));
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix("composite:") {
            let parts = rest
                .split('+')
                .map(str::parse)
                .collect::<Result<Vec<BlockingKeySpec>>>()?;
            return Ok(BlockingKeySpec::Composite(parts));
        }
        let fields: Vec<&str> = s.split(':').collect();
        match fields.as_slice() {
            ["initials"] => Ok(BlockingKeySpec::initials()),
            ["initials", list] => Ok(BlockingKeySpec::TokenInitials {
                attrs: Some(list.split(',').map(num).collect::<Result<_>>()?),
            }),
            ["first", attr, k] => Ok(BlockingKeySpec::FirstChars {
                attr: num(attr)?,
                k: num(k)?,
            }),
            ["attr", attr] => Ok(BlockingKeySpec::Verbatim { attr: num(attr)? }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initials_reproduce_example_keys() {
        let key = BlockingKeySpec::initials();
        assert_eq!(key.apply(&Record::new(1, ["Cathy", "Ransom", "77111"])).unwrap(), "CR7");
        assert_eq!(key.apply(&Record::new(4, ["John", "Rogers", "78751"])).unwrap(), "JR7");
        assert_eq!(key.apply(&Record::new(5, ["J.", "Rogers", "78732"])).unwrap(), "JR7");
        assert_eq!(
            key.apply(&Record::new(7, ["John", "Ridley Sr.", "77093"])).unwrap(),
            "JRS7"
        );
    }

    #[test]
    fn empty_and_null_attributes_give_empty_key() {
        let key = BlockingKeySpec::initials();
        assert_eq!(key.apply(&Record::new(1, ["", " ", ""])).unwrap(), "");
        let nulls = Record {
            id: super::super::RecordId(2),
            attributes: vec![None, None],
        };
        assert_eq!(key.apply(&nulls).unwrap(), "");
    }

    #[test]
    fn out_of_range_attribute_is_config_error() {
        let key = BlockingKeySpec::Verbatim { attr: 3 };
        let err = key.apply(&Record::new(1, ["a"])).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(key.validate(1).is_err());
        assert!(key.validate(4).is_ok());
    }

    #[test]
    fn other_kinds() {
        let r = Record::new(1, ["Catherine", "Ridley", "77093"]);
        let first = BlockingKeySpec::FirstChars { attr: 0, k: 3 };
        assert_eq!(first.apply(&r).unwrap(), "Cat");
        let comp: BlockingKeySpec = "composite:first:0:3+attr:2".parse().unwrap();
        assert_eq!(comp.apply(&r).unwrap(), "Cat|77093");
        let sub: BlockingKeySpec = "initials:1,2".parse().unwrap();
        assert_eq!(sub.apply(&r).unwrap(), "R7");
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in [
            "initials",
            "initials:0,2",
            "first:1:3",
            "attr:2",
            "composite:first:0:1+attr:2",
        ] {
            let k: BlockingKeySpec = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("bogus".parse::<BlockingKeySpec>().is_err());
    }
}
