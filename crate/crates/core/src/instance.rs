//! JSON instance and allocation files.
//!
//! ```json
//! {"n": 2, "m": 3, "goods": ["a", "b", "c"],
//!  "valuations": [{"kind": "additive", "values": ["5", "3", "1"]},
//!                 {"kind": "table", "m": 3, "entries": {"0": "0", "1": "5", ...}}],
//!  "metadata": "free text"}
//! ```
//!
//! Every value is an exact rational string (`"7/2"` or `"4"`); JSON numbers
//! are rejected. Table keys are decimal masks and all `2^m` must be present.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocation::{Allocation, AllocationDoc};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::valuation::{Valuation, ValuationKind, DEFAULT_TABLE_MAX_GOODS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goods: Option<Vec<String>>,
    valuations: Vec<ValuationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Additive,
    Table,
}

// A flat struct rather than a tagged enum keeps error paths intact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationDoc {
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept table valuations that violate monotonicity.
    pub allow_nonmonotone: bool,
}

/// A parsed instance: `n` players with valuations over goods `0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    /// Display names; goods are always addressed by index.
    pub goods: Option<Vec<String>>,
    pub valuations: Vec<Valuation>,
    pub metadata: Option<String>,
}

impl Instance {
    pub fn new(valuations: Vec<Valuation>) -> Result<Self> {
        let m = valuations.first().map_or(0, crate::valuation::ValueOracle::goods);
        if valuations.is_empty() {
            return Err(Error::usage("an instance needs at least one player"));
        }
        crate::allocation::check_universe(m, &valuations)?;
        Ok(Instance {
            n: valuations.len(),
            m,
            goods: None,
            valuations,
            metadata: None,
        })
    }

    pub fn with_goods(mut self, names: &[&str]) -> Self {
        self.goods = Some(names.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn with_metadata(mut self, text: &str) -> Self {
        self.metadata = Some(text.to_string());
        self
    }

    /// Name of good `g`, falling back to its index.
    pub fn good_name(&self, g: usize) -> String {
        self.goods
            .as_ref()
            .and_then(|names| names.get(g).cloned())
            .unwrap_or_else(|| g.to_string())
    }

    pub fn to_json(&self) -> Result<String> {
        let valuations = self
            .valuations
            .iter()
            .enumerate()
            .map(|(i, v)| match v.kind() {
                ValuationKind::Additive(values) => Ok(ValuationDoc {
                    kind: KindTag::Additive,
                    values: Some(values.iter().map(rational::format).collect()),
                    m: None,
                    entries: None,
                }),
                ValuationKind::Table(entries) => Ok(ValuationDoc {
                    kind: KindTag::Table,
                    values: None,
                    m: Some(self.m),
                    entries: Some(
                        entries
                            .iter()
                            .enumerate()
                            .map(|(mask, x)| (mask.to_string(), rational::format(x)))
                            .collect(),
                    ),
                }),
                ValuationKind::Kneser { .. } => Err(Error::usage(format!(
                    "valuation {i} is oracle-backed and has no file form"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let doc = InstanceDoc {
            n: self.n,
            m: self.m,
            goods: self.goods.clone(),
            valuations,
            metadata: self.metadata.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc).expect("plain data serializes"))
    }
}

fn from_json<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        use serde_path_to_error::Segment;
        let pointer: String = e
            .path()
            .iter()
            .filter_map(|seg| match seg {
                Segment::Seq { index } => Some(format!("/{index}")),
                Segment::Map { key } => Some(format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
                Segment::Enum { .. } | Segment::Unknown => None,
            })
            .collect();
        Error::schema(pointer, e.into_inner().to_string())
    })
}

fn parse_value(text: &str, pointer: String) -> Result<Rational> {
    rational::parse_nonneg(text).map_err(|e| Error::schema(pointer, e.to_string()))
}

pub fn parse_instance_str(text: &str, opts: ParseOptions) -> Result<Instance> {
    let doc: InstanceDoc = from_json(text)?;
    if doc.valuations.len() != doc.n {
        return Err(Error::schema(
            "/valuations",
            format!("expected {} valuations, found {}", doc.n, doc.valuations.len()),
        ));
    }
    if doc.n == 0 {
        return Err(Error::schema("/n", "an instance needs at least one player"));
    }
    if let Some(names) = &doc.goods {
        if names.len() != doc.m {
            return Err(Error::schema(
                "/goods",
                format!("expected {} names, found {}", doc.m, names.len()),
            ));
        }
    }
    let m = doc.m;
    let mut valuations = Vec::with_capacity(doc.n);
    for (i, v) in doc.valuations.iter().enumerate() {
        let at = |rest: &str| format!("/valuations/{i}{rest}");
        let field = |name: &str| Error::schema(at(""), format!("{:?} valuation needs field {name:?}", v.kind));
        let stray = |name: &str| {
            Error::schema(
                at(&format!("/{name}")),
                format!("field not allowed for {:?} valuations", v.kind),
            )
        };
        let parsed = match v.kind {
            KindTag::Additive => {
                if v.m.is_some() {
                    return Err(stray("m"));
                }
                if v.entries.is_some() {
                    return Err(stray("entries"));
                }
                let values = v.values.as_ref().ok_or_else(|| field("values"))?;
                if values.len() != m {
                    return Err(Error::schema(
                        at("/values"),
                        format!("expected {m} values, found {}", values.len()),
                    ));
                }
                let values = values
                    .iter()
                    .enumerate()
                    .map(|(g, x)| parse_value(x, at(&format!("/values/{g}"))))
                    .collect::<Result<Vec<_>>>()?;
                Valuation::additive(values)
            }
            KindTag::Table => {
                if v.values.is_some() {
                    return Err(stray("values"));
                }
                let tm = v.m.ok_or_else(|| field("m"))?;
                let entries = v.entries.as_ref().ok_or_else(|| field("entries"))?;
                if tm != m {
                    return Err(Error::schema(
                        at("/m"),
                        format!("table is over {tm} goods, instance has {m}"),
                    ));
                }
                if m > DEFAULT_TABLE_MAX_GOODS {
                    return Err(Error::Capacity {
                        what: "table valuation".into(),
                        needed: 1u128 << m.min(127),
                        limit: 1u128 << DEFAULT_TABLE_MAX_GOODS,
                    });
                }
                let mut table: Vec<Option<Rational>> = vec![None; 1 << m];
                for (key, x) in entries {
                    let pointer = at(&format!("/entries/{key}"));
                    let mask: usize = key
                        .parse()
                        .ok()
                        .filter(|&mask: &usize| mask < 1 << m && key == &mask.to_string())
                        .ok_or_else(|| Error::schema(pointer.clone(), format!("{key:?} is not a mask below 2^{m}")))?;
                    table[mask] = Some(parse_value(x, pointer)?);
                }
                let entries = table
                    .into_iter()
                    .enumerate()
                    .map(|(mask, x)| {
                        x.ok_or_else(|| {
                            Error::schema(
                                at("/entries"),
                                format!("missing entry for mask {mask} {}", mask_goods(mask)),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Valuation::table_with(m, entries, !opts.allow_nonmonotone, DEFAULT_TABLE_MAX_GOODS)
            }
        };
        valuations.push(parsed.map_err(|e| match e {
            Error::Usage(msg) => Error::schema(at(""), msg),
            other => other,
        })?);
    }
    Ok(Instance {
        n: doc.n,
        m,
        goods: doc.goods,
        valuations,
        metadata: doc.metadata,
    })
}

fn mask_goods(mask: usize) -> String {
    let goods: Vec<String> = (0..usize::BITS as usize)
        .filter(|g| mask >> g & 1 == 1)
        .map(|g| g.to_string())
        .collect();
    format!("{{{}}}", goods.join(","))
}

pub fn parse_instance(path: &Path, opts: ParseOptions) -> Result<Instance> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance_str(&text, opts)
}

/// `{"bundles": [[0, 2], [1]]}` over `m` goods.
pub fn parse_allocation_str(text: &str, m: usize) -> Result<Allocation> {
    let doc: AllocationDoc = from_json(text)?;
    doc.into_allocation(m)
}

pub fn parse_allocation(path: &Path, m: usize) -> Result<Allocation> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_allocation_str(&text, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::valuation::ValueOracle;

    const FIG: &str = r#"{"n":2,"m":3,"goods":["a","b","c"],
        "valuations":[{"kind":"additive","values":["5","3","1"]},{"kind":"additive","values":["5","1","7/2"]}]}"#;

    #[test]
    fn parses_exact_rationals() {
        let inst = parse_instance_str(FIG, ParseOptions::default()).unwrap();
        assert_eq!((inst.n, inst.m), (2, 3));
        assert_eq!(inst.valuations[1].additive_values().unwrap()[2], frac(7, 2));
        assert_eq!(inst.good_name(1), "b");
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance_str(FIG, ParseOptions::default()).unwrap();
        let again = parse_instance_str(&inst.to_json().unwrap(), ParseOptions::default()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn numbers_are_rejected_with_a_pointer() {
        let text = r#"{"n":1,"m":1,"valuations":[{"kind":"additive","values":[0.5]}]}"#;
        match parse_instance_str(text, ParseOptions::default()) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/valuations/0/values/0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_table_key_names_the_mask() {
        let text = r#"{"n":1,"m":2,"valuations":[{"kind":"table","m":2,"entries":{"0":"0","1":"0","2":"1"}}]}"#;
        match parse_instance_str(text, ParseOptions::default()) {
            Err(Error::Schema { pointer, message }) => {
                assert_eq!(pointer, "/valuations/0/entries");
                assert!(message.contains("mask 3"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonmonotone_tables_need_opt_in() {
        let text = r#"{"n":1,"m":1,"valuations":[{"kind":"table","m":1,"entries":{"0":"0","1":"0"}}]}"#;
        assert!(parse_instance_str(text, ParseOptions::default()).is_ok());
        let bad = r#"{"n":1,"m":2,"valuations":[{"kind":"table","m":2,"entries":{"0":"0","1":"2","2":"0","3":"1"}}]}"#;
        assert!(matches!(
            parse_instance_str(bad, ParseOptions::default()),
            Err(Error::Schema { .. })
        ));
        assert!(parse_instance_str(
            bad,
            ParseOptions {
                allow_nonmonotone: true
            }
        )
        .is_ok());
    }

    #[test]
    fn allocation_files() {
        let a = parse_allocation_str(r#"{"bundles":[[0,2],[1]]}"#, 3).unwrap();
        assert_eq!(a, Allocation::from_goods(&[&[0, 2], &[1]], 3).unwrap());
        assert!(parse_allocation_str(r#"{"bundles":[[0,2],[2]]}"#, 3).is_err());
        assert!(matches!(
            parse_allocation_str(r#"{"bundle":[]}"#, 3),
            Err(Error::Schema { .. })
        ));
    }
}
