//! Flat `key = value` text format with `#` comments.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type KvMap = BTreeMap<String, String>;

pub fn parse(text: &str) -> Result<KvMap> {
    let mut map = KvMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("duplicate key '{k}'"),
            });
        }
    }
    Ok(map)
}

fn missing(key: &str) -> Error {
    Error::Parse {
        line: 0,
        msg: format!("missing key '{key}'"),
    }
}

pub fn get_str<'a>(map: &'a KvMap, key: &str) -> Result<&'a str> {
    map.get(key).map(String::as_str).ok_or_else(|| missing(key))
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: format!("'{key}': '{v}' is not a number"),
    })?;
    if !x.is_finite() {
        return Err(Error::Parse {
            line: 0,
            msg: format!("'{key}' must be finite"),
        });
    }
    Ok(x)
}

pub fn get_f64(map: &KvMap, key: &str) -> Result<f64> {
    parse_f64(key, get_str(map, key)?)
}

pub fn get_usize(map: &KvMap, key: &str) -> Result<usize> {
    let v = get_str(map, key)?;
    v.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: format!("'{key}': '{v}' is not a non-negative integer"),
    })
}

pub fn get_u64(map: &KvMap, key: &str) -> Result<u64> {
    let v = get_str(map, key)?;
    v.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: format!("'{key}': '{v}' is not a non-negative integer"),
    })
}

/// Comma-separated list of numbers.
pub fn get_f64_list(map: &KvMap, key: &str) -> Result<Vec<f64>> {
    let v = get_str(map, key)?;
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let m = parse("# header\nxi = 0.9  # amplitude\n\ngrid = 0.25, 0.5,1.0\n").unwrap();
        assert_eq!(get_f64(&m, "xi").unwrap(), 0.9);
        assert_eq!(get_f64_list(&m, "grid").unwrap(), vec![0.25, 0.5, 1.0]);
        assert!(get_f64(&m, "z").is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse("xi 0.9"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("a = 1\na = 2"), Err(Error::Parse { line: 2, .. })));
        let m = parse("x = nan").unwrap();
        assert!(get_f64(&m, "x").is_err());
    }
}
