//! Flat `key = value` text files. Blank lines and lines starting with `#`
//! are ignored; keys may repeat only where the consumer allows it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(what: &'static str, text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(eq) = raw.find('=') else {
            return Err(Error::parse(what, line, 1, "expected `key = value`"));
        };
        let key = raw[..eq].trim();
        if key.is_empty() {
            return Err(Error::parse(what, line, 1, "empty key"));
        }
        out.push(Entry {
            line,
            key: key.to_owned(),
            value: raw[eq + 1..].trim().to_owned(),
        });
    }
    Ok(out)
}

/// Rejects a second occurrence of any key.
pub fn unique(what: &'static str, entries: &[Entry]) -> Result<()> {
    let mut seen = std::collections::BTreeMap::new();
    for e in entries {
        if let Some(first) = seen.insert(e.key.as_str(), e.line) {
            return Err(Error::parse(what, e.line, 1, format!("`{}` already set on line {first}", e.key)));
        }
    }
    Ok(())
}

pub fn parse_value<T: std::str::FromStr>(what: &'static str, e: &Entry) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    e.value
        .parse()
        .map_err(|err| Error::parse(what, e.line, e.key.len() + 1, format!("bad value for `{}`: {err}", e.key)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_trims() {
        let e = parse("spec", "# hi\n\n a = b c \nx=1\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].line, e[0].key.as_str(), e[0].value.as_str()), (3, "a", "b c"));
        assert!(parse("spec", "novalue\n").is_err());
        assert!(unique("spec", &parse("spec", "a=1\na=2").unwrap()).is_err());
    }
}
