//! Whitespace-separated `key=value` specs, e.g. `kind=pseudorandom seed=7`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KvSpec {
    entries: BTreeMap<String, String>,
    raw: String,
}

impl KvSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for token in text.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{token}`")))?;
            if k.is_empty() {
                return Err(Error::Parse(format!("empty key in `{token}`")));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key `{k}` in `{text}`")));
            }
        }
        Ok(KvSpec {
            entries,
            raw: text.trim().to_string(),
        })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn require_str(&mut self, key: &str) -> Result<String> {
        self.take_str(key)
            .ok_or_else(|| Error::Parse(format!("missing key `{key}` in `{}`", self.raw)))
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}` in `{}`", self.raw))),
        }
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| Error::Parse(format!("missing key `{key}` in `{}`", self.raw)))
    }

    /// Fails if any key was left unconsumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Parse(format!("unknown key `{k}` in `{}`", self.raw))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_leftovers() {
        let mut kv = KvSpec::parse("kind=pseudorandom seed=7").unwrap();
        assert_eq!(kv.require_str("kind").unwrap(), "pseudorandom");
        assert_eq!(kv.require::<u64>("seed").unwrap(), 7);
        kv.finish().unwrap();

        let mut kv = KvSpec::parse("kind=constant bit=1 colour=red").unwrap();
        kv.require_str("kind").unwrap();
        kv.require::<u8>("bit").unwrap();
        assert!(kv.finish().is_err());
    }

    #[test]
    fn malformed_tokens() {
        assert!(KvSpec::parse("kind").is_err());
        assert!(KvSpec::parse("=3").is_err());
        assert!(KvSpec::parse("a=1 a=2").is_err());
    }
}
