//! Flat `key = value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Problems with the configuration text itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub source: String,
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source, self.line, self.msg)
    }
}

impl std::error::Error for SyntaxError {}

/// Keys and values that parse but are not acceptable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

fn parse_line(source: &str, line: usize, raw: &str) -> Result<Option<(String, String)>, SyntaxError> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let err = |msg: &str| SyntaxError {
        source: source.to_string(),
        line,
        msg: msg.to_string(),
    };
    let (key, value) = text.split_once('=').ok_or_else(|| err("expected key = value"))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(&format!("invalid key {key:?}")));
    }
    if value.is_empty() {
        return Err(err(&format!("missing value for {key}")));
    }
    Ok(Some((key.to_string(), value.to_string())))
}

/// Parsed settings. Every key must be read with one of the getters before
/// [`Config::finish`], which rejects anything left unread.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(source: &str, text: &str) -> Result<Self, SyntaxError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            if let Some((k, v)) = parse_line(source, i + 1, raw)? {
                if cfg.values.insert(k.clone(), v).is_some() {
                    return Err(SyntaxError {
                        source: source.to_string(),
                        line: i + 1,
                        msg: format!("duplicate key {k}"),
                    });
                }
            }
        }
        Ok(cfg)
    }

    /// Applies `key=value` overrides given on the command line.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), SyntaxError> {
        for (i, o) in overrides.iter().enumerate() {
            let (k, v) = parse_line("command line", i + 1, o)?.ok_or_else(|| SyntaxError {
                source: "command line".into(),
                line: i + 1,
                msg: format!("empty override {o:?}"),
            })?;
            self.values.insert(k, v);
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let v = self.values.remove(key)?;
        self.used.insert(key.to_string(), v.clone());
        Some(v)
    }

    fn record(&mut self, key: &str, shown: String) {
        self.used.entry(key.to_string()).or_insert(shown);
    }

    fn convert<T: FromStr>(key: &str, v: &str) -> Result<T, ValidationError> {
        v.parse()
            .map_err(|_| ValidationError(format!("{key} = {v:?} is not a valid {}", std::any::type_name::<T>())))
    }

    pub fn get_or<T: FromStr + fmt::Display>(&mut self, key: &str, default: T) -> Result<T, ValidationError> {
        match self.take(key) {
            Some(v) => Self::convert(key, &v),
            None => {
                self.record(key, default.to_string());
                Ok(default)
            }
        }
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, ValidationError> {
        let v = self
            .take(key)
            .ok_or_else(|| ValidationError(format!("missing required key {key}")))?;
        Self::convert(key, &v)
    }

    pub fn list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, ValidationError> {
        match self.take(key) {
            Some(v) => v.split(',').map(|s| Self::convert(key, s.trim())).collect(),
            None => {
                let shown: Vec<String> = default.iter().map(|x| x.to_string()).collect();
                self.record(key, shown.join(","));
                Ok(default.to_vec())
            }
        }
    }

    /// A point written `x,y`.
    pub fn point(&mut self, key: &str) -> Result<(f64, f64), ValidationError> {
        let v = self
            .take(key)
            .ok_or_else(|| ValidationError(format!("missing required key {key}")))?;
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(ValidationError(format!("{key} = {v:?} must be x,y")));
        }
        Ok((Self::convert(key, parts[0])?, Self::convert(key, parts[1])?))
    }

    /// Fails on keys no getter asked for.
    pub fn finish(&self) -> Result<(), ValidationError> {
        if self.values.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.values.keys().map(String::as_str).collect();
        Err(ValidationError(format!("unknown keys: {}", keys.join(", "))))
    }

    /// Resolved settings, defaults included, sorted by key.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let mut c = Config::parse("t", "# header\n\nn = 8  # robots\nshape=grid\n").unwrap();
        assert_eq!(c.require::<usize>("n").unwrap(), 8);
        assert_eq!(c.require::<String>("shape").unwrap(), "grid");
        assert!(c.finish().is_ok());
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = Config::parse("t", "n = 8\nbogus\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(Config::parse("t", "n = 1\nn = 2\n").is_err());
        assert!(Config::parse("t", "bad key = 1\n").is_err());
        assert!(Config::parse("t", "n =\n").is_err());
    }

    #[test]
    fn unknown_and_invalid_values() {
        let mut c = Config::parse("t", "n = eight\nextra = 1\n").unwrap();
        assert!(c.require::<usize>("n").is_err());
        assert!(c.finish().unwrap_err().0.contains("extra"));
    }

    #[test]
    fn overrides_and_defaults() {
        let mut c = Config::parse("t", "n = 8\n").unwrap();
        c.apply_overrides(&["n=9".into(), "A=0.1,0.2".into()]).unwrap();
        assert_eq!(c.require::<usize>("n").unwrap(), 9);
        assert_eq!(c.list_or("A", &[0.5]).unwrap(), vec![0.1, 0.2]);
        assert_eq!(c.get_or("eps", 2i64).unwrap(), 2);
        let r = c.resolved();
        assert_eq!(r["eps"], "2");
        assert_eq!(r["A"], "0.1,0.2");
        assert!(c.apply_overrides(&["novalue".into()]).is_err());
    }

    #[test]
    fn points() {
        let mut c = Config::parse("t", "s1 = 0.2, 0.3\ns2 = 1\n").unwrap();
        assert_eq!(c.point("s1").unwrap(), (0.2, 0.3));
        assert!(c.point("s2").is_err());
    }
}
