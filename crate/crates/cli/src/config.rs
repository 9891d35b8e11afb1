//! Optional `key = value` configuration file. Command-line flags take
//! precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: [&str; 7] = [
    "seed",
    "jobs",
    "reproducible",
    "packings",
    "points",
    "angle_configs",
    "mc_samples",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let (k, v) = (k.trim(), v.trim().trim_matches('"'));
            if !KEYS.contains(&k) {
                return Err(format!("line {}: unknown key `{k}`", n + 1));
            }
            values.insert(k.to_string(), v.to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        FileConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: cannot parse `{v}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = FileConfig::parse("# settings\nseed = 7\njobs=2 # inline\n\nreproducible = true\n").unwrap();
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get::<usize>("jobs").unwrap(), Some(2));
        assert_eq!(c.get::<bool>("reproducible").unwrap(), Some(true));
        assert_eq!(c.get::<u64>("points").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FileConfig::parse("seed 7").is_err());
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("seed = x").unwrap().get::<u64>("seed").is_err());
    }
}
