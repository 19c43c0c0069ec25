// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Resolution of every run setting from, in order of precedence, a flag, a
//! `--config` file, and a built-in default. The resolved values are kept so
//! that they can be written into the run manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};
use crate::manifest::MANIFEST_MARKER;

/// Configuration being resolved for one command.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    origin: String,
    consumed: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    /// No configuration file: flags and defaults only.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Reads a configuration file for `command`.
    pub fn from_file(path: &Path, command: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string(), command)
    }

    /// Parses either a flat `key = value` file (`#` starts a comment) or the
    /// manifest header of a previously written CSV file, in which case the
    /// `# config key=value` lines are used and the command must match.
    pub fn parse(text: &str, origin: &str, command: &str) -> CliResult<Self> {
        let mut file = BTreeMap::new();
        let is_manifest = text.lines().next().map(str::trim) == Some(MANIFEST_MARKER);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let entry = if is_manifest {
                if !line.starts_with('#') {
                    break;
                }
                if let Some(cmd) = line.strip_prefix("# command:") {
                    let cmd = cmd.trim();
                    if cmd != command {
                        return Err(CliError::usage(format!(
                            "{origin}: manifest was written by `{cmd}`, not `{command}`"
                        )));
                    }
                }
                match line.strip_prefix("# config ") {
                    Some(kv) => kv,
                    None => continue,
                }
            } else {
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                line
            };
            let (k, v) = entry.split_once('=').ok_or_else(|| {
                CliError::usage(format!("{origin}:{}: expected `key = value`, found `{line}`", i + 1))
            })?;
            file.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self {
            file,
            origin: origin.to_string(),
            ..Self::default()
        })
    }

    fn file_value<T: FromStr>(&mut self, key: &str) -> CliResult<Option<T>> {
        self.consumed.insert(key.to_string());
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::usage(format!("{}: invalid value `{raw}` for `{key}`", self.origin))
            }),
        }
    }

    fn lookup<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        let from_file = self.file_value::<T>(key)?;
        Ok(flag.or(from_file))
    }

    /// Optional number; recorded only when present.
    pub fn opt_f64(&mut self, key: &str, flag: Option<f64>) -> CliResult<Option<f64>> {
        let v = self.lookup(key, flag)?;
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(CliError::usage(format!("--{key}: must be finite (got {x})")));
            }
            self.resolved.insert(key.to_string(), format!("{x:?}"));
        }
        Ok(v)
    }

    /// Number with an optional default; missing without default is a usage
    /// error naming the flag.
    pub fn f64(&mut self, key: &str, flag: Option<f64>, default: Option<f64>) -> CliResult<f64> {
        let v = self.opt_f64(key, flag)?.or(default).ok_or_else(|| missing(key))?;
        self.resolved.insert(key.to_string(), format!("{v:?}"));
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn u64(&mut self, key: &str, flag: Option<u64>, default: u64) -> CliResult<u64> {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Boolean switch: set by the flag or by `key = true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let v = flag || self.file_value::<bool>(key)?.unwrap_or(false);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Optional free-form text; recorded only when present.
    pub fn opt_text(&mut self, key: &str, flag: Option<String>) -> CliResult<Option<String>> {
        let v = self.lookup(key, flag)?;
        if let Some(s) = &v {
            self.resolved.insert(key.to_string(), s.clone());
        }
        Ok(v)
    }

    /// Free-form text with a default.
    pub fn text(&mut self, key: &str, flag: Option<String>, default: &str) -> CliResult<String> {
        let v = self.lookup(key, flag)?.unwrap_or_else(|| default.to_string());
        self.resolved.insert(key.to_string(), v.clone());
        Ok(v)
    }

    /// One of a fixed set of words.
    pub fn choice(
        &mut self,
        key: &str,
        flag: Option<String>,
        choices: &[&str],
        default: Option<&str>,
    ) -> CliResult<String> {
        let v = self
            .lookup(key, flag)?
            .or_else(|| default.map(str::to_string))
            .ok_or_else(|| missing(key))?;
        if !choices.contains(&v.as_str()) {
            return Err(CliError::usage(format!(
                "--{key}: expected one of {} (got `{v}`)",
                choices.join("|")
            )));
        }
        self.resolved.insert(key.to_string(), v.clone());
        Ok(v)
    }

    /// Finishes resolution: configuration keys that no setting asked for
    /// are reported as errors, so typos never pass silently.
    pub fn finish(self) -> CliResult<BTreeMap<String, String>> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.consumed.contains(*k)).collect();
        if let Some(k) = unknown.first() {
            return Err(CliError::usage(format!("{}: unknown configuration key `{k}`", self.origin)));
        }
        Ok(self.resolved)
    }
}

fn missing(key: &str) -> CliError {
    CliError::usage(format!("missing required setting --{key}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_the_file() {
        let mut s = Settings::parse("m = 2\ngamma=0.5\n# note\n", "cfg", "variance").unwrap();
        assert_eq!(s.f64("m", Some(3.0), None).unwrap(), 3.0);
        assert_eq!(s.f64("gamma", None, None).unwrap(), 0.5);
        assert_eq!(s.f64("omega", None, Some(1.0)).unwrap(), 1.0);
        let resolved = s.finish().unwrap();
        assert_eq!(resolved["m"], "3.0");
        assert_eq!(resolved["gamma"], "0.5");
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        let s = Settings::parse("mass_typo = 2\n", "cfg", "variance").unwrap();
        assert!(matches!(s.finish(), Err(CliError::Usage(m)) if m.contains("mass_typo")));
        let mut s = Settings::parse("m = heavy\n", "cfg", "variance").unwrap();
        assert!(matches!(s.f64("m", None, None), Err(CliError::Usage(_))));
        assert!(matches!(
            Settings::parse("just words\n", "cfg", "variance"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn choices_are_checked() {
        let mut s = Settings::empty();
        assert!(s.choice("model", Some("quantum".into()), &["exact", "free"], None).is_err());
        assert_eq!(s.choice("model", None, &["exact", "free"], Some("free")).unwrap(), "free");
    }

    #[test]
    fn manifest_headers_replay() {
        let text = format!(
            "{MANIFEST_MARKER}\n# command: sweep\n# timestamp: 1\n# config t=10.0\n# config points=5\nkbt,var\n1,2\n"
        );
        let mut s = Settings::parse(&text, "run.csv", "sweep").unwrap();
        assert_eq!(s.usize("points", None, 200).unwrap(), 5);
        assert_eq!(s.f64("t", None, None).unwrap(), 10.0);
        assert!(Settings::parse(&text, "run.csv", "table1").is_err());
    }
}
