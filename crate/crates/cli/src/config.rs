//! Flat key = value config files mirroring the CLI flags, plus the
//! env < config < flags resolution order.

use crate::CliError;
use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

/// Parsed config file. Keys use the long flag names ("grid-resolution",
/// "seed", ...). Unknown keys are allowed so one file can serve several
/// subcommands.
#[derive(Debug, Default)]
pub struct Resolver {
    values: HashMap<String, String>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Core(bhlab::Error::Parse {
                    line: idx + 1,
                    message: format!("config line is not 'key = value': '{line}'"),
                }));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Core(bhlab::Error::Parse {
                    line: 0,
                    message: format!("config key '{key}' = '{raw}': {e}"),
                })
            }),
        }
    }
}

/// flag wins over config; config wins over the environment.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    key: &str,
    env_var: Option<&str>,
    resolver: &Resolver,
) -> Result<Option<T>, CliError>
where
    T::Err: Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(v) = resolver.get::<T>(key)? {
        return Ok(Some(v));
    }
    if let Some(var) = env_var {
        if let Ok(raw) = std::env::var(var) {
            return raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Core(bhlab::Error::Parse {
                    line: 0,
                    message: format!("env {var} = '{raw}': {e}"),
                })
            });
        }
    }
    Ok(None)
}
