//! Flat `key = value` config files merged in front of the command-line flags.

use std::ffi::OsString;

use clap::{ArgAction, Command};

/// Parses `key = value` lines; `#` starts a comment, values may be double-quoted.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{raw}`", i + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// The `--config` path among the subcommand arguments, if any.
fn config_path(args: &[OsString]) -> Result<Option<OsString>, String> {
    let mut path = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().cloned().ok_or("--config needs a path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        }
    }
    Ok(path)
}

/// Inserts config entries as flags right after the subcommand so later flags override them.
/// Unknown keys are rejected.
pub fn merge_config(args: Vec<OsString>, cli: &Command) -> Result<Vec<OsString>, String> {
    let Some(sub_name) = args.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let Some(sub) = cli.find_subcommand(&sub_name) else {
        return Ok(args);
    };
    let Some(path) = config_path(&args[2..])? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("reading {}: {e}", path.to_string_lossy()))?;
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in parse_config(&text)? {
        let long = key.replace('_', "-");
        if long == "config" {
            return Err("config files cannot include other config files".into());
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .ok_or_else(|| format!("unknown config key `{key}` for `{sub_name}`"))?;
        let flag = OsString::from(format!("--{long}"));
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => injected.push(flag),
                "false" => {}
                _ => return Err(format!("`{key}` expects true or false, got `{value}`")),
            },
            _ => {
                let multi = arg.get_num_args().is_some_and(|r| r.max_values() > 1);
                injected.push(flag);
                if multi {
                    injected.extend(value.split_whitespace().map(OsString::from));
                } else {
                    injected.push(OsString::from(value));
                }
            }
        }
    }
    let mut merged = args[..2].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&args[2..]);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Cli;
    use clap::CommandFactory;

    #[test]
    fn parses_lines() {
        let kv = parse_config("# comment\nt0 = 0.1\n\nt2 = \"0.2,0.0\"  # trailing\n").unwrap();
        assert_eq!(kv, vec![("t0".into(), "0.1".into()), ("t2".into(), "0.2,0.0".into())]);
        assert!(parse_config("t0 0.1").is_err());
    }

    #[test]
    fn flags_win_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "t0 = 0.1\nN = 8\nsteps = 100\nburn_in = 10\n").unwrap();
        let args: Vec<OsString> = ["nmm", "gas", "--config", path.to_str().unwrap(), "--steps", "200"]
            .iter()
            .map(OsString::from)
            .collect();
        let merged = merge_config(args, &Cli::command()).unwrap();
        let cli = <Cli as clap::Parser>::try_parse_from(merged).unwrap();
        let crate::args::Command::Gas(g) = cli.command else { panic!() };
        assert_eq!((g.steps, g.n, g.burn_in), (200, 8, Some(10)));

        std::fs::write(&path, "t0 = 0.1\nbogus = 1\n").unwrap();
        let args: Vec<OsString> = ["nmm", "gas", "--config", path.to_str().unwrap()]
            .iter()
            .map(OsString::from)
            .collect();
        assert!(merge_config(args, &Cli::command()).unwrap_err().contains("bogus"));
    }
}
