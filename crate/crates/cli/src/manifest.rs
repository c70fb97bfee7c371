//! `key = value` files whose keys are long flag names.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use freefib::{Error, Result};

/// Reads a manifest into command-line arguments. `key = true` becomes a bare
/// flag and `key = false` is dropped.
pub fn read(path: &Path) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(path, &text)
}

fn parse(path: &Path, text: &str) -> Result<Vec<OsString>> {
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                reason: "expected `key = value`".into(),
            });
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim().trim_matches('"');
        if key == "manifest" {
            continue;
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Splices manifest arguments in after the subcommand path so that flags
/// given on the command line come later and win.
pub fn splice(argv: &[OsString], path_len: usize, extra: Vec<OsString>) -> Vec<OsString> {
    let mut out = argv[..path_len].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[path_len..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let args = parse(Path::new("m"), "# c\nn = 4\n\nfull = true\nx = false\n--seed=\"7\"\n").unwrap();
        assert_eq!(args, ["--n", "4", "--full", "--seed", "7"]);
    }

    #[test]
    fn reports_bad_line() {
        let err = parse(Path::new("m"), "n = 4\noops\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
