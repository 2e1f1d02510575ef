//! Hypothesis files: one statement per line, `#` starts a comment outside
//! quoted names. A bare pattern (no `-> target`) is only accepted with
//! expansion, which tests it against every event outside the pattern.

use std::collections::BTreeSet;
use std::path::Path;

use progressa_core::formula::{parse_statement, BoundHypothesis, Hypothesis, Statement};
use progressa_core::EventCatalog;

use crate::error::{CliError, Result};

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut escaped = false;
    for (k, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..k],
            _ => {}
        }
    }
    line
}

pub fn parse_hypotheses(text: &str, catalog: &EventCatalog, expand: bool, path: &Path) -> Result<Vec<BoundHypothesis>> {
    let mut out: Vec<BoundHypothesis> = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let stmt = strip_comment(raw).trim();
        if stmt.is_empty() {
            continue;
        }
        let at = |source| CliError::Hypothesis { path: path.to_path_buf(), line, source };
        let (hypotheses, generated) = match parse_statement(stmt).map_err(at)? {
            Statement::Hypothesis(h) => (vec![h], false),
            Statement::Pattern(f) if expand => (Hypothesis::expand(&f, catalog), true),
            Statement::Pattern(_) => {
                return Err(CliError::Usage(format!(
                    "{}:{line}: `{stmt}` has no target; add `-> EVENT` or pass --expand-hypotheses",
                    path.display()
                )))
            }
        };
        for h in hypotheses {
            let bound = h.bind(catalog).map_err(at)?;
            let key = (bound.cnf.clone(), bound.target);
            if !seen.insert(key) {
                if generated {
                    continue;
                }
                return Err(at(progressa_core::Error::DuplicateHypothesis(bound.text)));
            }
            out.push(bound);
        }
    }
    Ok(out)
}

pub fn read_hypotheses(path: &Path, catalog: &EventCatalog, expand: bool) -> Result<Vec<BoundHypothesis>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_hypotheses(&text, catalog, expand, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> EventCatalog {
        EventCatalog::new(["a", "b", "c", "d"]).unwrap()
    }

    fn parse(text: &str, expand: bool) -> Result<Vec<BoundHypothesis>> {
        parse_hypotheses(text, &catalog(), expand, Path::new("h.txt"))
    }

    #[test]
    fn comments_and_blank_lines() {
        let hs = parse("# header\n\na ^ b -> c  # trailing\n\"x#y\" -> d # quoted names keep their hash\n", false);
        // The quoted name is unknown to the catalog, reported on its line.
        assert!(matches!(hs, Err(CliError::Hypothesis { line: 4, .. })));
        let hs = parse("# header\n\na ^ b -> c  # trailing\n", false).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].target, 2);
    }

    #[test]
    fn patterns_need_expansion() {
        assert!(matches!(parse("a ^ b\n", false), Err(CliError::Usage(_))));
        let hs = parse("a ^ b\n", true).unwrap();
        assert_eq!(hs.iter().map(|h| h.target).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn expansion_skips_explicit_duplicates() {
        let hs = parse("a ^ b -> c\nb ^ a\n", true).unwrap();
        assert_eq!(hs.len(), 2);
        assert!(matches!(parse("a ^ b -> c\nb ^ a -> c\n", false), Err(CliError::Hypothesis { line: 2, .. })));
    }
}
