//! Plain-text problem files: first line `N`, then `N` rows of the covariance
//! `Sigma_X`, `N` rows of the form matrix `Sigma`, and one row for the mean
//! `mu`, all whitespace-separated decimals. Blank lines are ignored.

use nalgebra::{DMatrix, DVector};
use std::path::Path;

use crate::CliError;

pub struct ProblemFile {
    pub mu: DVector<f64>,
    pub sigma_x: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

pub fn parse_problem_file(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let bad = |msg: String| CliError::user(format!("{}: {msg}", path.display()));

    let n: usize = lines
        .next()
        .ok_or_else(|| bad("missing dimension line".into()))?
        .trim()
        .parse()
        .map_err(|_| bad("first line must be the dimension N".into()))?;
    if n == 0 {
        return Err(bad("dimension must be at least 1".into()));
    }

    let mut read_row = |what: &str| -> Result<Vec<f64>, CliError> {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("unexpected end of file while reading {what}")))?;
        let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|_| bad(format!("non-numeric entry in {what}")))?;
        if row.len() != n {
            return Err(bad(format!(
                "{what} has {} entries, expected {n}",
                row.len()
            )));
        }
        Ok(row)
    };

    let mut sigma_x = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = read_row(&format!("sigma_x row {}", i + 1))?;
        for (j, v) in row.into_iter().enumerate() {
            sigma_x[(i, j)] = v;
        }
    }
    let mut sigma = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = read_row(&format!("sigma row {}", i + 1))?;
        for (j, v) in row.into_iter().enumerate() {
            sigma[(i, j)] = v;
        }
    }
    let mu = DVector::from_vec(read_row("mu")?);
    if lines.next().is_some() {
        return Err(bad("trailing content after mu row".into()));
    }
    Ok(ProblemFile { mu, sigma_x, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_identity_two_by_two() {
        let f = write_tmp("2\n1 0\n0 1\n1 0\n0 1\n0 0\n");
        let p = parse_problem_file(f.path()).unwrap();
        assert_eq!(p.mu.len(), 2);
        assert_eq!(p.sigma_x, DMatrix::identity(2, 2));
        assert_eq!(p.sigma, DMatrix::identity(2, 2));
    }

    #[test]
    fn rejects_short_row() {
        let f = write_tmp("2\n1 0\n0\n1 0\n0 1\n0 0\n");
        assert!(parse_problem_file(f.path()).is_err());
    }

    #[test]
    fn rejects_non_numeric() {
        let f = write_tmp("2\n1 x\n0 1\n1 0\n0 1\n0 0\n");
        assert!(parse_problem_file(f.path()).is_err());
    }

    #[test]
    fn rejects_trailing_garbage() {
        let f = write_tmp("1\n1\n1\n0\nextra\n");
        assert!(parse_problem_file(f.path()).is_err());
    }
}
