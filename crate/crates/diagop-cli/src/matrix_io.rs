//! Matrix input for the epsilon-net command: CSV (row-major reals) or JSON
//! with `re`/`im` blocks.

use std::path::Path;

use diagop::eigen::CMatrix;
use serde_json::json;

use crate::CliError;

pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

fn parse_csv(text: &str) -> Result<CMatrix, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse()).collect();
        rows.push(row.map_err(|e| CliError::Input(format!("line {}: {e}", lineno + 1)))?);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input("matrix must be square and nonempty".into()));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(CMatrix::from_real(n, &flat))
}

fn parse_json(text: &str) -> Result<CMatrix, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Dto {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    }
    let dto: Dto = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    let n = dto.re.len();
    if n == 0 || dto.re.iter().any(|r| r.len() != n) {
        return Err(CliError::Input("`re` must be square and nonempty".into()));
    }
    let re: Vec<f64> = dto.re.into_iter().flatten().collect();
    let im: Vec<f64> = match dto.im {
        None => vec![0.0; n * n],
        Some(im) => {
            if im.len() != n || im.iter().any(|r| r.len() != n) {
                return Err(CliError::Input("`im` must match the shape of `re`".into()));
            }
            im.into_iter().flatten().collect()
        }
    };
    Ok(CMatrix::from_parts(n, &re, &im))
}

pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    let n = m.n;
    let re: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
        .collect();
    let im: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
        .collect();
    json!({"re": re, "im": im})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = parse_csv("0, 1\n1, 0\n").unwrap();
        assert_eq!(m.n, 2);
        assert_eq!(m[(0, 1)].re, 1.0);
    }

    #[test]
    fn json_with_imaginary_part() {
        let m = parse_json(r#"{"re": [[0,0],[0,0]], "im": [[0,-1],[1,0]]}"#).unwrap();
        assert_eq!(m[(1, 0)].im, 1.0);
        assert!(m.hermitian_defect() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        assert!(parse_csv("1,2\n3\n").is_err());
        assert!(parse_json(r#"{"re": [[1,2]]}"#).is_err());
    }
}
