//! Loading matrices, tuples and exponent boxes from command-line values.

use std::fmt;
use std::fs;

use btdist::building::ExponentBox;
use btdist::{MatrixFile, MatrixRep, PrimeContext};

/// Malformed input; reported on stderr with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<btdist::Error> for InputError {
    fn from(e: btdist::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(InputError(msg.into()))
}

/// Resolves the context from `--p/--d` and whatever the matrix files say.
pub struct Loader {
    p: Option<u64>,
    d: Option<usize>,
}

impl Loader {
    pub fn new(p: Option<u64>, d: Option<usize>) -> Self {
        Loader { p, d }
    }

    fn check_file(&mut self, file: &MatrixFile) -> Result<()> {
        for (name, flag, found) in [("p", self.p.map(|x| x as usize), file.p as usize), ("d", self.d, file.d)] {
            if let Some(want) = flag {
                if want != found {
                    return fail(format!("matrix has {name} = {found} but --{name} {want} was given"));
                }
            }
        }
        self.p = Some(file.p);
        self.d = Some(file.d);
        Ok(())
    }

    pub fn ctx(&self) -> Result<PrimeContext> {
        match (self.p, self.d) {
            (Some(p), Some(d)) => Ok(PrimeContext::new(p, d)?),
            _ => fail("--p and --d are required when no matrix file fixes them"),
        }
    }

    fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| InputError(format!("{path}: {e}")))
    }

    /// Loads every matrix argument; `identity` is resolved after the files
    /// have fixed the context.
    pub fn matrices(&mut self, specs: &[&str]) -> Result<Vec<MatrixRep>> {
        let mut files = Vec::new();
        for s in specs {
            if *s == "identity" {
                files.push(None);
            } else {
                let f: MatrixFile = Self::read_json(s)?;
                self.check_file(&f)?;
                files.push(Some(f));
            }
        }
        let ctx = self.ctx()?;
        files
            .into_iter()
            .map(|f| match f {
                None => Ok(MatrixRep::identity(ctx)),
                Some(f) => Ok(MatrixRep::from_file(f)?),
            })
            .collect()
    }

    /// A tuple file holds a JSON list of matrices.
    pub fn tuple(&mut self, path: &str) -> Result<Vec<MatrixRep>> {
        let files: Vec<MatrixFile> = Self::read_json(path)?;
        if files.is_empty() {
            return fail(format!("{path}: empty tuple"));
        }
        for f in &files {
            self.check_file(f)?;
        }
        files.into_iter().map(|f| Ok(MatrixRep::from_file(f)?)).collect()
    }
}

/// `lo:hi` for every coordinate, or one `lo:hi` per coordinate separated by commas.
pub fn parse_box(s: &str, d: usize) -> Result<ExponentBox> {
    let parse_one = |part: &str| -> Result<(i64, i64)> {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| InputError(format!("bad box bound {part:?}, expected lo:hi")))?;
        let lo: i64 = lo.trim().parse().map_err(|_| InputError(format!("bad box bound {part:?}")))?;
        let hi: i64 = hi.trim().parse().map_err(|_| InputError(format!("bad box bound {part:?}")))?;
        if lo > hi {
            return fail(format!("empty box bound {part:?}"));
        }
        Ok((lo, hi))
    };
    let parts: Vec<&str> = s.split(',').collect();
    let bounds = match parts.len() {
        1 => vec![parse_one(parts[0])?; d],
        n if n == d => parts.into_iter().map(parse_one).collect::<Result<_>>()?,
        n => return fail(format!("box has {n} bounds for dimension {d}")),
    };
    Ok(ExponentBox { bounds })
}
