//! Space arguments: a distance file, or a generator spec such as
//! `cantor:10`, `grid:32`, `progression:64`, `lattice:16` or `path:513:0.00390625`.
//! The colon may be omitted for single-parameter generators (`cantor10`).

use std::path::Path;

use assouad_lab::constructions::{cantor_sample, path_graph, progression, unit_grid, unit_square_lattice};
use assouad_lab::io::read_space;
use assouad_lab::FiniteMetricSpace;

use crate::CliError;

const GENERATORS: [&str; 5] = ["cantor", "grid", "progression", "lattice", "path"];

/// True when `arg` names a generator rather than a file.
pub fn is_generator(arg: &str) -> bool {
    split(arg).is_some_and(|(name, _)| GENERATORS.contains(&name))
}

fn split(arg: &str) -> Option<(&str, Vec<&str>)> {
    if let Some((name, rest)) = arg.split_once(':') {
        return Some((name, rest.split(':').collect()));
    }
    let cut = arg.find(|c: char| c.is_ascii_digit())?;
    Some((&arg[..cut], vec![&arg[cut..]]))
}

pub fn load(arg: &str, field: &str, tol: f64) -> Result<FiniteMetricSpace, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return read_space(path, tol).map_err(|e| CliError::Validation(format!("{field}: {e}")));
    }
    if is_generator(arg) {
        return generate(arg).map_err(|e| CliError::Validation(format!("{field}: {e}")));
    }
    Err(CliError::Validation(format!("{field}: {arg:?} is neither a file nor a generator spec")))
}

pub fn generate(spec: &str) -> Result<FiniteMetricSpace, String> {
    let (name, params) = split(spec).ok_or_else(|| format!("bad generator spec {spec:?}"))?;
    let int = |k: usize| -> Result<usize, String> {
        params
            .get(k)
            .ok_or_else(|| format!("{name} needs a parameter"))?
            .parse::<usize>()
            .map_err(|e| format!("{name}: {e}"))
    };
    let space = match name {
        "cantor" => cantor_sample(int(0)? as u32),
        "grid" => unit_grid(int(0)?),
        "progression" => progression(int(0)?),
        "lattice" => unit_square_lattice(int(0)?),
        "path" => {
            let mesh = match params.get(1) {
                Some(m) => m.parse::<f64>().map_err(|e| format!("path mesh: {e}"))?,
                None => 1.0,
            };
            path_graph(int(0)?, mesh)
        }
        _ => return Err(format!("unknown generator {name:?}")),
    };
    space.map_err(|e| e.to_string())
}
