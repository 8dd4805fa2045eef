//! What `run` and `render` operate on: a street file or a family instance.

use std::path::Path;

use streetwalker::families::{gen_convex, gen_corridor, gen_funnel, gen_single_gap, GenError};
use streetwalker::harness::{Instance, CORRIDOR_WIDTH, FUNNEL_DEPTH};
use streetwalker::street::{load_street, StreetError};

use crate::CliError;

/// Family instance syntax accepted in place of a file:
///
/// ```text
/// corridor:<offset>          target at signed walking distance <offset>
/// funnel:<degrees>[:<depth>] opening angle in degrees, default depth 10
/// single-gap:<seed>
/// convex:<seed>
/// ```
pub fn resolve(spec: &str) -> Result<Instance, CliError> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        let street = load_street(&text).map_err(|e| street_error(spec, e))?;
        return Ok(Instance {
            id: spec.to_string(),
            street,
            base_step: None,
        });
    }
    let (family, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(':').collect() };
    let num = |i: usize, default: Option<f64>| -> Result<f64, CliError> {
        match nums.get(i) {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("`{s}` is not a number in `{spec}`"))),
            None => default.ok_or_else(|| CliError::Usage(format!("`{spec}` is missing a parameter"))),
        }
    };
    let seed = |default: u64| -> Result<u64, CliError> {
        match nums.first() {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("`{s}` is not a seed in `{spec}`"))),
            None => Ok(default),
        }
    };
    let gen = |r: Result<_, GenError>| r.map_err(|e| CliError::Street(format!("{spec}: {e}")));
    let (street, base_step) = match family {
        "corridor" => {
            if nums.len() > 1 {
                return Err(CliError::Usage(format!("too many parameters in `{spec}`")));
            }
            (gen(gen_corridor(num(0, None)?, CORRIDOR_WIDTH))?, Some(1.0))
        }
        "funnel" => {
            if nums.len() > 2 {
                return Err(CliError::Usage(format!("too many parameters in `{spec}`")));
            }
            let angle = num(0, None)?.to_radians();
            (gen(gen_funnel(angle, num(1, Some(FUNNEL_DEPTH))?))?, None)
        }
        "single-gap" => (gen(gen_single_gap(seed(0)?))?, None),
        "convex" => (gen(gen_convex(seed(0)?))?, None),
        _ => {
            return Err(CliError::Usage(format!(
                "`{spec}` is neither a file nor one of corridor:<offset>, funnel:<deg>[:<depth>], single-gap:<seed>, convex:<seed>"
            )))
        }
    };
    Ok(Instance {
        id: spec.to_string(),
        street,
        base_step,
    })
}

fn street_error(file: &str, e: StreetError) -> CliError {
    CliError::Street(format!("{file}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_parse() {
        assert_eq!(resolve("corridor:-9").unwrap().base_step, Some(1.0));
        assert!(resolve("funnel:60").is_ok());
        assert!(resolve("funnel:60:25").is_ok());
        // Not every seed yields a valid street; some in a short range must.
        assert!((0..10).any(|k| resolve(&format!("single-gap:{k}")).is_ok()));
        assert!((0..10).any(|k| resolve(&format!("convex:{k}")).is_ok()));
    }

    #[test]
    fn bad_specs_are_usage_errors() {
        for spec in ["corridor", "corridor:x", "funnel:10:2:3", "spiral:4", "no/such/file.street"] {
            assert!(matches!(resolve(spec), Err(CliError::Usage(_))), "{spec}");
        }
    }

    #[test]
    fn degenerate_parameters_are_street_errors() {
        assert!(matches!(resolve("corridor:0"), Err(CliError::Street(_))));
        assert!(matches!(resolve("funnel:180"), Err(CliError::Street(_))));
    }
}
