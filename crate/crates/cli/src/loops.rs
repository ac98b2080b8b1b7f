//! Loop spec parsing: `full`, `gen:k`, `expr:c1|...|cn`, `rev:<spec>`.

use maslov_core::expr::Scope;
use maslov_core::immersion::{Immersion, LoopPath};
use maslov_core::maslov::generator_loops;

use crate::error::{as_config, CliError};

pub fn parse_loop(spec: &str, imm: &dyn Immersion) -> Result<LoopPath, CliError> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("rev:") {
        return Ok(parse_loop(inner, imm)?.reversed());
    }
    if spec == "full" {
        return LoopPath::full(imm.domain()).map_err(as_config);
    }
    if let Some(k) = spec.strip_prefix("gen:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::config(format!("loop `{spec}`: generator index must be a positive integer")))?;
        if k == 0 {
            return Err(CliError::config("loop generators are numbered from 1"));
        }
        return LoopPath::generator(imm.domain(), k - 1).map_err(as_config);
    }
    if let Some(body) = spec.strip_prefix("expr:") {
        let body = body.strip_prefix("c=").unwrap_or(body);
        let sources: Vec<String> = body.split('|').map(|s| s.trim().to_string()).collect();
        if sources.len() != imm.n() {
            return Err(CliError::config(format!(
                "loop `{spec}` has {} coordinates, the shape has {}",
                sources.len(),
                imm.n()
            )));
        }
        let lp = LoopPath::from_expressions(spec, &sources, &Scope::loop_parameter()).map_err(as_config)?;
        lp.validate(imm.domain()).map_err(as_config)?;
        return Ok(lp);
    }
    Err(CliError::config(format!(
        "unknown loop spec `{spec}` (expected full, gen:k, expr:c1|..|cn or rev:<spec>)"
    )))
}

/// Requested loops, or the natural basis: the full loop of a closed curve,
/// else one generator per periodic axis.
pub fn resolve_loops(specs: &[String], imm: &dyn Immersion) -> Result<Vec<LoopPath>, CliError> {
    if !specs.is_empty() {
        return specs.iter().map(|s| parse_loop(s, imm)).collect();
    }
    let d = imm.domain();
    if d.dim() == 1 && d.periodic[0] {
        return Ok(vec![LoopPath::full(d).map_err(as_config)?]);
    }
    let loops = generator_loops(imm).map_err(as_config)?;
    if loops.is_empty() {
        return Err(CliError::config("the shape has no periodic axes; pass --loop expr:..."));
    }
    Ok(loops)
}
