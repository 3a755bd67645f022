//! Named frames usable from configs, e.g. `onb(8)` or `carleson(2, 10, 40)`.

use crate::carleson::{self, CarlesonSystem};
use crate::error::{Error, Result};
use crate::frames::{self, Frame};
use crate::orbitrep;

/// `(signature, description)` for every builtin.
pub fn list_builtins() -> Vec<(&'static str, &'static str)> {
    vec![
        ("onb(d)", "standard basis e_1..e_d"),
        ("doubled_onb(d)", "every basis vector twice: e_1, e_1, ..., e_d, e_d (excess d)"),
        ("scaled_basis(d)", "k·e_k for k = 1..d; orbit of the weighted shift e_k -> (k+1)/k e_{k+1}"),
        (
            "carleson(alpha,K[,M])",
            "orbit (T^n φ)_{n<M} of the diagonal operator with λ_k = 1 − alpha^{-k}, unit weights; M defaults to 2K",
        ),
        ("riesz_perturbed(d,delta)", "e_k + delta·e_{k+1} for k < d and e_d; a Riesz basis for |delta| < 1"),
    ]
}

/// Splits `name(a, b, ...)` into the name and its arguments.
fn split_call(spec: &str) -> Result<(&str, Vec<&str>)> {
    let spec = spec.trim();
    let open = spec
        .find('(')
        .ok_or_else(|| Error::Builtin(format!("expected name(args), got `{spec}`")))?;
    let inner = spec[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Builtin(format!("missing `)` in `{spec}`")))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok((spec[..open].trim(), args))
}

fn int_arg(name: &str, args: &[&str], i: usize) -> Result<usize> {
    let raw = args
        .get(i)
        .ok_or_else(|| Error::Builtin(format!("{name}: missing argument {}", i + 1)))?;
    match raw.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Builtin(format!("{name}: expected a positive integer, got `{raw}`"))),
    }
}

fn real_arg(name: &str, args: &[&str], i: usize) -> Result<f64> {
    let raw = args
        .get(i)
        .ok_or_else(|| Error::Builtin(format!("{name}: missing argument {}", i + 1)))?;
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Builtin(format!("{name}: expected a number, got `{raw}`")))
}

fn arity(name: &str, args: &[&str], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::Builtin(format!("{name}: wrong number of arguments ({})", args.len())))
    }
}

/// The Carleson system behind `carleson(alpha, K)`.
pub fn carleson_system(alpha: f64, k: usize) -> Result<CarlesonSystem> {
    carleson::build_default_system(&carleson::geometric_lambda(alpha, k)?)
}

/// First `m` orbit elements of [`carleson_system`].
pub fn carleson_frame(alpha: f64, k: usize, m: usize) -> Result<Frame> {
    let sys = carleson_system(alpha, k)?;
    let orbit = orbitrep::generate_orbit(&sys.op, &sys.phi, m)?;
    Frame::with_ambient(format!("carleson({alpha},{k},{m})"), orbit.frame.elements().to_vec(), k)
}

/// Builds the frame named by `spec`.
pub fn parse_builtin(spec: &str) -> Result<Frame> {
    let (name, args) = split_call(spec)?;
    match name {
        "onb" | "doubled_onb" | "scaled_basis" => {
            arity(name, &args, &[1])?;
            let d = int_arg(name, &args, 0)?;
            Ok(match name {
                "onb" => frames::onb(d),
                "doubled_onb" => frames::doubled_onb(d),
                _ => frames::scaled_basis(d),
            })
        }
        "riesz_perturbed" => {
            arity(name, &args, &[2])?;
            Ok(frames::riesz_perturbed(int_arg(name, &args, 0)?, real_arg(name, &args, 1)?))
        }
        "carleson" => {
            arity(name, &args, &[2, 3])?;
            let alpha = real_arg(name, &args, 0)?;
            let k = int_arg(name, &args, 1)?;
            let m = if args.len() == 3 { int_arg(name, &args, 2)? } else { 2 * k };
            carleson_frame(alpha, k, m)
        }
        _ => Err(Error::Builtin(format!("unknown builtin `{name}`"))),
    }
}
