//! Exact linear encodings of the nonlinear terms in the joint model. Every
//! auxiliary created here is bounded below by an envelope of binaries, so its
//! smallest feasible value reproduces the nonlinear expression.

use crate::scalar::Scalar;

use super::{LinExpr, MilpError, MilpModel, Sense, VarId};

fn require_binary<S: Scalar>(m: &MilpModel<S>, v: VarId, name: &str) -> Result<(), MilpError> {
    match m.variables().get(v.0) {
        Some(var) if var.is_binary() => Ok(()),
        Some(var) => Err(MilpError::NotBinary {
            name: name.to_string(),
            var: var.name.clone(),
        }),
        None => Err(MilpError::UnknownVar {
            owner: name.to_string(),
            var: v.0,
        }),
    }
}

/// `z = x * y` for binaries via `z <= x`, `z <= y`, `z >= x + y - 1`.
pub fn linearize_product<S: Scalar>(
    model: &mut MilpModel<S>,
    x: VarId,
    y: VarId,
    name: &str,
) -> Result<VarId, MilpError> {
    require_binary(model, x, name)?;
    require_binary(model, y, name)?;
    let z = model.add_continuous(name, S::zero(), S::one())?;
    let one = S::one();
    model.constrain(
        format!("{name}.x"),
        LinExpr::term(one, z).with_term(-one, x),
        Sense::Le,
        S::zero(),
    )?;
    model.constrain(
        format!("{name}.y"),
        LinExpr::term(one, z).with_term(-one, y),
        Sense::Le,
        S::zero(),
    )?;
    model.constrain(
        format!("{name}.xy"),
        LinExpr::term(one, z).with_term(-one, x).with_term(-one, y),
        Sense::Ge,
        -one,
    )?;
    Ok(z)
}

/// `h >= gate * sum(parts)` through the single envelope
/// `h >= sum(parts) - cap * (1 - gate)`, with `h` in `[0, cap]`.
///
/// Only the lower side is encoded: `h` must appear with a nonnegative
/// coefficient in a minimized objective or on the left of a `<=` row.
pub fn linearize_conditional_sum<S: Scalar>(
    model: &mut MilpModel<S>,
    parts: &[VarId],
    gate: VarId,
    cap: S,
    name: &str,
) -> Result<VarId, MilpError> {
    for &p in parts {
        require_binary(model, p, name)?;
    }
    require_binary(model, gate, name)?;
    if cap < S::lit(parts.len() as f64) {
        return Err(MilpError::CapTooSmall {
            name: name.to_string(),
            cap: cap.to_f64_lossy(),
            parts: parts.len(),
        });
    }
    let h = model.add_continuous(name, S::zero(), cap)?;
    let mut e = LinExpr::term(S::one(), h);
    e.extend_scaled(-S::one(), parts.iter().copied());
    e.add_term(-cap, gate);
    model.constrain(format!("{name}.env"), e, Sense::Ge, -cap)?;
    Ok(h)
}

/// `m >= max(weight * var)` over binary candidates, `m` in `[0, max weight]`.
pub fn linearize_max<S: Scalar>(
    model: &mut MilpModel<S>,
    candidates: &[(VarId, S)],
    name: &str,
) -> Result<VarId, MilpError> {
    let mut top = S::zero();
    for &(v, w) in candidates {
        require_binary(model, v, name)?;
        if w < S::zero() || w.is_nan() {
            return Err(MilpError::NegativeWeight {
                name: name.to_string(),
                weight: w.to_f64_lossy(),
            });
        }
        top = top.max(w);
    }
    let m = model.add_continuous(name, S::zero(), top)?;
    for (k, &(v, w)) in candidates.iter().enumerate() {
        if w == S::zero() {
            continue;
        }
        model.constrain(
            format!("{name}.{k}"),
            LinExpr::term(S::one(), m).with_term(-w, v),
            Sense::Ge,
            S::zero(),
        )?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rejects_continuous_inputs() {
        let mut m = MilpModel::<f64>::new("t");
        let x = m.add_binary("x").unwrap();
        let c = m.add_continuous("c", 0.0, 1.0).unwrap();
        assert!(matches!(
            linearize_product(&mut m, x, c, "z"),
            Err(MilpError::NotBinary { .. })
        ));
    }

    #[test]
    fn conditional_sum_cap_check() {
        let mut m = MilpModel::<f64>::new("t");
        let parts: Vec<_> = (0..3).map(|k| m.add_binary(format!("p{k}")).unwrap()).collect();
        let g = m.add_binary("g").unwrap();
        assert!(matches!(
            linearize_conditional_sum(&mut m, &parts, g, 2.0, "h"),
            Err(MilpError::CapTooSmall { parts: 3, .. })
        ));
        assert!(linearize_conditional_sum(&mut m, &parts, g, 3.0, "h").is_ok());
    }

    #[test]
    fn max_rejects_negative_weight() {
        let mut m = MilpModel::<f64>::new("t");
        let x = m.add_binary("x").unwrap();
        assert!(matches!(
            linearize_max(&mut m, &[(x, -1.0)], "m"),
            Err(MilpError::NegativeWeight { .. })
        ));
    }

    #[test]
    fn max_upper_bound_is_top_weight() {
        let mut m = MilpModel::<f64>::new("t");
        let xs: Vec<_> = (0..3).map(|k| m.add_binary(format!("x{k}")).unwrap()).collect();
        let mx = linearize_max(&mut m, &[(xs[0], 2.0), (xs[1], 5.0), (xs[2], 3.0)], "m").unwrap();
        assert_eq!(m.variable(mx).upper, 5.0);
        assert_eq!(m.num_constraints(), 3);
    }
}
