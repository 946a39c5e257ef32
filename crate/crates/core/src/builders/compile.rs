use super::{
    constant, inhom_tower, inhom_tower_cancel, modulo_combined, negate, product, small_modulo, weak_convert, BoolOp,
    Built,
};
use crate::model::{ModelError, Predicate, PredicateSpec};

/// How modulo atoms are compiled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModuloMode {
    /// ModuloCombined: tower plus BigModulo.
    #[default]
    Full,
    /// Tower half only; exact while `Σ a_i·x_i < 3m²`.
    TowerOnly,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompileOptions {
    pub modulo: ModuloMode,
}

/// Consensus protocol for `Σ a_i·x_i >= t` with any signs.
///
/// Positive coefficients use InhomTower; otherwise the weak cancelling tower
/// is converted. For `t <= 0` the complement `Σ -a_i·x_i >= 1 - t` is built
/// and negated.
pub fn threshold(coeffs: &[i64], t: i64) -> Result<Built, ModelError> {
    let vars = super::vars_default(coeffs.len());
    let predicate = Predicate::new(vars.clone(), PredicateSpec::threshold(coeffs.to_vec(), t))?;
    if coeffs.iter().all(|&a| a == 0) {
        return Ok(constant(0 >= t, vars)?.with_predicate(predicate));
    }
    let positive = |c: &[i64]| c.iter().all(|&a| a > 0);
    let built = if t >= 1 {
        if positive(coeffs) {
            inhom_tower(coeffs, t)?
        } else {
            weak_convert(&inhom_tower_cancel(coeffs, t)?)?
        }
    } else {
        let neg: Vec<i64> = coeffs.iter().map(|&a| -a).collect();
        let t2 = 1 - t;
        if positive(&neg) {
            negate(&inhom_tower(&neg, t2)?)?
        } else {
            negate(&weak_convert(&inhom_tower_cancel(&neg, t2)?)?)?
        }
    };
    Ok(built.with_predicate(predicate))
}

fn modulo(coeffs: &[i64], m: i64, t: i64, mode: ModuloMode) -> Result<Built, ModelError> {
    let vars = super::vars_default(coeffs.len());
    let predicate = Predicate::new(vars.clone(), PredicateSpec::modulo(coeffs.to_vec(), m, t))?;
    if t <= 0 || t >= m || coeffs.iter().all(|&a| a.rem_euclid(m) == 0) {
        return Ok(constant(t <= 0, vars)?.with_predicate(predicate));
    }
    let built = match mode {
        ModuloMode::Full => modulo_combined(coeffs, m, t)?,
        ModuloMode::TowerOnly => small_modulo(coeffs, m, t)?,
    };
    Ok(built.with_predicate(predicate))
}

/// Builds a consensus protocol for an arbitrary Boolean combination of
/// threshold and modulo atoms.
pub fn compile(predicate: &Predicate, opts: CompileOptions) -> Result<Built, ModelError> {
    // sub-protocols use default names of the full arity, so inputs already
    // follow the variable order
    let built = compile_spec(&predicate.formula, opts)?;
    if built.inputs.len() != predicate.vars.len() {
        return Err(ModelError::Dimension { expected: predicate.vars.len(), got: built.inputs.len() });
    }
    Ok(built.with_predicate(predicate.clone()))
}

fn compile_spec(f: &PredicateSpec, opts: CompileOptions) -> Result<Built, ModelError> {
    match f {
        PredicateSpec::Threshold { coeffs, t } => threshold(coeffs, *t),
        PredicateSpec::Modulo { coeffs, m, t } => modulo(coeffs, *m, *t, opts.modulo),
        PredicateSpec::Not(a) => negate(&compile_spec(a, opts)?),
        PredicateSpec::And(a, b) => product(&compile_spec(a, opts)?, &compile_spec(b, opts)?, BoolOp::And),
        PredicateSpec::Or(a, b) => product(&compile_spec(a, opts)?, &compile_spec(b, opts)?, BoolOp::Or),
    }
}
