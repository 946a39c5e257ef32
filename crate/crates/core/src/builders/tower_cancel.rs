use std::collections::HashMap;
use std::sync::Arc;

use super::{inhom_tower::interval_name, param_list, vars_default, Built, ConservationLaw, LawKind};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, StateId, TableProtocol, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Cell {
    Interval(i64, i64),
    Neg(i64),
    Zero,
}

/// Weak tower protocol for `Σ a_i·x_i >= t` with `t >= 1` and coefficients
/// of any sign: negative agents cancel floors at or above `t`.
pub fn inhom_tower_cancel(coeffs: &[i64], t: i64) -> Result<Built, ModelError> {
    if coeffs.is_empty() {
        return Err(ModelError::InvalidParameter("InhomTowerCancel needs coefficients".into()));
    }
    if t < 1 {
        return Err(ModelError::InvalidParameter(format!(
            "InhomTowerCancel needs t >= 1 (negate the complement otherwise), got {t}"
        )));
    }
    if coeffs.iter().all(|&a| a > 0) {
        return Err(ModelError::InvalidParameter("all coefficients are positive; use InhomTower".into()));
    }
    let big = coeffs.iter().copied().max().unwrap().max(t);
    let lo = coeffs.iter().copied().min().unwrap().min(0);
    if big > 2_000 || lo < -100_000 {
        return Err(ModelError::TooLarge(format!("InhomTowerCancel({};{t})", param_list(coeffs))));
    }
    let top = big;

    let mut cells = Vec::new();
    for l in 1..=top {
        for s in 0..=(top - l) {
            cells.push(Cell::Interval(s, s + l));
        }
    }
    for x in lo..0 {
        cells.push(Cell::Neg(x));
    }
    cells.push(Cell::Zero);
    let index: HashMap<Cell, StateId> = cells.iter().enumerate().map(|(i, &c)| (c, StateId(i as u64))).collect();
    let id = |c: Cell| index[&c];
    let interval = |s: i64, e: i64| if s == e { Cell::Zero } else { Cell::Interval(s, e) };
    let neg = |x: i64| if x == 0 { Cell::Zero } else { Cell::Neg(x) };

    let mut transitions = Vec::new();
    for (i, &a) in cells.iter().enumerate() {
        for &b in &cells[i..] {
            match (a, b) {
                (Cell::Interval(s1, e1), Cell::Interval(s2, e2)) => {
                    // step
                    if s1 < e2 && s2 < e1 && e1 < top && e2 < top {
                        if s1 <= s2 {
                            transitions.push(Transition::new(id(a), id(b), id(a), id(interval(s2 + 1, e2 + 1))));
                        }
                        if s2 <= s1 {
                            transitions.push(Transition::new(id(a), id(b), id(interval(s1 + 1, e1 + 1)), id(b)));
                        }
                    }
                }
                // cancel
                (Cell::Interval(s, e), Cell::Neg(x)) | (Cell::Neg(x), Cell::Interval(s, e)) if t <= e => {
                    transitions.push(Transition::new(
                        id(Cell::Interval(s, e)),
                        id(Cell::Neg(x)),
                        id(interval(s, e - 1)),
                        id(neg(x + 1)),
                    ));
                }
                _ => {}
            }
        }
    }

    let name = |c: &Cell| match *c {
        Cell::Interval(s, e) => interval_name(s, e),
        Cell::Neg(x) => x.to_string(),
        Cell::Zero => "0".to_string(),
    };
    let opinion = |c: &Cell| match *c {
        Cell::Interval(_, e) if t <= e => Opinion::Accepting,
        Cell::Interval(..) | Cell::Zero => Opinion::Neutral,
        Cell::Neg(_) => Opinion::Rejecting,
    };
    let input = |a: i64| match a.signum() {
        1 => id(Cell::Interval(0, a)),
        -1 => id(Cell::Neg(a)),
        _ => id(Cell::Zero),
    };
    let inputs: Vec<StateId> = coeffs.iter().map(|&a| input(a)).collect();
    let table = TableProtocol::new(
        format!("InhomTowerCancel({};{t})", param_list(coeffs)),
        cells.iter().map(name).collect(),
        inputs.clone(),
        OutputKind::Weak,
        cells.iter().map(opinion).collect(),
        transitions,
    )?;
    let weights: Vec<i64> = cells
        .iter()
        .map(|c| match *c {
            Cell::Interval(s, e) => e - s,
            Cell::Neg(x) => x,
            Cell::Zero => 0,
        })
        .collect();
    Ok(Built {
        protocol: Arc::new(table),
        predicate: Predicate::new(vars_default(coeffs.len()), PredicateSpec::threshold(coeffs.to_vec(), t))?,
        inputs,
        laws: vec![ConservationLaw::scalar("signed length sum invariant", LawKind::Invariant, move |q| {
            weights[q.index()]
        })],
    })
}
