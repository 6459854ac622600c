//! Truncated number lines for the consecutive numbers puzzle.
//!
//! World `(x, y)` means agent a holds `x` and agent b holds `y`; a cannot
//! tell apart worlds with the same `x`, b those with the same `y`. A line is
//! the chain through `(1, 2)`, cut off where a number exceeds `N` in absolute
//! value. Every variant declares the atoms `n_a_k`, `n_b_k` for `-N ≤ k ≤ N`
//! so the models can be combined freely.

use std::fmt;
use std::str::FromStr;

use crate::formula::Formula;
use crate::kripke::{KripkeModel, ModelBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineVariant {
    /// b's line: naturals from 0, `(1,0) (1,2) (3,2) ...`
    Nat0,
    /// a's line: naturals from 1, `(1,2) (3,2) ...`
    Nat1,
    /// Both directions: `... (-1,0) (1,0) (1,2) ...`
    Int,
    /// The puzzle's starting model: a real world `(1,2)` plus a private copy
    /// of each agent's line.
    Pointed,
}

impl fmt::Display for LineVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineVariant::Nat0 => "nat0",
            LineVariant::Nat1 => "nat1",
            LineVariant::Int => "int",
            LineVariant::Pointed => "pointed",
        })
    }
}

impl FromStr for LineVariant {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "nat0" => Ok(LineVariant::Nat0),
            "nat1" => Ok(LineVariant::Nat1),
            "int" => Ok(LineVariant::Int),
            "pointed" => Ok(LineVariant::Pointed),
            _ => Err(()),
        }
    }
}

fn num(k: i64) -> String {
    if k < 0 {
        format!("m{}", -k)
    } else {
        k.to_string()
    }
}

pub fn world_name(x: i64, y: i64) -> String {
    format!("p{}_{}", num(x), num(y))
}

pub fn number_atom(agent: &str, k: i64) -> String {
    format!("n_{agent}_{}", num(k))
}

/// The number named by an `n_<agent>_<k>` atom.
pub fn atom_number(atom: &str) -> Option<i64> {
    let rest = atom.strip_prefix("n_")?;
    let (_, k) = rest.split_once('_')?;
    match k.strip_prefix('m') {
        Some(neg) => neg.parse::<i64>().ok().map(|v| -v),
        None => k.parse().ok(),
    }
}

/// Atom vocabulary shared by all variants.
pub fn atoms(n: usize) -> Vec<String> {
    let n = n as i64;
    ["a", "b"]
        .iter()
        .flat_map(|agent| (-n..=n).map(move |k| number_atom(agent, k)))
        .collect()
}

/// Worlds of a line in chain order.
pub fn line_worlds(variant: LineVariant, n: usize) -> Vec<(i64, i64)> {
    let n = n as i64;
    // forward from (1,2): b-step raises x, a-step raises y
    let mut forward = Vec::new();
    let (mut x, mut y) = (1i64, 2i64);
    while x.abs() <= n && y.abs() <= n {
        forward.push((x, y));
        if x < y {
            x += 2;
        } else {
            y += 2;
        }
    }
    let mut backward = Vec::new();
    match variant {
        LineVariant::Nat1 | LineVariant::Pointed => {}
        LineVariant::Nat0 => backward.push((1, 0)),
        LineVariant::Int => {
            let (mut x, mut y) = (1i64, 0i64);
            while x.abs() <= n && y.abs() <= n {
                backward.push((x, y));
                // y < x going down: b-step lowers x, then a-step lowers y
                if x > y {
                    x -= 2;
                } else {
                    y -= 2;
                }
            }
        }
    }
    backward.reverse();
    backward.extend(forward);
    backward
}

fn add_line(b: &mut ModelBuilder, prefix: &str, worlds: &[(i64, i64)]) {
    for &(x, y) in worlds {
        b.world(
            &format!("{prefix}{}", world_name(x, y)),
            &[number_atom("a", x), number_atom("b", y)],
        )
        .expect("generated names are fresh");
    }
    for (i, &(x1, y1)) in worlds.iter().enumerate() {
        let w1 = format!("{prefix}{}", world_name(x1, y1));
        b.arrow("a", &w1, &w1).unwrap();
        b.arrow("b", &w1, &w1).unwrap();
        for &(x2, y2) in &worlds[i + 1..] {
            let w2 = format!("{prefix}{}", world_name(x2, y2));
            if x1 == x2 {
                b.edge("a", &w1, &w2).unwrap();
            }
            if y1 == y2 {
                b.edge("b", &w1, &w2).unwrap();
            }
        }
    }
}

/// A line as an epistemic model, or the pointed starting model (point `real`).
pub fn line_model(variant: LineVariant, n: usize) -> KripkeModel {
    let atoms = atoms(n);
    let name = match variant {
        LineVariant::Pointed => "consecutive".to_string(),
        v => v.to_string(),
    };
    let mut b = ModelBuilder::new(name, &["a", "b"], &atoms).expect("generated identifiers are valid");
    match variant {
        LineVariant::Pointed => {
            b.world("real", &[number_atom("a", 1), number_atom("b", 2)]).unwrap();
            let a_line = line_worlds(LineVariant::Nat1, n);
            let b_line = line_worlds(LineVariant::Nat0, n);
            add_line(&mut b, "a_", &a_line);
            add_line(&mut b, "b_", &b_line);
            b.arrow("a", "real", &format!("a_{}", world_name(1, 2))).unwrap();
            for &(x, y) in b_line.iter().filter(|&&(_, y)| y == 2) {
                b.arrow("b", "real", &format!("b_{}", world_name(x, y))).unwrap();
            }
        }
        v => add_line(&mut b, "", &line_worlds(v, n)),
    }
    b.build().expect("lines are nonempty for N >= 2")
}

/// Modal depth plus the largest absolute number mentioned by `f`.
pub fn truncation_margin(f: &Formula) -> usize {
    let largest = f
        .atoms()
        .into_iter()
        .filter_map(atom_number)
        .map(|k| k.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    f.modal_depth() + largest
}

/// Fails unless the margin of `f` stays at least 2 below `trunc_n`, which
/// keeps its verdicts on truncated lines equal to those on the infinite ones.
pub fn check_margin(text: &str, f: &Formula, trunc_n: usize) -> crate::Result<()> {
    let needed = truncation_margin(f);
    let bound = trunc_n.saturating_sub(2);
    if needed > bound {
        return Err(crate::Error::Truncation {
            formula: text.to_string(),
            needed,
            bound,
            trunc_n,
        });
    }
    Ok(())
}
