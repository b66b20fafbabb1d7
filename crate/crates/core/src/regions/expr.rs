// Copyright 2026 The unscathed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Piecewise-affine bound expressions over earlier integration variables.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Values the bound expressions may refer to. Indices are 1-based.
#[derive(Debug, Clone, Copy)]
pub struct EvalCtx<'a> {
    /// θ_1, θ_2, ... (as many as are known).
    pub thetas: &'a [f64],
    /// c_i = 2cos θ_i for every known θ_i.
    pub cosines: &'a [f64],
    /// t_1, t_2, ... (as many as are known).
    pub ratios: &'a [f64],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundExpr {
    /// (num/den)·π
    PiMultiple { num: i64, den: i64 },
    Zero,
    One,
    Infinity,
    Theta { index: usize },
    /// c_i = 2cos θ_i
    Cos2 { index: usize },
    Ratio { index: usize },
    Sum { terms: Vec<BoundExpr> },
    Neg { arg: Box<BoundExpr> },
    Product { factors: Vec<BoundExpr> },
    Recip { arg: Box<BoundExpr> },
    Max { args: Vec<BoundExpr> },
    Min { args: Vec<BoundExpr> },
}

impl BoundExpr {
    pub fn pi(num: i64, den: i64) -> Self {
        BoundExpr::PiMultiple { num, den }
    }

    pub fn theta(index: usize) -> Self {
        BoundExpr::Theta { index }
    }

    pub fn cos2(index: usize) -> Self {
        BoundExpr::Cos2 { index }
    }

    pub fn ratio(index: usize) -> Self {
        BoundExpr::Ratio { index }
    }

    pub fn recip(arg: BoundExpr) -> Self {
        BoundExpr::Recip { arg: Box::new(arg) }
    }

    pub fn neg(arg: BoundExpr) -> Self {
        BoundExpr::Neg { arg: Box::new(arg) }
    }

    /// (num/den)·π − Σ θ_i over `indices`.
    pub fn pi_minus_thetas(num: i64, den: i64, indices: &[usize]) -> Self {
        if indices.is_empty() {
            return Self::pi(num, den);
        }
        let mut terms = vec![Self::pi(num, den)];
        terms.extend(indices.iter().map(|&i| Self::neg(Self::theta(i))));
        BoundExpr::Sum { terms }
    }

    pub fn max(args: Vec<BoundExpr>) -> Self {
        BoundExpr::Max { args }
    }

    pub fn min(args: Vec<BoundExpr>) -> Self {
        BoundExpr::Min { args }
    }

    pub fn product(factors: Vec<BoundExpr>) -> Self {
        BoundExpr::Product { factors }
    }

    pub fn eval(&self, ctx: &EvalCtx<'_>) -> f64 {
        match self {
            BoundExpr::PiMultiple { num, den } => *num as f64 * PI / *den as f64,
            BoundExpr::Zero => 0.0,
            BoundExpr::One => 1.0,
            BoundExpr::Infinity => f64::INFINITY,
            BoundExpr::Theta { index } => ctx.thetas[index - 1],
            BoundExpr::Cos2 { index } => ctx.cosines[index - 1],
            BoundExpr::Ratio { index } => ctx.ratios[index - 1],
            BoundExpr::Sum { terms } => terms.iter().map(|e| e.eval(ctx)).sum(),
            BoundExpr::Neg { arg } => -arg.eval(ctx),
            BoundExpr::Product { factors } => factors.iter().map(|e| e.eval(ctx)).product(),
            BoundExpr::Recip { arg } => 1.0 / arg.eval(ctx),
            BoundExpr::Max { args } => {
                args.iter().map(|e| e.eval(ctx)).fold(f64::NEG_INFINITY, f64::max)
            }
            BoundExpr::Min { args } => args.iter().map(|e| e.eval(ctx)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest θ index the expression reads.
    pub fn max_theta_index(&self) -> usize {
        match self {
            BoundExpr::Theta { index } | BoundExpr::Cos2 { index } => *index,
            BoundExpr::Sum { terms: v }
            | BoundExpr::Product { factors: v }
            | BoundExpr::Max { args: v }
            | BoundExpr::Min { args: v } => v.iter().map(|e| e.max_theta_index()).max().unwrap_or(0),
            BoundExpr::Neg { arg } | BoundExpr::Recip { arg } => arg.max_theta_index(),
            _ => 0,
        }
    }

    /// Largest t index the expression reads.
    pub fn max_ratio_index(&self) -> usize {
        match self {
            BoundExpr::Ratio { index } => *index,
            BoundExpr::Sum { terms: v }
            | BoundExpr::Product { factors: v }
            | BoundExpr::Max { args: v }
            | BoundExpr::Min { args: v } => v.iter().map(|e| e.max_ratio_index()).max().unwrap_or(0),
            BoundExpr::Neg { arg } | BoundExpr::Recip { arg } => arg.max_ratio_index(),
            _ => 0,
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self,
            BoundExpr::Zero
                | BoundExpr::One
                | BoundExpr::Infinity
                | BoundExpr::Theta { .. }
                | BoundExpr::Cos2 { .. }
                | BoundExpr::Ratio { .. }
                | BoundExpr::Max { .. }
                | BoundExpr::Min { .. }
        )
    }
}

fn fmt_pi(num: i64, den: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match (num, den) {
        (0, _) => write!(f, "0"),
        (1, 1) => write!(f, "π"),
        (n, 1) => write!(f, "{n}π"),
        (1, d) => write!(f, "π/{d}"),
        (n, d) => write!(f, "{n}π/{d}"),
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::PiMultiple { num, den } => fmt_pi(*num, *den, f),
            BoundExpr::Zero => write!(f, "0"),
            BoundExpr::One => write!(f, "1"),
            BoundExpr::Infinity => write!(f, "∞"),
            BoundExpr::Theta { index } => write!(f, "θ{index}"),
            BoundExpr::Cos2 { index } => write!(f, "c{index}"),
            BoundExpr::Ratio { index } => write!(f, "t{index}"),
            BoundExpr::Sum { terms } => {
                for (k, term) in terms.iter().enumerate() {
                    match (k, term) {
                        (0, BoundExpr::Neg { arg }) => write!(f, "−{arg}")?,
                        (0, e) => write!(f, "{e}")?,
                        (_, BoundExpr::Neg { arg }) => write!(f, " − {arg}")?,
                        (_, e) => write!(f, " + {e}")?,
                    }
                }
                Ok(())
            }
            BoundExpr::Neg { arg } => write!(f, "−{arg}"),
            BoundExpr::Product { factors } => {
                let (den, num): (Vec<&BoundExpr>, Vec<&BoundExpr>) =
                    factors.iter().partition(|e| matches!(e, BoundExpr::Recip { .. }));
                if num.is_empty() {
                    write!(f, "1")?;
                }
                for e in &num {
                    if e.is_atom() {
                        write!(f, "{e}")?;
                    } else {
                        write!(f, "({e})")?;
                    }
                }
                if !den.is_empty() {
                    write!(f, "/")?;
                    let inner: Vec<&BoundExpr> = den
                        .iter()
                        .map(|e| match e {
                            BoundExpr::Recip { arg } => arg.as_ref(),
                            other => *other,
                        })
                        .collect();
                    if inner.len() > 1 {
                        write!(f, "(")?;
                    }
                    for e in &inner {
                        write!(f, "{e}")?;
                    }
                    if inner.len() > 1 {
                        write!(f, ")")?;
                    }
                }
                Ok(())
            }
            BoundExpr::Recip { arg } => {
                if arg.is_atom() {
                    write!(f, "1/{arg}")
                } else {
                    write!(f, "1/({arg})")
                }
            }
            BoundExpr::Max { args } | BoundExpr::Min { args } => {
                let name = if matches!(self, BoundExpr::Max { .. }) { "max" } else { "min" };
                write!(f, "{name}{{")?;
                for (k, e) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// An open interval with expression endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: BoundExpr,
    pub upper: BoundExpr,
}

impl Bounds {
    pub fn new(lower: BoundExpr, upper: BoundExpr) -> Self {
        Self { lower, upper }
    }

    pub fn eval(&self, ctx: &EvalCtx<'_>) -> (f64, f64) {
        (self.lower.eval(ctx), self.upper.eval(ctx))
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

/// One max/min argument in flattened form.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Atom {
    /// constant − Σ θ_i over the bits of `thetas`.
    Affine { constant: f64, thetas: u8 },
    /// ∏ c_i·t_j over the numerator masks divided by the same over the
    /// denominator masks.
    Monomial { num_cos: u8, den_cos: u8, num_ratio: u8, den_ratio: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Combine {
    Single,
    Max,
    Min,
}

const MAX_ATOMS: usize = 4;

/// A bound expression flattened for evaluation in hot loops. Shapes outside
/// the flattened vocabulary fall back to the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    combine: Combine,
    atoms: [Atom; MAX_ATOMS],
    len: usize,
    fallback: Option<Box<BoundExpr>>,
}

fn bit(index: usize) -> Option<u8> {
    (1..=8).contains(&index).then(|| 1u8 << (index - 1))
}

fn atom_of(e: &BoundExpr) -> Option<Atom> {
    match e {
        BoundExpr::PiMultiple { num, den } => Some(Atom::Affine { constant: *num as f64 * PI / *den as f64, thetas: 0 }),
        BoundExpr::Zero => Some(Atom::Affine { constant: 0.0, thetas: 0 }),
        BoundExpr::One => Some(Atom::Affine { constant: 1.0, thetas: 0 }),
        BoundExpr::Infinity => Some(Atom::Affine { constant: f64::INFINITY, thetas: 0 }),
        BoundExpr::Sum { terms } => {
            let (first, rest) = terms.split_first()?;
            let Atom::Affine { constant, thetas: 0 } = atom_of(first)? else {
                return None;
            };
            let mut mask = 0u8;
            for t in rest {
                match t {
                    BoundExpr::Neg { arg } => match arg.as_ref() {
                        BoundExpr::Theta { index } => {
                            let b = bit(*index)?;
                            if mask & b != 0 {
                                return None;
                            }
                            mask |= b;
                        }
                        _ => return None,
                    },
                    _ => return None,
                }
            }
            Some(Atom::Affine { constant, thetas: mask })
        }
        BoundExpr::Cos2 { index } => Some(Atom::Monomial { num_cos: bit(*index)?, den_cos: 0, num_ratio: 0, den_ratio: 0 }),
        BoundExpr::Ratio { index } => Some(Atom::Monomial { num_cos: 0, den_cos: 0, num_ratio: bit(*index)?, den_ratio: 0 }),
        BoundExpr::Recip { arg } => match atom_of(arg)? {
            Atom::Monomial { num_cos, den_cos, num_ratio, den_ratio } => Some(Atom::Monomial {
                num_cos: den_cos,
                den_cos: num_cos,
                num_ratio: den_ratio,
                den_ratio: num_ratio,
            }),
            Atom::Affine { .. } => None,
        },
        BoundExpr::Product { factors } => {
            let (mut nc, mut dc, mut nr, mut dr) = (0u8, 0u8, 0u8, 0u8);
            for f in factors {
                let Atom::Monomial { num_cos, den_cos, num_ratio, den_ratio } = atom_of(f)? else {
                    return None;
                };
                if nc & num_cos != 0 || dc & den_cos != 0 || nr & num_ratio != 0 || dr & den_ratio != 0 {
                    return None;
                }
                nc |= num_cos;
                dc |= den_cos;
                nr |= num_ratio;
                dr |= den_ratio;
            }
            Some(Atom::Monomial { num_cos: nc, den_cos: dc, num_ratio: nr, den_ratio: dr })
        }
        _ => None,
    }
}

#[inline]
fn mask_product(mask: u8, values: &[f64]) -> f64 {
    let mut p = 1.0;
    let mut m = mask;
    while m != 0 {
        p *= values[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    p
}

impl Atom {
    #[inline]
    fn eval(&self, ctx: &EvalCtx<'_>) -> f64 {
        match *self {
            Atom::Affine { constant, thetas } => {
                let mut v = constant;
                let mut m = thetas;
                while m != 0 {
                    v -= ctx.thetas[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
                v
            }
            Atom::Monomial { num_cos, den_cos, num_ratio, den_ratio } => {
                let num = mask_product(num_cos, ctx.cosines) * mask_product(num_ratio, ctx.ratios);
                if den_cos | den_ratio == 0 {
                    num
                } else {
                    num / (mask_product(den_cos, ctx.cosines) * mask_product(den_ratio, ctx.ratios))
                }
            }
        }
    }
}

impl CompiledExpr {
    pub fn compile(e: &BoundExpr) -> Self {
        let filler = Atom::Affine { constant: 0.0, thetas: 0 };
        let fallback = || CompiledExpr {
            combine: Combine::Single,
            atoms: [filler; MAX_ATOMS],
            len: 0,
            fallback: Some(Box::new(e.clone())),
        };
        let (combine, args): (Combine, Vec<&BoundExpr>) = match e {
            BoundExpr::Max { args } => (Combine::Max, args.iter().collect()),
            BoundExpr::Min { args } => (Combine::Min, args.iter().collect()),
            other => (Combine::Single, vec![other]),
        };
        if args.is_empty() || args.len() > MAX_ATOMS {
            return fallback();
        }
        let mut atoms = [filler; MAX_ATOMS];
        for (slot, a) in atoms.iter_mut().zip(&args) {
            match atom_of(a) {
                Some(atom) => *slot = atom,
                None => return fallback(),
            }
        }
        CompiledExpr { combine, atoms, len: args.len(), fallback: None }
    }

    /// Whether evaluation goes through the flattened form.
    pub fn is_flat(&self) -> bool {
        self.fallback.is_none()
    }

    #[inline]
    pub fn eval(&self, ctx: &EvalCtx<'_>) -> f64 {
        if let Some(tree) = &self.fallback {
            return tree.eval(ctx);
        }
        let first = self.atoms[0].eval(ctx);
        match self.combine {
            Combine::Single => first,
            Combine::Max => self.atoms[1..self.len].iter().fold(first, |acc, a| acc.max(a.eval(ctx))),
            Combine::Min => self.atoms[1..self.len].iter().fold(first, |acc, a| acc.min(a.eval(ctx))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledBounds {
    pub lower: CompiledExpr,
    pub upper: CompiledExpr,
}

impl CompiledBounds {
    #[inline]
    pub fn eval(&self, ctx: &EvalCtx<'_>) -> (f64, f64) {
        (self.lower.eval(ctx), self.upper.eval(ctx))
    }
}

impl Bounds {
    pub fn compile(&self) -> CompiledBounds {
        CompiledBounds { lower: CompiledExpr::compile(&self.lower), upper: CompiledExpr::compile(&self.upper) }
    }
}
