use std::fmt;
use std::sync::Arc;

use super::phase::PhaseCoeff;
use super::poly::{same_twist, TwistedPoly};
use super::twist::TwistMatrix;
use crate::error::{Error, Result};

/// Dense matrix over the polynomial quantum torus, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    twist: Arc<TwistMatrix>,
    entries: Vec<TwistedPoly>,
}

impl PolyMatrix {
    pub fn zeros(twist: &Arc<TwistMatrix>, rows: usize, cols: usize) -> Self {
        Self { rows, cols, twist: twist.clone(), entries: vec![TwistedPoly::zero(twist); rows * cols] }
    }

    pub fn identity(twist: &Arc<TwistMatrix>, n: usize) -> Self {
        let mut m = Self::zeros(twist, n, n);
        for k in 0..n {
            m.entries[k * n + k] = TwistedPoly::one(twist);
        }
        m
    }

    pub fn scalar(x: TwistedPoly) -> Self {
        Self { rows: 1, cols: 1, twist: x.twist().clone(), entries: vec![x] }
    }

    pub fn from_entries(twist: &Arc<TwistMatrix>, rows: usize, cols: usize, entries: Vec<TwistedPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if entries.iter().any(|e| !same_twist(e.twist(), twist)) {
            return Err(Error::TwistMismatch);
        }
        Ok(Self { rows, cols, twist: twist.clone(), entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        &self.twist
    }

    pub fn get(&self, r: usize, c: usize) -> &TwistedPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[TwistedPoly] {
        &self.entries
    }

    /// The single entry of a 1×1 matrix.
    pub fn as_poly(&self) -> Option<&TwistedPoly> {
        (self.rows == 1 && self.cols == 1).then(|| &self.entries[0])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TwistedPoly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(&self.twist, self.rows)
    }

    pub fn map(&self, f: impl Fn(&TwistedPoly) -> TwistedPoly) -> Self {
        Self { rows: self.rows, cols: self.cols, twist: self.twist.clone(), entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&TwistedPoly) -> Result<TwistedPoly>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, twist: self.twist.clone(), entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !same_twist(&self.twist, &other.twist) {
            return Err(Error::TwistMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.twist, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = TwistedPoly::zero(&self.twist);
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(&TwistedPoly, &TwistedPoly) -> TwistedPoly) -> Result<Self> {
        if !same_twist(&self.twist, &other.twist) {
            return Err(Error::TwistMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} and {}x{} differ in shape",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, twist: self.twist.clone(), entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &PhaseCoeff) -> Self {
        self.map(|a| a.scale(c))
    }

    /// Left multiplication of every entry by the algebra element `x`.
    pub fn left_mul_poly(&self, x: &TwistedPoly) -> Self {
        self.map(|a| x * a)
    }

    pub fn right_mul_poly(&self, x: &TwistedPoly) -> Self {
        self.map(|a| a * x)
    }

    /// Conjugate transpose with the algebra involution on entries.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).star());
            }
        }
        Self { rows: self.cols, cols: self.rows, twist: self.twist.clone(), entries }
    }

    /// Kronecker product `self ⊗ other` with `self` as the outer index.
    /// Entries are multiplied in the algebra in the order `a·b`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if !same_twist(&self.twist, &other.twist) {
            return Err(Error::TwistMismatch);
        }
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![TwistedPoly::zero(&self.twist); rows * cols];
        for (r1, c1) in (0..self.rows).flat_map(|r| (0..self.cols).map(move |c| (r, c))) {
            for (r2, c2) in (0..other.rows).flat_map(|r| (0..other.cols).map(move |c| (r, c))) {
                entries[(r1 * other.rows + r2) * cols + c1 * other.cols + c2] = self.get(r1, c1) * other.get(r2, c2);
            }
        }
        Ok(Self { rows, cols, twist: self.twist.clone(), entries })
    }

    /// Replaces every entry `y_{ij}` by the `d×d` block `f(y_{ij})`, giving
    /// `(f ⊗ id)(y)` with the block index outermost.
    pub fn expand_blocks(&self, d: usize, f: impl Fn(&TwistedPoly) -> Result<PolyMatrix>) -> Result<Self> {
        let rows = d * self.rows;
        let cols = d * self.cols;
        let mut entries = vec![TwistedPoly::zero(&self.twist); rows * cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let block = f(self.get(r, c))?;
                if block.rows != d || block.cols != d {
                    return Err(Error::Shape(format!("block is {}x{}, expected {d}x{d}", block.rows, block.cols)));
                }
                for a in 0..d {
                    for b in 0..d {
                        entries[(a * self.rows + r) * cols + b * self.cols + c] = block.get(a, b).clone();
                    }
                }
            }
        }
        Ok(Self { rows, cols, twist: self.twist.clone(), entries })
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.as_poly() {
            return write!(f, "{x}");
        }
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}
