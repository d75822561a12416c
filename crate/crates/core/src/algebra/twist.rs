use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::gauss::{parse_rational, rational_to_string};
use super::phase::{PhaseCoeff, PhaseMonomial};
use crate::error::{Error, Result};

/// Skew-symmetric matrix `θ` (in full turns) defining the quantum torus
/// relations `u_k u_l = λ_{k,l} u_l u_k`, `λ_{k,l} = exp(2πi θ_{k,l})`.
///
/// Generators are indexed from 0 internally and printed from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistMatrix {
    n: usize,
    theta: Vec<BigRational>,
}

impl TwistMatrix {
    pub fn new(n: usize, theta: Vec<BigRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTwist("need at least one generator".into()));
        }
        if theta.len() != n * n {
            return Err(Error::InvalidTwist(format!("expected {} entries, got {}", n * n, theta.len())));
        }
        for k in 0..n {
            if !theta[k * n + k].is_zero() {
                return Err(Error::InvalidTwist(format!("nonzero diagonal entry at {}", k + 1)));
            }
            for l in 0..n {
                if theta[k * n + l] != -theta[l * n + k].clone() {
                    return Err(Error::InvalidTwist(format!("entries ({},{}) and ({},{}) are not skew", k + 1, l + 1, l + 1, k + 1)));
                }
            }
        }
        Ok(Self { n, theta })
    }

    /// Builds the matrix from its strictly upper-triangular entries, listed
    /// row by row: `θ_{1,2}, θ_{1,3}, …, θ_{n-1,n}`.
    pub fn from_upper(n: usize, upper: &[BigRational]) -> Result<Self> {
        if upper.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(Error::InvalidTwist(format!(
                "expected {} upper-triangular entries, got {}",
                n * (n.saturating_sub(1)) / 2,
                upper.len()
            )));
        }
        let mut theta = vec![BigRational::zero(); n * n];
        let mut it = upper.iter();
        for j in 0..n {
            for i in (j + 1)..n {
                let v = it.next().expect("length checked").clone();
                theta[i * n + j] = -v.clone();
                theta[j * n + i] = v;
            }
        }
        Self::new(n, theta)
    }

    pub fn from_upper_strs(n: usize, upper: &[&str]) -> Result<Self> {
        let parsed = upper.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::from_upper(n, &parsed)
    }

    /// The commutative torus.
    pub fn zero(n: usize) -> Self {
        Self { n, theta: vec![BigRational::zero(); n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self, k: usize, l: usize) -> &BigRational {
        &self.theta[k * self.n + l]
    }

    pub fn num_slots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Index of the formal unit `q_{j,i} = λ_{j,i}`, `j < i`.
    pub fn slot(&self, j: usize, i: usize) -> usize {
        debug_assert!(j < i && i < self.n);
        j * (2 * self.n - j - 1) / 2 + (i - j - 1)
    }

    pub fn slot_pair(&self, slot: usize) -> (usize, usize) {
        let mut s = slot;
        for j in 0..self.n {
            let row = self.n - j - 1;
            if s < row {
                return (j, j + 1 + s);
            }
            s -= row;
        }
        panic!("slot {slot} out of range")
    }

    /// `λ_{k,l}` as a monomial in the formal units.
    pub fn lambda_monomial(&self, k: usize, l: usize) -> PhaseMonomial {
        use std::cmp::Ordering;
        match k.cmp(&l) {
            Ordering::Equal => PhaseMonomial::one(),
            Ordering::Less => PhaseMonomial::unit(self.slot(k, l), 1),
            Ordering::Greater => PhaseMonomial::unit(self.slot(l, k), -1),
        }
    }

    pub fn lambda(&self, k: usize, l: usize) -> PhaseCoeff {
        PhaseCoeff::term(num_traits::One::one(), self.lambda_monomial(k, l))
    }

    /// Phase `φ(a,b)` with `u^a · u^b = φ(a,b) u^{a+b}` for normal-ordered
    /// monomials: each `u_i^{a_i}` passes `u_j^{b_j}` (`i > j`) once,
    /// contributing `λ_{i,j}^{a_i b_j} = q_{j,i}^{-a_i b_j}`.
    pub fn product_phase(&self, a: &[i64], b: &[i64]) -> PhaseMonomial {
        let mut units = Vec::new();
        for j in 0..self.n {
            if b[j] == 0 {
                continue;
            }
            for i in (j + 1)..self.n {
                let e = -a[i] * b[j];
                if e != 0 {
                    units.push((self.slot(j, i), e));
                }
            }
        }
        PhaseMonomial::from_units(units, 0)
    }

    /// Phase picked up when normal-ordering `u_n^{-a_n} ⋯ u_1^{-a_1}`.
    pub fn star_phase(&self, a: &[i64]) -> PhaseMonomial {
        let mut units = Vec::new();
        for j in 0..self.n {
            for i in (j + 1)..self.n {
                let e = -a[i] * a[j];
                if e != 0 {
                    units.push((self.slot(j, i), e));
                }
            }
        }
        PhaseMonomial::from_units(units, 0)
    }

    /// Angles `θ_{j,i}` per slot, for numeric evaluation at the exact θ.
    pub fn slot_angles(&self) -> Vec<f64> {
        (0..self.num_slots())
            .map(|s| {
                let (j, i) = self.slot_pair(s);
                self.theta(j, i).to_f64().unwrap_or(f64::NAN)
            })
            .collect()
    }

    pub fn slot_name(&self, slot: usize) -> String {
        let (j, i) = self.slot_pair(slot);
        if self.n < 10 {
            format!("q{}{}", j + 1, i + 1)
        } else {
            format!("q({},{})", j + 1, i + 1)
        }
    }

    pub fn upper_strings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in (j + 1)..self.n {
                out.push(rational_to_string(self.theta(j, i)));
            }
        }
        out
    }
}

impl fmt::Display for TwistMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta(n={}; {})", self.n, self.upper_strings().join(", "))
    }
}
