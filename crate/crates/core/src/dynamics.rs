//! Diagonal torus actions on the quantum torus: isotypic grading over
//! `Z^d`, the fixed-point algebra and the cleft generators `s(σ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{PhaseCoeff, TwistMatrix, TwistedPoly};
use crate::error::{Error, Result};

/// A character of `T^d`, i.e. an element of `Z^d`.
pub type Character = Vec<i64>;

pub fn char_add(a: &[i64], b: &[i64]) -> Character {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn char_neg(a: &[i64]) -> Character {
    a.iter().map(|x| -x).collect()
}

pub fn char_string(a: &[i64]) -> String {
    let parts: Vec<String> = a.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// The box `[-radius, radius]^d` of characters, iterated in lexicographic
/// order. For `d = 0` it holds only the trivial character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharBox {
    pub d: usize,
    pub radius: i64,
}

impl CharBox {
    pub fn new(d: usize, radius: i64) -> Self {
        Self { d, radius: radius.max(0) }
    }

    pub fn contains(&self, c: &[i64]) -> bool {
        c.len() == self.d && c.iter().all(|x| x.abs() <= self.radius)
    }

    pub fn len(&self) -> usize {
        ((2 * self.radius + 1) as usize).pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chars(&self) -> Vec<Character> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.d {
            let mut next = Vec::with_capacity(out.len() * (2 * self.radius as usize + 1));
            for prefix in &out {
                for v in -self.radius..=self.radius {
                    let mut c = prefix.clone();
                    c.push(v);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    pub fn pairs(&self) -> Vec<(Character, Character)> {
        let cs = self.chars();
        cs.iter().flat_map(|a| cs.iter().map(move |b| (a.clone(), b.clone()))).collect()
    }

    pub fn triples(&self) -> Vec<(Character, Character, Character)> {
        let cs = self.chars();
        let mut out = Vec::with_capacity(cs.len().pow(3));
        for a in &cs {
            for b in &cs {
                for c in &cs {
                    out.push((a.clone(), b.clone(), c.clone()));
                }
            }
        }
        out
    }
}

/// `T^d` acting by `α_z(u_j) = z_j u_j` on the coordinates in `acting`
/// (0-based, in character order) and trivially on the others.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAction {
    twist: Arc<TwistMatrix>,
    acting: Vec<usize>,
}

impl TorusAction {
    pub fn new(twist: Arc<TwistMatrix>, acting: Vec<usize>) -> Result<Self> {
        for (k, &j) in acting.iter().enumerate() {
            if j >= twist.n() {
                return Err(Error::Shape(format!("acting coordinate {} exceeds n = {}", j + 1, twist.n())));
            }
            if acting[..k].contains(&j) {
                return Err(Error::Shape(format!("acting coordinate {} listed twice", j + 1)));
            }
        }
        Ok(Self { twist, acting })
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        &self.twist
    }

    pub fn n(&self) -> usize {
        self.twist.n()
    }

    pub fn d(&self) -> usize {
        self.acting.len()
    }

    pub fn acting(&self) -> &[usize] {
        &self.acting
    }

    /// Generators of the fixed-point algebra `B₀`.
    pub fn fixed_coords(&self) -> Vec<usize> {
        (0..self.n()).filter(|j| !self.acting.contains(j)).collect()
    }

    pub fn is_acting(&self, j: usize) -> bool {
        self.acting.contains(&j)
    }

    pub fn degree(&self, a: &[i64]) -> Character {
        self.acting.iter().map(|&j| a[j]).collect()
    }

    pub fn chars(&self, radius: i64) -> CharBox {
        CharBox::new(self.d(), radius)
    }

    /// Normal-ordered monomials of `B₀` with every exponent in
    /// `[-degree, degree]`, all with coefficient 1.
    pub fn base_monomials(&self, degree: i64) -> Vec<TwistedPoly> {
        let fixed = self.fixed_coords();
        CharBox::new(fixed.len(), degree)
            .chars()
            .into_iter()
            .map(|e| {
                let mut a = vec![0; self.n()];
                for (&j, &v) in fixed.iter().zip(&e) {
                    a[j] = v;
                }
                TwistedPoly::unit_monomial(&self.twist, &a)
            })
            .collect()
    }

    /// Normal-ordered monomial with exponents in `[-degree, degree]` and
    /// acting exponents fixed to `sigma`.
    pub fn graded_monomials(&self, sigma: &[i64], degree: i64) -> Vec<TwistedPoly> {
        let s = generator_s(self, sigma);
        self.base_monomials(degree).iter().map(|b| b * &s).collect()
    }
}

/// Isotypic decomposition of an element, `x = Σ_σ x_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement {
    twist: Arc<TwistMatrix>,
    components: BTreeMap<Character, TwistedPoly>,
}

impl GradedElement {
    pub fn component(&self, sigma: &[i64]) -> TwistedPoly {
        self.components.get(sigma).cloned().unwrap_or_else(|| TwistedPoly::zero(&self.twist))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Character, &TwistedPoly)> {
        self.components.iter()
    }

    pub fn support(&self) -> Vec<Character> {
        self.components.keys().cloned().collect()
    }

    pub fn total(&self) -> TwistedPoly {
        self.components.values().fold(TwistedPoly::zero(&self.twist), |acc, x| &acc + x)
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|(k, x)| format!("{}: {x}", char_string(k))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn grade(action: &TorusAction, x: &TwistedPoly) -> GradedElement {
    let mut parts: BTreeMap<Character, Vec<(Vec<i64>, PhaseCoeff)>> = BTreeMap::new();
    for (a, c) in x.terms() {
        parts.entry(action.degree(a)).or_default().push((a.clone(), c.clone()));
    }
    let components = parts.into_iter().map(|(k, terms)| (k, TwistedPoly::from_terms(x.twist(), terms))).collect();
    GradedElement { twist: x.twist().clone(), components }
}

/// The conditional expectation `P₁` onto the fixed-point algebra.
pub fn fixed_part(action: &TorusAction, x: &TwistedPoly) -> TwistedPoly {
    x.filter_terms(|a| action.acting.iter().all(|&j| a[j] == 0))
}

/// `⟨x, y⟩_B = P₁(x* y)`.
pub fn inner_product_b(action: &TorusAction, x: &TwistedPoly, y: &TwistedPoly) -> TwistedPoly {
    fixed_part(action, &(&x.star() * y))
}

/// The cleft generator `s(σ) = ∏_{j∈S} u_j^{σ_j}`, normal-ordered.
pub fn generator_s(action: &TorusAction, sigma: &[i64]) -> TwistedPoly {
    let mut a = vec![0; action.n()];
    for (&j, &k) in action.acting.iter().zip(sigma) {
        a[j] = k;
    }
    TwistedPoly::unit_monomial(&action.twist, &a)
}

/// True iff every term of `x` has degree `sigma`.
pub fn check_equivariance(action: &TorusAction, x: &TwistedPoly, sigma: &[i64]) -> bool {
    x.terms().all(|(a, _)| action.degree(a) == sigma)
}

pub fn is_in_base(action: &TorusAction, x: &TwistedPoly) -> bool {
    check_equivariance(action, x, &vec![0; action.d()])
}

/// The quantum 3-torus with the gauge action of the circle on `u₃`.
pub fn q3_action(theta12: &str, theta13: &str, theta23: &str) -> Result<TorusAction> {
    let twist = TwistMatrix::from_upper_strs(3, &[theta12, theta13, theta23])?;
    TorusAction::new(Arc::new(twist), vec![2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn action() -> TorusAction {
        q3_action("1/4", "-1/3", "-1/6").unwrap()
    }

    #[test]
    fn grading_of_generators() {
        let a = action();
        let t = a.twist().clone();
        let u1 = TwistedPoly::generator(&t, 0);
        let u3 = TwistedPoly::generator(&t, 2);
        assert_eq!(grade(&a, &u3).support(), vec![vec![1]]);
        assert_eq!(grade(&a, &u1).support(), vec![vec![0]]);
        let x = &(&u1 + &u3) + &(&u3 * &u3);
        let g = grade(&a, &x);
        assert_eq!(g.support(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(g.total(), x);
    }

    #[test]
    fn conditional_expectation() {
        let a = action();
        let t = a.twist().clone();
        let u1 = TwistedPoly::generator(&t, 0);
        let u3 = TwistedPoly::generator(&t, 2);
        let u12 = TwistedPoly::unit_monomial(&t, &[1, 1, 0]);
        assert_eq!(fixed_part(&a, &u12), u12);
        assert!(fixed_part(&a, &u3).is_zero());
        let x = &(&u3.star() * &u1) * &u3;
        // u1 u3 = λ13 u3 u1, so u3* u1 u3 = λ13 u1 = λ31^{-1} u1
        assert_eq!(fixed_part(&a, &x), TwistedPoly::monomial(&t, vec![1, 0, 0], t.lambda(0, 2)));
    }

    #[test]
    fn inner_product_values() {
        let a = action();
        let t = a.twist().clone();
        let u1 = TwistedPoly::generator(&t, 0);
        let u3 = TwistedPoly::generator(&t, 2);
        assert!(inner_product_b(&a, &u3, &u3).is_one());
        assert_eq!(inner_product_b(&a, &u3, &(&u3 * &u1)), u1);
        assert!(inner_product_b(&a, &u1, &u3).is_zero());
    }

    #[test]
    fn cleft_generators() {
        let a = action();
        let t = a.twist().clone();
        assert_eq!(generator_s(&a, &[1]), TwistedPoly::generator(&t, 2));
        assert!(generator_s(&a, &[0]).is_one());
        assert_eq!(generator_s(&a, &[-2]), TwistedPoly::generator(&t, 2).pow(-2).unwrap());
        assert!(check_equivariance(&a, &TwistedPoly::generator(&t, 2), &[1]));
        assert!(!check_equivariance(&a, &TwistedPoly::generator(&t, 0), &[1]));
        assert!(check_equivariance(&a, &TwistedPoly::zero(&t), &[5]));
    }

    #[test]
    fn boxes() {
        assert_eq!(CharBox::new(0, 3).chars(), vec![Vec::<i64>::new()]);
        assert_eq!(CharBox::new(2, 1).len(), 9);
        assert_eq!(CharBox::new(2, 1).chars().len(), 9);
        assert_eq!(action().base_monomials(2).len(), 25);
    }
}
