use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{PhaseCoeff, PolyMatrix, TwistMatrix, TwistedPoly};
use crate::dynamics::{is_in_base, TorusAction};
use crate::error::{Error, Result};

/// A `*`-homomorphism from the algebra generated by `domain` into
/// `dim × dim` matrices, fixed by the images of the generators. With
/// `dim = 1` and unit `1` this is an algebra morphism `B₀ → B₀`; the
/// general form carries `γ_σ` with projection `γ_σ(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    twist: Arc<TwistMatrix>,
    domain: Vec<usize>,
    unit: PolyMatrix,
    images: BTreeMap<usize, PolyMatrix>,
}

pub type AlgebraMorphism = Morphism;

impl Morphism {
    pub fn new(twist: &Arc<TwistMatrix>, unit: PolyMatrix, images: BTreeMap<usize, PolyMatrix>) -> Result<Self> {
        let d = unit.rows();
        if unit.cols() != d {
            return Err(Error::Shape("unit image must be square".into()));
        }
        for (k, m) in &images {
            if *k >= twist.n() {
                return Err(Error::InvalidMorphism(format!("no generator u{}", k + 1)));
            }
            if m.rows() != d || m.cols() != d {
                return Err(Error::Shape(format!("image of u{} is {}x{}, expected {d}x{d}", k + 1, m.rows(), m.cols())));
            }
        }
        Ok(Self { twist: twist.clone(), domain: images.keys().copied().collect(), unit, images })
    }

    /// Algebra morphism with scalar images.
    pub fn algebra(twist: &Arc<TwistMatrix>, images: BTreeMap<usize, TwistedPoly>) -> Result<Self> {
        let images = images.into_iter().map(|(k, v)| (k, PolyMatrix::scalar(v))).collect();
        Self::new(twist, PolyMatrix::scalar(TwistedPoly::one(twist)), images)
    }

    pub fn identity(twist: &Arc<TwistMatrix>, domain: &[usize]) -> Self {
        let images = domain.iter().map(|&k| (k, TwistedPoly::generator(twist, k))).collect();
        Self::algebra(twist, images).expect("identity is well-formed")
    }

    /// `τ_w`: `u_k ↦ w_k u_k` for unimodular scalars `w_k`.
    pub fn diagonal(twist: &Arc<TwistMatrix>, phases: BTreeMap<usize, PhaseCoeff>) -> Result<Self> {
        let images = phases.into_iter().map(|(k, w)| (k, TwistedPoly::monomial(twist, unit_vec(twist.n(), k), w))).collect();
        Self::algebra(twist, images)
    }

    /// `Ad[w]`: `u_k ↦ w u_k w*` for a unitary `w`.
    pub fn inner(twist: &Arc<TwistMatrix>, domain: &[usize], w: &TwistedPoly) -> Result<Self> {
        if !(w * &w.star()).is_one() {
            return Err(Error::InvalidMorphism(format!("{w} is not unitary")));
        }
        let ws = w.star();
        let images = domain.iter().map(|&k| (k, &(w * &TwistedPoly::generator(twist, k)) * &ws)).collect();
        Self::algebra(twist, images)
    }

    pub fn twist(&self) -> &Arc<TwistMatrix> {
        &self.twist
    }

    pub fn dim(&self) -> usize {
        self.unit.rows()
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn unit(&self) -> &PolyMatrix {
        &self.unit
    }

    pub fn image(&self, k: usize) -> Result<&PolyMatrix> {
        self.images.get(&k).ok_or(Error::OutsideDomain(k + 1))
    }

    pub fn image_poly(&self, k: usize) -> Result<TwistedPoly> {
        let m = self.image(k)?;
        m.as_poly().cloned().ok_or_else(|| Error::Shape("morphism is not scalar".into()))
    }

    pub fn set_image(&mut self, k: usize, m: PolyMatrix) -> Result<()> {
        if !self.images.contains_key(&k) {
            return Err(Error::OutsideDomain(k + 1));
        }
        self.images.insert(k, m);
        Ok(())
    }

    /// Extends linearly and multiplicatively; `u_k^{-1}` goes to the
    /// adjoint of the image of `u_k`.
    pub fn apply(&self, x: &TwistedPoly) -> Result<PolyMatrix> {
        let d = self.dim();
        let mut out = PolyMatrix::zeros(&self.twist, d, d);
        for (a, c) in x.terms() {
            let mut prod = self.unit.clone();
            for (k, &e) in a.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = self.image(k)?;
                let step = if e > 0 { img.clone() } else { img.adjoint() };
                prod = prod.mul(&matrix_pow(&step, e.unsigned_abs())?)?;
            }
            out = out.add(&prod.scale(c))?;
        }
        Ok(out)
    }

    pub fn apply_poly(&self, x: &TwistedPoly) -> Result<TwistedPoly> {
        let m = self.apply(x)?;
        m.as_poly().cloned().ok_or_else(|| Error::Shape("morphism is not scalar".into()))
    }

    /// `(self ⊗ id)(y)` for a matrix `y` over the domain algebra.
    pub fn apply_matrix(&self, y: &PolyMatrix) -> Result<PolyMatrix> {
        y.expand_blocks(self.dim(), |e| self.apply(e))
    }

    /// `self ∘ other` for scalar morphisms.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        let images = other
            .images
            .iter()
            .map(|(&k, m)| Ok((k, self.apply_matrix(m)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Morphism::new(&self.twist, self.apply_matrix(&other.unit)?, images)
    }

    /// Checks the defining relations and unitarity of the generator images.
    pub fn validate(&self) -> Result<()> {
        for (&k, m) in &self.images {
            let ma = m.adjoint();
            if ma.mul(m)? != self.unit || m.mul(&ma)? != self.unit {
                return Err(Error::InvalidMorphism(format!("image of u{} is not unitary relative to the unit", k + 1)));
            }
        }
        let keys: Vec<usize> = self.domain.clone();
        for (i, &k) in keys.iter().enumerate() {
            for &l in &keys[i + 1..] {
                let lhs = self.images[&k].mul(&self.images[&l])?;
                let rhs = self.images[&l].mul(&self.images[&k])?.scale(&self.twist.lambda(k, l));
                if lhs != rhs {
                    return Err(Error::InvalidMorphism(format!("relation between u{} and u{} is not respected", k + 1, l + 1)));
                }
            }
        }
        Ok(())
    }

    /// Checks that every image lies in the fixed-point algebra.
    pub fn check_maps_into_base(&self, action: &TorusAction) -> Result<()> {
        for (&k, m) in &self.images {
            if !m.entries().iter().all(|e| is_in_base(action, e)) {
                return Err(Error::EscapesFixedPoint(format!("image of u{} is {m}", k + 1)));
            }
        }
        Ok(())
    }

    /// True iff `self ∘ other` and `other ∘ self` fix every generator.
    pub fn is_inverse_of(&self, other: &Morphism) -> Result<bool> {
        let id = Morphism::identity(&self.twist, &self.domain);
        Ok(self.compose(other)? == id && other.compose(self)? == id)
    }

    pub fn is_identity(&self) -> bool {
        *self == Morphism::identity(&self.twist, &self.domain)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|(k, m)| format!("u{} -> {m}", k + 1)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn unit_vec(n: usize, k: usize) -> Vec<i64> {
    let mut a = vec![0; n];
    a[k] = 1;
    a
}

/// `m^e` for `e ≥ 1` by repeated squaring.
fn matrix_pow(m: &PolyMatrix, mut e: u64) -> Result<PolyMatrix> {
    let mut base = m.clone();
    let mut acc: Option<PolyMatrix> = None;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                Some(a) => a.mul(&base)?,
                None => base.clone(),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul(&base)?;
    }
    Ok(acc.expect("exponent is positive"))
}
