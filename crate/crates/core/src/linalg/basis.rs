use crate::error::{Error, Result};

use super::matrix::RowVector;
use super::scalar::Scalar;

/// A maximal linearly independent subset plus exact expansions.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisExtraction<T> {
    /// Indices (into the input list) of the chosen basis, in selection order.
    pub basis: Vec<usize>,
    /// `coefficients[k][b]` is the weight of `basis[b]` in vector `k`.
    pub coefficients: Vec<Vec<T>>,
}

impl<T: Scalar> BasisExtraction<T> {
    /// Recomputes `Σ_b coefficients[k][b] · vs[basis[b]]`.
    pub fn reconstruct(&self, vs: &[RowVector<T>], k: usize) -> Result<RowVector<T>> {
        let dim = vs.first().map_or(0, RowVector::dim);
        let mut acc = RowVector::zeros(dim);
        for (b, c) in self.basis.iter().zip(&self.coefficients[k]) {
            acc = acc.add(&vs[*b].scale(c))?;
        }
        Ok(acc)
    }
}

struct EchelonRow<T> {
    pivot: usize,
    vector: Vec<T>,
    /// `vector = Σ combo[b] · basis_b`
    combo: Vec<T>,
}

/// Incremental basis over a fixed dimension; supports greedy selection with
/// extra admission rules.
pub struct BasisBuilder<T> {
    dim: usize,
    rows: Vec<EchelonRow<T>>,
    members: Vec<usize>,
}

impl<T: Scalar> BasisBuilder<T> {
    pub fn new(dim: usize) -> Self {
        BasisBuilder {
            dim,
            rows: Vec::new(),
            members: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Tags of the admitted vectors, in admission order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Reduces `v` against the current basis: the residual and the
    /// coefficients of the part lying in the span.
    fn reduce(&self, v: &RowVector<T>) -> Result<(Vec<T>, Vec<T>)> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let mut residual = v.entries().to_vec();
        let mut coeffs = vec![T::zero(); self.members.len()];
        for row in &self.rows {
            let r = residual[row.pivot].clone();
            if r.is_negligible() {
                continue;
            }
            let f = r / row.vector[row.pivot].clone();
            for (x, y) in residual.iter_mut().zip(&row.vector) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
            residual[row.pivot] = T::zero();
            for (c, d) in coeffs.iter_mut().zip(&row.combo) {
                if !d.is_zero() {
                    *c = c.clone() + f.clone() * d.clone();
                }
            }
        }
        Ok((residual, coeffs))
    }

    /// Coefficients of `v` over the basis, or `None` when `v` is outside the
    /// span.
    pub fn express(&self, v: &RowVector<T>) -> Result<Option<Vec<T>>> {
        let (residual, coeffs) = self.reduce(v)?;
        Ok(residual.iter().all(Scalar::is_negligible).then_some(coeffs))
    }

    /// Adds `v` (tagged `tag`) when it is independent of the current basis.
    /// Returns whether it was added.
    pub fn insert(&mut self, tag: usize, v: &RowVector<T>) -> Result<bool> {
        let (residual, coeffs) = self.reduce(v)?;
        let Some(pivot) = residual.iter().position(|x| !x.is_negligible()) else {
            return Ok(false);
        };
        // residual = v - Σ coeffs·basis, and v is the new member
        let mut combo: Vec<T> = coeffs.into_iter().map(|c| -c).collect();
        combo.push(T::one());
        for row in &mut self.rows {
            row.combo.push(T::zero());
        }
        self.rows.push(EchelonRow {
            pivot,
            vector: residual,
            combo,
        });
        self.members.push(tag);
        Ok(true)
    }
}

/// Greedy basis extraction in input order: a vector joins the basis when it
/// is not in the span of the vectors already chosen.
pub fn basis_extract<T: Scalar>(vs: &[RowVector<T>]) -> Result<BasisExtraction<T>> {
    let Some(first) = vs.first() else {
        return Ok(BasisExtraction {
            basis: Vec::new(),
            coefficients: Vec::new(),
        });
    };
    let mut builder = BasisBuilder::new(first.dim());
    for (i, v) in vs.iter().enumerate() {
        builder.insert(i, v)?;
    }
    finish(builder, vs)
}

/// Expands every vector over a finished builder.
pub fn finish<T: Scalar>(builder: BasisBuilder<T>, vs: &[RowVector<T>]) -> Result<BasisExtraction<T>> {
    let coefficients = vs
        .iter()
        .map(|v| {
            builder
                .express(v)?
                .ok_or_else(|| Error::DimensionMismatch {
                    expected: builder.len(),
                    found: builder.len() + 1,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisExtraction {
        basis: builder.members,
        coefficients,
    })
}
