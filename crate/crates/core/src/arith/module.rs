//! Degree-truncated graded modules.
//!
//! A module is stored as one finite-dimensional coefficient space per degree
//! `0..=dmax` together with the action of each polynomial variable as a map
//! between consecutive degrees. Free modules keep the action as a monomial
//! index map instead of a matrix; everything else stores explicit matrices.

use super::field::Field;
use super::mat::{EchelonBasis, Mat};
use super::monomial::PolyRing;
use super::ArithError;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct TruncatedModule<F: Field> {
    pub field: F,
    pub dmax: usize,
    pub dims: Vec<usize>,
    imp: Imp<F>,
}

#[derive(Clone, Debug)]
enum Imp<F: Field> {
    Free {
        ring: Arc<PolyRing>,
        gens: Vec<usize>,
        /// basis of degree d: (generator index, monomial index in S_{d - gen_degree})
        bases: Vec<Vec<(u16, u32)>>,
        index: Vec<HashMap<(u16, u32), u32>>,
    },
    Mats {
        /// acts[d][var]: dims[d+1] x dims[d]
        acts: Vec<Vec<Mat<F>>>,
    },
}

impl<F: Field> TruncatedModule<F> {
    /// Free module with one generator per entry of `gens` (a degree multiset).
    /// A generator in degree g contributes a shifted copy S{-g}.
    pub fn free(
        f: F,
        ring: &Arc<PolyRing>,
        gens: &[usize],
        dmax: usize,
    ) -> Result<Self, ArithError> {
        assert!(dmax <= ring.dmax);
        let mut gens = gens.to_vec();
        gens.sort_unstable();
        for &g in &gens {
            if g > dmax {
                return Err(ArithError::GenDegreeAboveBound { degree: g, bound: dmax });
            }
        }
        let mut bases = Vec::with_capacity(dmax + 1);
        let mut index = Vec::with_capacity(dmax + 1);
        let mut dims = Vec::with_capacity(dmax + 1);
        for d in 0..=dmax {
            let mut level: Vec<(u16, u32)> = Vec::new();
            for (gi, &g) in gens.iter().enumerate() {
                if g <= d {
                    for mi in 0..ring.dim(d - g) {
                        level.push((gi as u16, mi as u32));
                    }
                }
            }
            let map: HashMap<(u16, u32), u32> =
                level.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
            dims.push(level.len());
            index.push(map);
            bases.push(level);
        }
        Ok(TruncatedModule {
            field: f,
            dmax,
            dims,
            imp: Imp::Free { ring: Arc::clone(ring), gens, bases, index },
        })
    }

    pub fn zero(f: F, dmax: usize) -> Self {
        TruncatedModule {
            field: f,
            dmax,
            dims: vec![0; dmax + 1],
            imp: Imp::Mats { acts: vec![Vec::new(); dmax] },
        }
    }

    pub fn from_acts(f: F, dims: Vec<usize>, acts: Vec<Vec<Mat<F>>>) -> Self {
        let dmax = dims.len() - 1;
        assert_eq!(acts.len(), dmax);
        TruncatedModule { field: f, dmax, dims, imp: Imp::Mats { acts } }
    }

    /// Generator degrees when the module is stored as a free module.
    pub fn gens(&self) -> Option<&[usize]> {
        match &self.imp {
            Imp::Free { gens, .. } => Some(gens),
            Imp::Mats { .. } => None,
        }
    }

    pub fn free_basis(&self, d: usize) -> Option<&[(u16, u32)]> {
        match &self.imp {
            Imp::Free { bases, .. } => Some(&bases[d]),
            Imp::Mats { .. } => None,
        }
    }

    pub fn nvars(&self) -> usize {
        match &self.imp {
            Imp::Free { ring, .. } => ring.nvars,
            Imp::Mats { acts } => acts.first().map_or(0, |v| v.len()),
        }
    }

    /// Image of basis vector `k` of degree d under multiplication by x_var,
    /// as a sparse (index, coeff=1) hit for free modules.
    fn free_shift(&self, d: usize, var: usize, k: usize) -> usize {
        match &self.imp {
            Imp::Free { ring, gens, bases, index } => {
                let (gi, mi) = bases[d][k];
                let g = gens[gi as usize];
                let up = ring.mult_index(d - g, var, mi as usize);
                index[d + 1][&(gi, up as u32)] as usize
            }
            Imp::Mats { .. } => unreachable!(),
        }
    }

    /// Multiply a degree-d coefficient vector by the variable x_var.
    pub fn apply_var(&self, d: usize, var: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field;
        assert_eq!(v.len(), self.dims[d]);
        assert!(d < self.dmax);
        match &self.imp {
            Imp::Free { .. } => {
                let mut out = vec![f.zero(); self.dims[d + 1]];
                for (k, x) in v.iter().enumerate() {
                    if !f.is_zero(x) {
                        let j = self.free_shift(d, var, k);
                        f.add_assign(&mut out[j], x);
                    }
                }
                out
            }
            Imp::Mats { acts } => acts[d][var].mul_vec(f, v),
        }
    }

    /// Multiply by the linear form with the given variable coefficients.
    pub fn apply_linear(&self, coeffs: &[F::Elem], d: usize, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field;
        let mut out = vec![f.zero(); self.dims[d + 1]];
        for (var, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            match &self.imp {
                Imp::Free { .. } => {
                    for (k, x) in v.iter().enumerate() {
                        if !f.is_zero(x) {
                            let j = self.free_shift(d, var, k);
                            f.add_assign(&mut out[j], &f.mul(c, x));
                        }
                    }
                }
                Imp::Mats { acts } => {
                    let img = acts[d][var].mul_vec(f, v);
                    for (o, x) in out.iter_mut().zip(&img) {
                        if !f.is_zero(x) {
                            f.add_assign(o, &f.mul(c, x));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn act_matrix(&self, d: usize, var: usize) -> Mat<F> {
        let f = self.field;
        match &self.imp {
            Imp::Free { .. } => {
                let mut m = Mat::zeros(f, self.dims[d + 1], self.dims[d]);
                for k in 0..self.dims[d] {
                    let j = self.free_shift(d, var, k);
                    m.set(j, k, f.one());
                }
                m
            }
            Imp::Mats { acts } => acts[d][var].clone(),
        }
    }

    /// Action maps commute: x_i (x_j v) = x_j (x_i v) on all basis vectors.
    pub fn check_commuting(&self) -> Result<(), String> {
        let f = self.field;
        let nv = self.nvars();
        for d in 0..self.dmax.saturating_sub(1) {
            for i in 0..nv {
                for j in i + 1..nv {
                    for k in 0..self.dims[d] {
                        let mut e = vec![f.zero(); self.dims[d]];
                        e[k] = f.one();
                        let ij = self.apply_var(d + 1, i, &self.apply_var(d, j, &e));
                        let ji = self.apply_var(d + 1, j, &self.apply_var(d, i, &e));
                        if ij != ji {
                            return Err(format!(
                                "actions x{} and x{} do not commute on basis {k} of degree {d}",
                                i + 1,
                                j + 1
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Result of the graded Nakayama computation: generator multiplicities per
/// degree, first-echelon generator lifts, and whether the top degree is
/// generator-free (multiplicity at dmax would hide generators beyond the
/// truncation).
#[derive(Clone, Debug)]
pub struct GenReport<F: Field> {
    pub mults: Vec<usize>,
    pub saturated: bool,
    /// (degree, coordinate vector in M_d) per generator, in selection order.
    pub lifts: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> GenReport<F> {
    /// Sorted generator degree multiset.
    pub fn degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (d, &m) in self.mults.iter().enumerate() {
            out.extend(std::iter::repeat(d).take(m));
        }
        out
    }
}

/// Minimal generator degrees of a truncated module: in each degree the
/// multiplicity is dim M_d minus the dimension of the span of x_i * M_{d-1}.
pub fn minimal_generator_degrees<F: Field>(m: &TruncatedModule<F>) -> GenReport<F> {
    let f = m.field;
    let nv = m.nvars();
    let mut mults = Vec::with_capacity(m.dmax + 1);
    let mut lifts = Vec::new();
    for d in 0..=m.dmax {
        let mut span = EchelonBasis::new(f, m.dims[d]);
        if d > 0 && m.dims[d] > 0 {
            for var in 0..nv {
                for k in 0..m.dims[d - 1] {
                    let mut e = vec![f.zero(); m.dims[d - 1]];
                    e[k] = f.one();
                    span.insert(m.apply_var(d - 1, var, &e));
                }
            }
        }
        let mut mult = 0usize;
        for j in 0..m.dims[d] {
            let mut e = vec![f.zero(); m.dims[d]];
            e[j] = f.one();
            if span.insert(e.clone()) {
                mult += 1;
                lifts.push((d, e));
            }
        }
        mults.push(mult);
    }
    let saturated = mults[m.dmax] == 0;
    GenReport { mults, saturated, lifts }
}

/// Build the submodule of `ambient` spanned degreewise by the given vectors,
/// with induced action matrices. Fails if the spans are not closed under the
/// ambient action.
pub fn span_module<F: Field>(
    ambient: &TruncatedModule<F>,
    spans: &[Vec<Vec<F::Elem>>],
) -> Result<(TruncatedModule<F>, Vec<EchelonBasis<F>>), String> {
    let f = ambient.field;
    let nv = ambient.nvars();
    let dmax = ambient.dmax;
    assert_eq!(spans.len(), dmax + 1);
    let mut bases: Vec<EchelonBasis<F>> = Vec::with_capacity(dmax + 1);
    for (d, vecs) in spans.iter().enumerate() {
        let mut eb = EchelonBasis::new(f, ambient.dims[d]);
        for v in vecs {
            eb.insert(v.clone());
        }
        bases.push(eb);
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
    let mut acts: Vec<Vec<Mat<F>>> = Vec::with_capacity(dmax);
    for d in 0..dmax {
        let mut per_var = Vec::with_capacity(nv);
        for var in 0..nv {
            let mut mat = Mat::zeros(f, dims[d + 1], dims[d]);
            for (k, row) in bases[d].rows().iter().enumerate() {
                let img = ambient.apply_var(d, var, row);
                let coords = bases[d + 1].coords(&img).ok_or_else(|| {
                    format!("span not closed under x{} at degree {d}", var + 1)
                })?;
                for (i, c) in coords.into_iter().enumerate() {
                    mat.set(i, k, c);
                }
            }
            per_var.push(mat);
        }
        acts.push(per_var);
    }
    Ok((TruncatedModule::from_acts(f, dims, acts), bases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Rat, Rationals};
    use proptest::prelude::*;

    fn ring(nvars: usize, dmax: usize) -> Arc<PolyRing> {
        Arc::new(PolyRing::new(nvars, dmax))
    }

    #[test]
    fn free_module_dims() {
        let f = Rationals;
        // gens {0}, m=2, D=2: dims of S in 2 variables are 1,2,3
        let r = ring(2, 2);
        let m = TruncatedModule::free(f, &r, &[0], 2).unwrap();
        assert_eq!(m.dims, vec![1, 2, 3]);
        // gens {}, D=3: zero module
        let r3 = ring(2, 3);
        let z = TruncatedModule::free(f, &r3, &[], 3).unwrap();
        assert_eq!(z.dims, vec![0, 0, 0, 0]);
        // gens {0,1}, m=1, D=2: S + S{-1} in one variable has dims 1,2,2
        let r1 = ring(1, 2);
        let m2 = TruncatedModule::free(f, &r1, &[0, 1], 2).unwrap();
        assert_eq!(m2.dims, vec![1, 2, 2]);
    }

    #[test]
    fn free_module_rejects_large_generator() {
        let f = Rationals;
        let r = ring(2, 2);
        assert_eq!(
            TruncatedModule::free(f, &r, &[3], 2).unwrap_err(),
            ArithError::GenDegreeAboveBound { degree: 3, bound: 2 }
        );
    }

    #[test]
    fn minimal_generators_of_free_module() {
        let f = Rationals;
        let r = ring(2, 3);
        let m = TruncatedModule::free(f, &r, &[0, 1], 3).unwrap();
        let rep = minimal_generator_degrees(&m);
        assert_eq!(rep.degrees(), vec![0, 1]);
        assert!(rep.saturated);
    }

    #[test]
    fn minimal_generators_of_principal_ideal() {
        // x1*S inside S (m=2), truncated at D=3: single generator in degree 1
        let f = Rationals;
        let r = ring(2, 3);
        let s = TruncatedModule::free(f, &r, &[0], 3).unwrap();
        let mut spans: Vec<Vec<Vec<Rat>>> = vec![Vec::new(); 4];
        for d in 1..=3usize {
            // x1 * (each monomial of S_{d-1})
            for k in 0..s.dims[d - 1] {
                let mut e = vec![Rat::ZERO; s.dims[d - 1]];
                e[k] = Rat::ONE;
                spans[d].push(s.apply_var(d - 1, 0, &e));
            }
        }
        let (sub, _) = span_module(&s, &spans).unwrap();
        assert_eq!(sub.dims, vec![0, 1, 2, 3]);
        let rep = minimal_generator_degrees(&sub);
        assert_eq!(rep.degrees(), vec![1]);
        assert!(rep.saturated);
        sub.check_commuting().unwrap();
    }

    #[test]
    fn unsaturated_when_top_degree_has_generators() {
        let f = Rationals;
        let r = ring(2, 2);
        let m = TruncatedModule::free(f, &r, &[0, 2], 2).unwrap();
        let rep = minimal_generator_degrees(&m);
        assert_eq!(rep.degrees(), vec![0, 2]);
        assert!(!rep.saturated);
    }

    proptest! {
        // free_module then minimal_generator_degrees recovers the multiset
        #[test]
        fn nakayama_recovers_free_generators(
            gens in proptest::collection::vec(0usize..4, 0..4),
            nvars in 1usize..4,
        ) {
            let f = Rationals;
            let dmax = 5;
            let r = ring(nvars, dmax);
            let m = TruncatedModule::free(f, &r, &gens, dmax).unwrap();
            let rep = minimal_generator_degrees(&m);
            let mut expected = gens.clone();
            expected.sort_unstable();
            prop_assert_eq!(rep.degrees(), expected);
            prop_assert!(rep.saturated);
        }

        // action maps of free modules commute
        #[test]
        fn free_actions_commute(
            gens in proptest::collection::vec(0usize..3, 1..3),
            nvars in 2usize..4,
        ) {
            let f = Rationals;
            let r = ring(nvars, 4);
            let m = TruncatedModule::free(f, &r, &gens, 4).unwrap();
            prop_assert!(m.check_commuting().is_ok());
        }
    }
}
