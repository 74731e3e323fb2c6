//! Brute-force Ising oracles: sums over the even subgraphs of a map.

use std::collections::BTreeMap;

use num_traits::One;

use crate::combmap::homology::fundamental_cycles;
use crate::combmap::{Chain2, CombMap, HomologyBasis, Weight};
use crate::error::{Error, Result};
use crate::exactalg::{GPoly, GaussRat, Monomial, VarId};
use crate::kasteleyn::QuadForm2;

/// Default cap on the cycle-space dimension for enumeration.
pub const BRUTE_FORCE_CAP: usize = 22;

/// The cycle space `Z_1(G; Z_2)` spanned by fundamental cycles.
#[derive(Clone, Debug)]
pub struct EvenSubgraphSpace {
    pub basis: Vec<Chain2>,
    n_edges: usize,
}

impl EvenSubgraphSpace {
    pub fn new(map: &CombMap) -> Self {
        EvenSubgraphSpace { basis: fundamental_cycles(map), n_edges: map.n_edges() }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.dimension() > cap {
            return Err(Error::Capacity {
                what: "cycle-space dimension",
                got: self.dimension(),
                limit: cap,
                hint: "use the kacward or pfaffian method",
            });
        }
        Ok(())
    }

    /// Visits every even subgraph in Gray-code order together with the
    /// Gray-code word (bit `i` set when basis cycle `i` is included).
    pub fn for_each(&self, cap: usize, mut visit: impl FnMut(&Chain2, u64)) -> Result<()> {
        self.check_cap(cap)?;
        let mut cur = Chain2::zeros(self.n_edges);
        let mut word = 0u64;
        visit(&cur, word);
        for k in 1u64..(1u64 << self.dimension()) {
            let i = k.trailing_zeros() as usize;
            cur.xor_assign(&self.basis[i]);
            word ^= 1 << i;
            visit(&cur, word);
        }
        Ok(())
    }
}

/// `x(C)`: the product of the edge weights of a chain.
pub fn chain_weight(map: &CombMap, c: &Chain2) -> GPoly {
    let mut exps: BTreeMap<VarId, u32> = BTreeMap::new();
    let mut coeff = GaussRat::one();
    for e in c.edges() {
        match map.weight(e) {
            Weight::Var(v) => *exps.entry(*v).or_default() += 1,
            Weight::Const(k) => coeff = &coeff * k,
        }
    }
    GPoly::monomial(Monomial::from_pairs(exps.into_iter().collect()), coeff)
}

/// `Z^I(G) = Σ_ξ x(|ξ|)` over all even subgraphs.
pub fn z_ising(map: &CombMap) -> Result<GPoly> {
    z_ising_with_cap(map, BRUTE_FORCE_CAP)
}

pub fn z_ising_with_cap(map: &CombMap, cap: usize) -> Result<GPoly> {
    let mut z = GPoly::zero();
    EvenSubgraphSpace::new(map).for_each(cap, |c, _| z.add_assign_ref(&chain_weight(map, c)))?;
    Ok(z)
}

/// Partial sums `Z^I_α` for every class, indexed by the class bitmask.
pub fn z_ising_partials(map: &CombMap, basis: &HomologyBasis) -> Result<Vec<GPoly>> {
    let space = EvenSubgraphSpace::new(map);
    let class_of: Vec<u64> = space.basis.iter().map(|c| mask_of(&basis.coords_unchecked(c))).collect();
    let mut out = vec![GPoly::zero(); 1 << basis.rank()];
    space.for_each(BRUTE_FORCE_CAP, |c, word| {
        let mut cls = 0u64;
        let mut w = word;
        while w != 0 {
            cls ^= class_of[w.trailing_zeros() as usize];
            w &= w - 1;
        }
        out[cls as usize].add_assign_ref(&chain_weight(map, c));
    })?;
    Ok(out)
}

/// `Z^I_α(G)`: even subgraphs in the homology class `alpha`.
pub fn z_ising_partial(map: &CombMap, basis: &HomologyBasis, alpha: &[bool]) -> Result<GPoly> {
    if alpha.len() != basis.rank() {
        return Err(Error::Precondition(format!("class has {} bits, expected {}", alpha.len(), basis.rank())));
    }
    Ok(z_ising_partials(map, basis)?.swap_remove(mask_of(alpha) as usize))
}

/// `Z_q(G) = Σ_ξ (−1)^{q([ξ])} x(|ξ|)`.
pub fn z_twisted(map: &CombMap, basis: &HomologyBasis, q: &QuadForm2) -> Result<GPoly> {
    let parts = z_ising_partials(map, basis)?;
    let mut z = GPoly::zero();
    for (mask, p) in parts.iter().enumerate() {
        if q.eval_mask(mask) {
            z.sub_assign_ref(p);
        } else {
            z.add_assign_ref(p);
        }
    }
    Ok(z)
}

/// Floating-point `Z^I` for numeric edge weights, with compensated summation
/// (plain summation drifts by ~1e-11 over 2^17 terms).
pub fn z_ising_f64(map: &CombMap, weights: &[f64], cap: usize) -> Result<f64> {
    let (mut z, mut comp) = (0.0f64, 0.0f64);
    EvenSubgraphSpace::new(map).for_each(cap, |c, _| {
        let t = c.edges().map(|e| weights[e]).product::<f64>();
        let s = z + t;
        comp += if z.abs() >= t.abs() { (z - s) + t } else { (t - s) + z };
        z = s;
    })?;
    Ok(z + comp)
}

pub(crate) fn mask_of(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |m, (i, &b)| m | ((b as u64) << i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::generate::*;
    use crate::combmap::homology_basis;

    fn show(map: &CombMap, p: &GPoly) -> String {
        p.display_with(&|v| map.var_name(v)).to_string()
    }

    #[test]
    fn planar_figure_eight() {
        let m = figure_eight(false);
        assert_eq!(show(&m, &z_ising(&m).unwrap()), "1 + x1 + x2 + x1*x2");
    }

    #[test]
    fn tree_is_one() {
        assert_eq!(z_ising(&small_tree()).unwrap(), GPoly::one());
    }

    #[test]
    fn k4_shared_weight() {
        let m = k4_planar();
        assert_eq!(show(&m, &z_ising(&m).unwrap()), "1 + 4*x^3 + 3*x^4");
    }

    #[test]
    fn torus_partials() {
        let m = figure_eight(true);
        let hb = homology_basis(&m).unwrap();
        let parts = z_ising_partials(&m, &hb).unwrap();
        let shown: Vec<String> = parts.iter().map(|p| show(&m, p)).collect();
        assert_eq!(shown, vec!["1", "x1", "x2", "x1*x2"]);
        assert_eq!(z_ising_partial(&m, &hb, &[true, false]).unwrap(), parts[1]);
    }

    #[test]
    fn planar_single_class() {
        let m = k4_planar();
        let hb = homology_basis(&m).unwrap();
        assert_eq!(z_ising_partials(&m, &hb).unwrap(), vec![z_ising(&m).unwrap()]);
    }

    #[test]
    fn twisted_torus() {
        let m = figure_eight(true);
        let hb = homology_basis(&m).unwrap();
        let zero = QuadForm2::new(vec![false, false], hb.intersection.clone());
        assert_eq!(show(&m, &z_twisted(&m, &hb, &zero).unwrap()), "1 + x1 + x2 - x1*x2");
        let odd = QuadForm2::new(vec![true, true], hb.intersection.clone());
        assert_eq!(show(&m, &z_twisted(&m, &hb, &odd).unwrap()), "1 - x1 - x2 - x1*x2");
    }

    #[test]
    fn capacity_error() {
        let m = torus_lattice(3);
        assert!(matches!(z_ising_with_cap(&m, 5), Err(Error::Capacity { .. })));
    }

    #[test]
    fn numeric_matches_symbolic() {
        let m = triangle();
        let z = z_ising_f64(&m, &[0.5, 0.25, 0.5], 10).unwrap();
        assert!((z - 1.0625).abs() < 1e-15);
    }
}
