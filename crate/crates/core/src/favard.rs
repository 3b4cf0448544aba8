//! Operator-polynomial families `P_j^{(r)}(lambda) = sum_d lambda^d C_{j,d}^{(r)}`
//! reproducing coordinate vectors, and the moment functionals built on them.
//!
//! For each residue `r` in `[-s, s)` the family starts from `P_r = I`,
//! `P_j = 0` at the other seed indices, and satisfies
//! `lambda P_j = sum_k (A*)_{j,k} P_k`, so `{P_j(lambda) x}_j` is a generalized
//! eigenvector of `A*`. Evaluated at the conjugate operator (entries
//! `(A_{j,k})^H` kept in place) the families sum to the coordinate embedding:
//! `sum_r P_n^{(r)}(conj A) i_r v = i_n v`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_ops::{block_norm, is_singular, BandedOperator, Block};
use crate::sampling::random_complex;
use crate::state::{LatticeState, Window};

/// Commutator tolerance relative to `||X|| ||Y||`.
const COMMUTE_RTOL: f64 = 1e-12;

/// Tail contributions below this fraction of the total are negligible.
pub const TAIL_RTOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyFamily {
    r: i64,
    s: usize,
    m: usize,
    window: Window,
    // coeffs[offset(j)][d] = C_{j,d}; an empty list is the zero polynomial
    coeffs: Vec<Vec<Block>>,
}

impl PolyFamily {
    pub fn residue(&self) -> i64 {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn block_dim(&self) -> usize {
        self.m
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coefficients(&self, j: i64) -> &[Block] {
        &self.coeffs[self.window.offset(j)]
    }

    pub fn coeff(&self, j: i64, d: usize) -> Option<&Block> {
        self.coefficients(j).get(d)
    }

    /// Highest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self, j: i64) -> Option<usize> {
        self.coefficients(j).iter().rposition(|b| b.iter().any(|z| z.norm() != 0.0))
    }

    /// `P_j(lambda)` by Horner's rule.
    pub fn evaluate(&self, j: i64, lambda: Complex64) -> Block {
        self.coefficients(j)
            .iter()
            .rev()
            .fold(DMatrix::zeros(self.m, self.m), |acc: Block, c| acc * lambda + c)
    }

    pub fn to_json(&self) -> String {
        let mut coeffs = Vec::new();
        for j in self.window.indices() {
            for (d, b) in self.coefficients(j).iter().enumerate() {
                let mut block = Vec::with_capacity(self.m * self.m);
                for r in 0..self.m {
                    for c in 0..self.m {
                        block.push([b[(r, c)].re, b[(r, c)].im]);
                    }
                }
                coeffs.push(CoeffDoc { j, m: d, block });
            }
        }
        let doc = FamilyDoc { r: self.r, s: self.s, block_dim: self.m, window: [self.window.lo, self.window.hi], coeffs };
        serde_json::to_string(&doc).expect("family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text)?;
        let window = Window::new(doc.window[0], doc.window[1])?;
        let m = doc.block_dim;
        let mut coeffs: Vec<Vec<Block>> = vec![Vec::new(); window.len()];
        for c in doc.coeffs {
            if !window.contains(c.j) || c.block.len() != m * m {
                return Err(Error::InvalidArgument(format!("coefficient ({}, {}) has bad index or shape", c.j, c.m)));
            }
            let list = &mut coeffs[window.offset(c.j)];
            if list.len() <= c.m {
                list.resize(c.m + 1, DMatrix::zeros(m, m));
            }
            list[c.m] = DMatrix::from_row_iterator(m, m, c.block.iter().map(|p| Complex64::new(p[0], p[1])));
        }
        Ok(Self { r: doc.r, s: doc.s, m, window, coeffs })
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffDoc {
    j: i64,
    m: usize,
    block: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct FamilyDoc {
    r: i64,
    s: usize,
    block_dim: usize,
    window: [i64; 2],
    coeffs: Vec<CoeffDoc>,
}

/// Side on which band entries multiply the coefficients in the recurrence.
/// With commuting entries both orders give the same family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOrder {
    EntryLeft,
    EntryRight,
}

fn mul(order: ProductOrder, entry: &Block, coeff: &Block) -> Block {
    match order {
        ProductOrder::EntryLeft => entry * coeff,
        ProductOrder::EntryRight => coeff * entry,
    }
}

/// Pairwise commutation check of all distinct blocks.
pub fn check_commuting(a: &BandedOperator) -> Result<()> {
    if a.block_dim() == 1 {
        return Ok(());
    }
    let mut blocks: Vec<&Block> = Vec::new();
    for j in a.window().indices() {
        for k in a.band_cols(j) {
            let b = a.block(j, k).unwrap();
            if b.iter().any(|z| z.norm() != 0.0) && !blocks.contains(&b) {
                blocks.push(b);
            }
        }
    }
    let norms: Vec<f64> = blocks.iter().map(|b| block_norm(b)).collect();
    for i in 0..blocks.len() {
        for k in i + 1..blocks.len() {
            let comm = blocks[i] * blocks[k] - blocks[k] * blocks[i];
            if block_norm(&comm) > COMMUTE_RTOL * norms[i] * norms[k] {
                return Err(Error::Unsupported(
                    "block entries do not commute; polynomial families need commuting entries".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Builds the family for residue `r` over the operator window.
pub fn build_poly_family(a: &BandedOperator, r: i64) -> Result<PolyFamily> {
    check_commuting(a)?;
    build_poly_family_ordered(a, r, ProductOrder::EntryLeft)
}

/// [`build_poly_family`] without the commutation check and with a chosen product order.
pub fn build_poly_family_ordered(a: &BandedOperator, r: i64, order: ProductOrder) -> Result<PolyFamily> {
    let s = a.s() as i64;
    let m = a.block_dim();
    let w = a.window();
    if !(-s..s).contains(&r) {
        return Err(Error::InvalidArgument(format!("residue {r} outside [{}, {})", -s, s)));
    }
    if w.lo > -s - 1 || w.hi < s {
        return Err(Error::InvalidArgument(format!("window {w:?} too small for one recurrence step")));
    }
    let astar = a.adjoint();
    let mut coeffs: Vec<Vec<Block>> = vec![Vec::new(); w.len()];
    coeffs[w.offset(r)] = vec![DMatrix::identity(m, m)];

    let step = |coeffs: &mut Vec<Vec<Block>>, j: i64, u: i64| -> Result<()> {
        let ext = astar.block(j, u).unwrap();
        let (sing, smin) = is_singular(ext);
        let inv = if sing { None } else { ext.clone().try_inverse() };
        let inv = inv.ok_or(Error::SingularExternal { row: j, col: u, sigma_min: smin })?;
        let pj = &coeffs[w.offset(j)];
        let mut deg = pj.len() + 1;
        for k in (j - s..=j + s).filter(|&k| k != u) {
            deg = deg.max(coeffs[w.offset(k)].len());
        }
        let mut out: Vec<Block> = vec![DMatrix::zeros(m, m); deg];
        for (d, c) in pj.iter().enumerate() {
            out[d + 1] += c;
        }
        for k in (j - s..=j + s).filter(|&k| k != u) {
            let e = astar.block(j, k).unwrap();
            for (d, c) in coeffs[w.offset(k)].iter().enumerate() {
                out[d] -= mul(order, e, c);
            }
        }
        for c in out.iter_mut() {
            *c = mul(order, &inv, c);
        }
        while out.last().is_some_and(|b| b.iter().all(|z| z.norm() == 0.0)) {
            out.pop();
        }
        coeffs[w.offset(u)] = out;
        Ok(())
    };
    for k in 0..=(w.hi - s) {
        step(&mut coeffs, k, k + s)?;
    }
    for k in 1..=(-w.lo - s) {
        step(&mut coeffs, -k, -k - s)?;
    }
    Ok(PolyFamily { r, s: s as usize, m, window: w, coeffs })
}

/// All `2s` families, ordered by residue `-s, ..., s-1`.
pub fn build_all_families(a: &BandedOperator) -> Result<Vec<PolyFamily>> {
    check_commuting(a)?;
    let s = a.s() as i64;
    (-s..s).into_par_iter().map(|r| build_poly_family_ordered(a, r, ProductOrder::EntryLeft)).collect()
}

fn canonical_vector(m: usize) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    x[0] = Complex64::new(1.0, 0.0);
    x
}

fn block_times(b: &Block, x: &[Complex64]) -> Vec<Complex64> {
    (0..b.nrows()).map(|r| (0..b.ncols()).map(|c| b[(r, c)] * x[c]).sum()).collect()
}

fn adjoint_times(b: &Block, x: &[Complex64]) -> Vec<Complex64> {
    (0..b.ncols()).map(|c| (0..b.nrows()).map(|r| b[(r, c)].conj() * x[r]).sum()).collect()
}

fn pair(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

/// Indices in the outermost `10 s` positions at either window end.
fn in_tail(w: Window, s: usize, j: i64) -> bool {
    w.edge_distance(j) < 10 * s as i64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    /// `sum_j <u_j, P_j(lambda) x>`.
    pub value: Complex64,
    /// `M_d = sum_j (C_{j,d})^H u_j` for `d = 0, 1, ...`.
    pub moments: Vec<Vec<Complex64>>,
    pub truncation_warning: bool,
}

/// Moment functional with `x` the first canonical basis vector.
pub fn moment_functional(u: &LatticeState, fam: &PolyFamily, lambda: Complex64) -> Result<MomentValue> {
    moment_functional_with(u, fam, lambda, &canonical_vector(fam.m))
}

pub fn moment_functional_with(u: &LatticeState, fam: &PolyFamily, lambda: Complex64, x: &[Complex64]) -> Result<MomentValue> {
    if u.window() != fam.window || u.block_dim() != fam.m || x.len() != fam.m {
        return Err(Error::InvalidArgument("state, family and vector shapes differ".into()));
    }
    let dmax = fam.window.indices().map(|j| fam.coefficients(j).len()).max().unwrap_or(0);
    let mut moments = vec![vec![Complex64::new(0.0, 0.0); fam.m]; dmax];
    let mut value = Complex64::new(0.0, 0.0);
    let (mut total, mut tail) = (0.0, 0.0);
    for j in fam.window.indices() {
        let uj = u.block(j);
        let pj = fam.evaluate(j, lambda);
        let term = pair(uj, &block_times(&pj, x));
        value += term;
        total += term.norm();
        if in_tail(fam.window, fam.s, j) {
            tail += term.norm();
        }
        for (d, c) in fam.coefficients(j).iter().enumerate() {
            let v = adjoint_times(c, uj);
            moments[d].iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
    }
    Ok(MomentValue { value, moments, truncation_warning: total > 0.0 && tail > TAIL_RTOL * total })
}

fn check_families(a: &BandedOperator, families: &[PolyFamily]) -> Result<()> {
    let s = a.s() as i64;
    if families.len() != 2 * s as usize
        || families.iter().zip(-s..s).any(|(f, r)| f.r != r || f.window != a.window() || f.m != a.block_dim())
    {
        return Err(Error::InvalidArgument("need the 2s families of this operator ordered by residue".into()));
    }
    Ok(())
}

fn reaches(w: Window, s: usize, r: i64, deg: usize) -> bool {
    let span = (s * deg) as i64;
    r - span >= w.lo && r + span <= w.hi
}

/// `sum_r sum_d conj(A)^d i_r C_{n,d}^{(r)} v`, which equals `i_n v`.
pub fn reconstruct_coordinate(a: &BandedOperator, n: i64, families: &[PolyFamily], v: &[Complex64]) -> Result<LatticeState> {
    check_families(a, families)?;
    let w = a.window();
    if !w.contains(n) || v.len() != a.block_dim() {
        return Err(Error::InvalidArgument(format!("index {n} outside window or vector of wrong size")));
    }
    for f in families {
        let deg = f.degree(n).unwrap_or(0);
        if !reaches(w, f.s, f.r, deg) {
            return Err(Error::InvalidArgument(format!(
                "window {w:?} too small: P_{n} for residue {} has degree {deg}",
                f.r
            )));
        }
    }
    let abar = a.conjugate();
    let m = a.block_dim();
    let mut out = LatticeState::zeros(w, m, 0.0);
    for f in families {
        let cs = f.coefficients(n);
        let mut acc = LatticeState::zeros(w, m, 0.0);
        for c in cs.iter().rev() {
            acc = abar.apply(&acc)?;
            let add = block_times(c, v);
            acc.block_mut(f.r).iter_mut().zip(add).for_each(|(a, b)| *a += b);
        }
        out = out.combine(Complex64::new(1.0, 0.0), &acc, Complex64::new(1.0, 0.0))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    /// Reassembled `sum_r alpha_k^{(r)}` per window index.
    pub values: Vec<Complex64>,
    /// Direct `<u_k, x>` for comparison.
    pub direct: Vec<Complex64>,
    pub max_defect: f64,
    /// Indices whose families fit the window; only these enter the moments.
    pub admissible: (i64, i64),
    pub truncation_warning: bool,
}

/// Reassembles `<u_k, x>` from the moments `M_d^{(r)} = sum_j (C_{j,d}^{(r)})^H u_j`
/// as `sum_r sum_d <M_d^{(r)}, (conj(A)^d i_r x)_k>`.
pub fn completeness_probe(u: &LatticeState, a: &BandedOperator, x: &[Complex64]) -> Result<CompletenessReport> {
    let w = a.window();
    let m = a.block_dim();
    if u.window() != w || u.block_dim() != m || x.len() != m {
        return Err(Error::InvalidArgument("state, operator and vector shapes differ".into()));
    }
    let families = build_all_families(a)?;
    let admissible: Vec<i64> = w
        .indices()
        .filter(|&j| families.iter().all(|f| reaches(w, f.s, f.r, f.degree(j).unwrap_or(0))))
        .collect();
    let (lo, hi) = (*admissible.first().unwrap_or(&0), *admissible.last().unwrap_or(&-1));
    let total: f64 = w.indices().map(|j| u.block_norm(j)).sum();
    let outside: f64 = w.indices().filter(|j| !(lo..=hi).contains(j)).map(|j| u.block_norm(j)).sum();
    let abar = a.conjugate();
    let mut values = vec![Complex64::new(0.0, 0.0); w.len()];
    for f in &families {
        let dmax = (lo..=hi).map(|j| f.coefficients(j).len()).max().unwrap_or(0);
        let mut moments = vec![vec![Complex64::new(0.0, 0.0); m]; dmax];
        for j in lo..=hi {
            for (d, c) in f.coefficients(j).iter().enumerate() {
                let v = adjoint_times(c, u.block(j));
                moments[d].iter_mut().zip(v).for_each(|(acc, b)| *acc += b);
            }
        }
        let mut pow = LatticeState::embed(w, f.r, x, 0.0)?;
        for md in &moments {
            for k in w.indices() {
                values[w.offset(k)] += pair(md, pow.block(k));
            }
            pow = abar.apply(&pow)?;
        }
    }
    let direct: Vec<Complex64> = w.indices().map(|k| pair(u.block(k), x)).collect();
    let max_defect = (lo..=hi)
        .map(|k| (values[w.offset(k)] - direct[w.offset(k)]).norm())
        .fold(0.0, f64::max);
    Ok(CompletenessReport {
        values,
        direct,
        max_defect,
        admissible: (lo, hi),
        truncation_warning: total > 0.0 && outside > TAIL_RTOL * total,
    })
}

/// Block entries given as polynomials of one generator, `A_{j,k} = p_{j,k}(G)`,
/// which makes all entries commute.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingFamilySpec {
    pub generator: Block,
    pub entry_polynomials: BTreeMap<(i64, i64), Vec<Complex64>>,
}

/// `p(G)` for coefficients in increasing powers.
pub fn polynomial_of(g: &Block, p: &[Complex64]) -> Block {
    let n = g.nrows();
    p.iter().rev().fold(DMatrix::zeros(n, n), |acc: Block, c| &acc * g + DMatrix::identity(n, n) * *c)
}

impl CommutingFamilySpec {
    pub fn to_operator(&self, s: usize, window: Window) -> Result<BandedOperator> {
        let m = self.generator.nrows();
        BandedOperator::new(s, m, window, |j, k| match self.entry_polynomials.get(&(j, k)) {
            Some(p) => polynomial_of(&self.generator, p),
            None => DMatrix::zeros(m, m),
        })
    }
}

fn condition_number(b: &Block) -> f64 {
    let sv = b.clone().svd(false, false).singular_values;
    sv.max() / sv.min()
}

/// Random commuting family: `G = S D S^{-1}` with `cond(S) <= 10`, degree-2 entry
/// polynomials, external entries with smallest singular value at least
/// `min_external` and all entries of norm at most `max_entry`.
pub fn random_commuting_spec<R: Rng>(
    rng: &mut R,
    s: usize,
    m: usize,
    window: Window,
    min_external: f64,
    max_entry: f64,
) -> CommutingFamilySpec {
    let generator = loop {
        let sm: Block = DMatrix::from_fn(m, m, |_, _| random_complex(rng, 1.0));
        if condition_number(&sm) > 10.0 {
            continue;
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(m, |_, _| random_complex(rng, 1.0)));
        let inv = sm.clone().try_inverse().expect("well-conditioned");
        break &sm * d * inv;
    };
    let si = s as i64;
    let mut entry_polynomials = BTreeMap::new();
    for j in window.indices() {
        for k in (j - si).max(window.lo)..=(j + si).min(window.hi) {
            let external = (j - k).abs() == si;
            let p = loop {
                let p: Vec<Complex64> = if external {
                    vec![
                        crate::sampling::random_phase(rng) * rng.gen_range(1.0..=1.5),
                        random_complex(rng, 0.2),
                        random_complex(rng, 0.1),
                    ]
                } else {
                    (0..3).map(|_| random_complex(rng, 0.5)).collect()
                };
                let b = polynomial_of(&generator, &p);
                let sv = b.clone().svd(false, false).singular_values;
                if sv.max() <= max_entry && (!external || sv.min() >= min_external) {
                    break p;
                }
            };
            entry_polynomials.insert((j, k), p);
        }
    }
    CommutingFamilySpec { generator, entry_polynomials }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen_engine::{extend_eigenvector, unit_seeds};
    use crate::lattice_ops::build_laplacian_1d;
    use crate::sampling::{random_scalar_operator, trial_rng, OperatorLimits};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lap(radius: i64) -> BandedOperator {
        build_laplacian_1d(c(1.0, 0.0), Window::centered(radius)).unwrap()
    }

    fn scalar_coeffs(f: &PolyFamily, j: i64) -> Vec<f64> {
        f.coefficients(j).iter().map(|b| b[(0, 0)].re).collect()
    }

    #[test]
    fn laplacian_families_by_hand() {
        let a = lap(10);
        let p0 = build_poly_family(&a, 0).unwrap();
        assert_eq!(scalar_coeffs(&p0, 0), vec![1.0]);
        assert_eq!(scalar_coeffs(&p0, -1), Vec::<f64>::new());
        assert_eq!(scalar_coeffs(&p0, 1), vec![2.0, 1.0]);
        // (lambda + 2)^2 - 1 = lambda^2 + 4 lambda + 3
        assert_eq!(scalar_coeffs(&p0, 2), vec![3.0, 4.0, 1.0]);
        let pm = build_poly_family(&a, -1).unwrap();
        assert_eq!(scalar_coeffs(&pm, 1), vec![-1.0]);
        assert_eq!(scalar_coeffs(&pm, -1), vec![1.0]);
        assert_eq!(pm.degree(0), None);
    }

    #[test]
    fn families_are_eigenvectors() {
        let w = Window::centered(15);
        let mut rng = trial_rng(4, 0);
        for s in 1..=3usize {
            let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
            for r in -(s as i64)..s as i64 {
                let f = build_poly_family(&a, r).unwrap();
                for _ in 0..5 {
                    let lam = random_complex(&mut rng, 2.0);
                    let e = extend_eigenvector(&a, &unit_seeds(s, 1, r, &[c(1.0, 0.0)]), lam).unwrap();
                    for j in w.indices() {
                        let p = f.evaluate(j, lam)[(0, 0)];
                        assert!((p - e.at(j)).norm() <= 1e-9 * e.at(j).norm().max(1.0), "s={s} r={r} j={j}");
                    }
                }
                for j in w.indices() {
                    assert!(f.degree(j).is_none_or(|d| d <= j.unsigned_abs() as usize / s));
                }
            }
        }
    }

    #[test]
    fn laplacian_reconstruction_by_hand() {
        let a = lap(6);
        let fams = build_all_families(&a).unwrap();
        let out = reconstruct_coordinate(&a, 1, &fams, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(out, LatticeState::delta(a.window(), 1, 0.0).unwrap());
        let seed = reconstruct_coordinate(&a, -1, &fams, &[c(2.0, 0.0)]).unwrap();
        assert_eq!(seed, LatticeState::delta(a.window(), -1, 0.0).unwrap().scaled(c(2.0, 0.0)));
    }

    #[test]
    fn reconstruction_for_random_operators() {
        let w = Window::centered(20);
        let mut rng = trial_rng(5, 0);
        for s in 1..=3usize {
            for _ in 0..5 {
                let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
                let fams = build_all_families(&a).unwrap();
                for n in -15..=15 {
                    let out = reconstruct_coordinate(&a, n, &fams, &[c(1.0, 0.0)]).unwrap();
                    let want = LatticeState::delta(w, n, 0.0).unwrap();
                    let err = out.combine(c(1.0, 0.0), &want, c(-1.0, 0.0)).unwrap().norm();
                    assert!(err < 1e-6, "s={s} n={n} err={err}");
                }
            }
        }
    }

    #[test]
    fn reconstruction_needs_room() {
        let a = build_laplacian_1d(c(1.0, 0.0), Window::new(-3, 8).unwrap()).unwrap();
        let fams = build_all_families(&a).unwrap();
        assert!(reconstruct_coordinate(&a, 3, &fams, &[c(1.0, 0.0)]).is_ok());
        assert!(reconstruct_coordinate(&a, 7, &fams, &[c(1.0, 0.0)]).is_err());
        assert!(reconstruct_coordinate(&a, 1, &fams[..1], &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn commuting_block_reconstruction_and_order_swap() {
        let w = Window::centered(20);
        let mut rng = trial_rng(6, 0);
        for s in 1..=2usize {
            let spec = random_commuting_spec(&mut rng, s, 2, w, 0.5, 2.0);
            let a = spec.to_operator(s, w).unwrap();
            let fams = build_all_families(&a).unwrap();
            for r in -(s as i64)..s as i64 {
                let left = build_poly_family_ordered(&a, r, ProductOrder::EntryLeft).unwrap();
                let right = build_poly_family_ordered(&a, r, ProductOrder::EntryRight).unwrap();
                for j in -10..=10 {
                    for (x, y) in left.coefficients(j).iter().zip(right.coefficients(j)) {
                        assert!(block_norm(&(x - y)) <= 1e-12 * block_norm(x).max(1.0));
                    }
                }
            }
            let v = [c(0.3, -0.2), c(1.0, 0.5)];
            for n in -10..=10 {
                let out = reconstruct_coordinate(&a, n, &fams, &v).unwrap();
                let want = LatticeState::embed(w, n, &v, 0.0).unwrap();
                let err = out.combine(c(1.0, 0.0), &want, c(-1.0, 0.0)).unwrap().norm();
                assert!(err < 1e-6, "s={s} n={n} err={err}");
            }
        }
    }

    #[test]
    fn non_commuting_entries_rejected() {
        let w = Window::centered(5);
        let a = BandedOperator::new(1, 2, w, |j, k| {
            let mut b = DMatrix::identity(2, 2) * c(1.0, 0.0);
            if j == k {
                b[(0, 1)] = c(1.0, 0.0);
            } else {
                b[(1, 0)] = c(0.5, 0.0);
            }
            b
        })
        .unwrap();
        assert!(matches!(build_poly_family(&a, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn moment_functional_basics() {
        let a = lap(20);
        let w = a.window();
        let f0 = build_poly_family(&a, 0).unwrap();
        let zero = moment_functional(&LatticeState::zeros(w, 1, 0.0), &f0, c(1.0, 2.0)).unwrap();
        assert_eq!(zero.value, c(0.0, 0.0));
        assert!(zero.moments.iter().all(|m| m[0] == c(0.0, 0.0)));
        for lam in [c(0.0, 0.0), c(3.0, -1.0), c(-0.5, 4.0)] {
            let mv = moment_functional(&LatticeState::delta(w, 0, 0.0).unwrap(), &f0, lam).unwrap();
            assert_eq!(mv.value, c(1.0, 0.0));
            assert!(!mv.truncation_warning);
        }
        let slow = LatticeState::from_fn(w, 0.0, |_| c(1.0, 0.0));
        assert!(moment_functional(&slow, &f0, c(0.1, 0.0)).unwrap().truncation_warning);
    }

    #[test]
    fn moments_recombine_into_value() {
        let a = lap(30);
        let u = crate::evolution::model_solution_heat(c(1.0, 0.0), 0.5, 0.0, a.window()).unwrap();
        let f = build_poly_family(&a, -1).unwrap();
        let lam = c(0.4, -0.9);
        let mv = moment_functional(&u, &f, lam).unwrap();
        let from_moments: Complex64 = mv.moments.iter().enumerate().map(|(d, md)| md[0].conj() * lam.powu(d as u32)).sum();
        assert!((from_moments.conj() - mv.value).norm() < 1e-12);
    }

    #[test]
    fn completeness_probe_recovers_coordinates() {
        let a = lap(40);
        let w = a.window();
        let rep = completeness_probe(&LatticeState::delta(w, 0, 0.0).unwrap(), &a, &[c(1.0, 0.0)]).unwrap();
        assert!(rep.max_defect < 1e-12);
        assert!((rep.values[w.offset(0)] - c(1.0, 0.0)).norm() < 1e-12);
        let zero = completeness_probe(&LatticeState::zeros(w, 1, 0.0), &a, &[c(1.0, 0.0)]).unwrap();
        assert!(zero.values.iter().all(|v| *v == c(0.0, 0.0)));
        let u = crate::evolution::model_solution_heat(c(1.0, 0.0), 0.5, 0.0, w).unwrap();
        let rep = completeness_probe(&u, &a, &[c(1.0, 0.0)]).unwrap();
        assert!((rep.values[w.offset(3)] - u.at(3)).norm() < 1e-7);
        assert!(rep.max_defect < 1e-7);
        assert!(!rep.truncation_warning);
    }

    #[test]
    fn family_json_round_trip() {
        let mut rng = trial_rng(8, 0);
        let a = random_scalar_operator(&mut rng, 2, Window::centered(8), &OperatorLimits::default());
        let f = build_poly_family(&a, 1).unwrap();
        let text = f.to_json();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["r"], 1);
        assert!(doc["coeffs"][0]["j"].is_i64() && doc["coeffs"][0]["m"].is_u64());
        assert_eq!(PolyFamily::from_json(&text).unwrap(), f);
    }

    #[test]
    fn conjugate_power_norms_grow_geometrically() {
        let w = Window::centered(30);
        let mut rng = trial_rng(10, 0);
        let a = random_scalar_operator(&mut rng, 1, w, &OperatorLimits::default());
        let k = a.audit_constants().unwrap();
        let fams = build_all_families(&a).unwrap();
        let abar_norm = a.conjugate().to_dense().map(|z| z.norm()).row_sum().max();
        let cap = k.a / k.delta + abar_norm + 2.0;
        for f in &fams {
            for n in -12i64..=12 {
                if n == 0 || f.degree(n).is_none() {
                    continue;
                }
                // operator norm of P_n(conj A) bounded via its coefficients
                let mut norm = 0.0;
                for (d, cf) in f.coefficients(n).iter().enumerate() {
                    norm += cf[(0, 0)].norm() * abar_norm.powi(d as i32);
                }
                assert!(norm.ln() <= n.unsigned_abs() as f64 * cap.ln() + 1e-9, "n={n}");
            }
        }
    }
}
