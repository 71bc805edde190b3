//! Truncated emitter ⊗ cavity Hilbert space.
//!
//! Basis states are ordered atom-major: atomic level `k` with `n` photons sits
//! at index `k * n_fock + n`, so each atomic level owns a contiguous block of
//! Fock states. Levels are ordered by energy, `g = 0, s = 1, e = 2, f = 3`; the
//! two-level emitter uses `g = 0, e = 1`.

use std::fmt;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Atomic level label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    G,
    S,
    E,
    F,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::G, Level::S, Level::E, Level::F];

    pub fn label(self) -> char {
        match self {
            Level::G => 'g',
            Level::S => 's',
            Level::E => 'e',
            Level::F => 'f',
        }
    }

    pub fn parse(label: &str) -> Option<Level> {
        match label {
            "g" => Some(Level::G),
            "s" => Some(Level::S),
            "e" => Some(Level::E),
            "f" => Some(Level::F),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Dimensions of the composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    n_atom: usize,
    n_fock: usize,
}

impl HilbertSpace {
    pub fn new(n_atom: usize, n_fock: usize) -> Result<Self> {
        if n_atom != 2 && n_atom != 4 {
            return Err(Error::InvalidSpace(format!(
                "emitter must have 2 or 4 levels, got {n_atom}"
            )));
        }
        if n_fock < 2 {
            return Err(Error::InvalidSpace(format!(
                "Fock dimension must be at least 2, got {n_fock}"
            )));
        }
        Ok(Self { n_atom, n_fock })
    }

    pub fn four_level(n_fock: usize) -> Result<Self> {
        Self::new(4, n_fock)
    }

    pub fn two_level(n_fock: usize) -> Result<Self> {
        Self::new(2, n_fock)
    }

    pub fn n_atom(&self) -> usize {
        self.n_atom
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn dim(&self) -> usize {
        self.n_atom * self.n_fock
    }

    /// Position of a level within this emitter, if the emitter has it.
    pub fn level_index(&self, level: Level) -> Result<usize> {
        let index = match (self.n_atom, level) {
            (4, Level::G) => 0,
            (4, Level::S) => 1,
            (4, Level::E) => 2,
            (4, Level::F) => 3,
            (2, Level::G) => 0,
            (2, Level::E) => 1,
            _ => {
                return Err(Error::UnknownLevel {
                    label: level.to_string(),
                    n_atom: self.n_atom,
                })
            }
        };
        Ok(index)
    }

    pub fn levels(&self) -> Vec<Level> {
        Level::ALL
            .into_iter()
            .filter(|&l| self.level_index(l).is_ok())
            .collect()
    }

    /// Composite index of `|level, n⟩`.
    pub fn index(&self, level: Level, n: usize) -> Result<usize> {
        if n >= self.n_fock {
            return Err(Error::InvalidSpace(format!(
                "photon number {n} exceeds truncation {}",
                self.n_fock - 1
            )));
        }
        Ok(self.level_index(level)? * self.n_fock + n)
    }

    fn check(&self, other: &HilbertSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-level ⊗ Fock({})", self.n_atom, self.n_fock)
    }
}

/// Dense operator on a [`HilbertSpace`].
#[derive(Clone, Debug)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Mat<C64>,
}

impl Operator {
    pub fn from_matrix(space: HilbertSpace, matrix: Mat<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidSpace(format!(
                "matrix is {}x{}, space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: Mat::zeros(d, d),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: Mat::identity(d, d),
        }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint().to_owned(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let d = self.space.dim();
        Self {
            space: self.space,
            matrix: Mat::from_fn(d, d, |i, j| c * self.matrix[(i, j)]),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.space.check(&other.space)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn product(&self, other: &Operator) -> Result<Self> {
        self.space.check(&other.space)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.space.check(&other.space)?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Matrix-vector product on a state vector.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let d = self.space.dim();
        assert_eq!(psi.len(), d, "state vector length");
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * psi[j]).sum())
            .collect()
    }
}

/// `Σ cᵢ Opᵢ` over operators sharing one space.
pub fn compose(terms: &[(C64, &Operator)]) -> Result<Operator> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::InvalidSpace("cannot compose an empty sum".into()));
    };
    let space = first.space;
    let d = space.dim();
    let mut matrix = Mat::<C64>::zeros(d, d);
    for (c, op) in terms {
        space.check(&op.space)?;
        for j in 0..d {
            for i in 0..d {
                matrix[(i, j)] += *c * op.matrix[(i, j)];
            }
        }
    }
    Ok(Operator { space, matrix })
}

/// Cavity annihilation operator `1_atom ⊗ a`.
pub fn annihilation(space: HilbertSpace) -> Operator {
    let nf = space.n_fock();
    let mut op = Operator::zeros(space);
    for k in 0..space.n_atom() {
        for n in 1..nf {
            op.matrix[(k * nf + n - 1, k * nf + n)] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    op
}

pub fn creation(space: HilbertSpace) -> Operator {
    annihilation(space).adjoint()
}

/// Photon number `a†a`.
pub fn number(space: HilbertSpace) -> Operator {
    let nf = space.n_fock();
    let mut op = Operator::zeros(space);
    for i in 0..space.dim() {
        op.matrix[(i, i)] = C64::new((i % nf) as f64, 0.0);
    }
    op
}

/// `σ_ij = |j⟩⟨i| ⊗ 1_fock`: takes level `i` to level `j`.
pub fn atomic_transition(space: HilbertSpace, i: Level, j: Level) -> Result<Operator> {
    let from = space.level_index(i)?;
    let to = space.level_index(j)?;
    let nf = space.n_fock();
    let mut op = Operator::zeros(space);
    for n in 0..nf {
        op.matrix[(to * nf + n, from * nf + n)] = ONE;
    }
    Ok(op)
}

/// `|k⟩⟨k| ⊗ 1_fock`.
pub fn projector(space: HilbertSpace, level: Level) -> Result<Operator> {
    atomic_transition(space, level, level)
}

/// Trace-one, Hermitian, positive semidefinite state.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: Mat<C64>,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const HERMITIAN_TOL: f64 = 1e-9;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Validates every density-matrix invariant.
    pub fn new(space: HilbertSpace, matrix: Mat<C64>) -> Result<Self> {
        let rho = Self::new_unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only checks dimensions. Used for intermediate states of solvers.
    pub(crate) fn new_unchecked(space: HilbertSpace, matrix: Mat<C64>) -> Result<Self> {
        let op = Operator::from_matrix(space, matrix)?;
        Ok(Self {
            space,
            matrix: op.matrix,
        })
    }

    /// Pure basis state `|level, n⟩⟨level, n|`.
    pub fn basis(space: HilbertSpace, level: Level, n: usize) -> Result<Self> {
        let index = space.index(level, n)?;
        let d = space.dim();
        let mut matrix = Mat::zeros(d, d);
        matrix[(index, index)] = ONE;
        Ok(Self { space, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(space: HilbertSpace, psi: &[C64]) -> Result<Self> {
        let d = space.dim();
        if psi.len() != d {
            return Err(Error::InvalidState(format!(
                "state vector has length {}, expected {d}",
                psi.len()
            )));
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let matrix = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm);
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        (0..self.space.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let d = self.space.dim();
        let sym = Mat::from_fn(d, d, |i, j| {
            (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5
        });
        sym.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::NoConvergence(format!("{e:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        let trace = self.trace();
        if (trace - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}")));
        }
        let herm = self.hermiticity_error();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "deviates from Hermitian by {herm:e}"
            )));
        }
        let lowest = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if lowest < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(())
    }

    /// Diagonal entries `⟨k,n|ρ|k,n⟩`, indexed like the basis.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.space.dim())
            .map(|i| self.matrix[(i, i)].re)
            .collect()
    }

    /// Photon-number distribution with the emitter traced out.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let nf = self.space.n_fock();
        let mut p = vec![0.0; nf];
        for (i, pop) in self.populations().into_iter().enumerate() {
            p[i % nf] += pop;
        }
        p
    }
}

/// `tr(op·ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    op.space.check(&rho.space)?;
    let d = op.space.dim();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += op.matrix[(i, k)] * rho.matrix[(k, i)];
        }
    }
    Ok(acc)
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.space.check(&sigma.space)?;
    let d = rho.space.dim();
    let diff = Mat::from_fn(d, d, |i, j| {
        let a = rho.matrix[(i, j)] - sigma.matrix[(i, j)];
        let b = (rho.matrix[(j, i)] - sigma.matrix[(j, i)]).conj();
        (a + b) * 0.5
    });
    let eig = diff
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    Ok(0.5 * eig.iter().map(|x| x.abs()).sum::<f64>())
}

pub(crate) fn max_abs(m: &Mat<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n_atom: usize, n_fock: usize) -> HilbertSpace {
        HilbertSpace::new(n_atom, n_fock).unwrap()
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(HilbertSpace::new(3, 5).is_err());
        assert!(HilbertSpace::new(4, 1).is_err());
        assert_eq!(space(4, 7).dim(), 28);
    }

    #[test]
    fn annihilation_entries_in_each_atomic_block() {
        let s = space(2, 2);
        let a = annihilation(s);
        let expected = [(0, 1), (2, 3)];
        for i in 0..4 {
            for j in 0..4 {
                let want = if expected.contains(&(i, j)) { 1.0 } else { 0.0 };
                assert_eq!(a.get(i, j), C64::new(want, 0.0), "({i},{j})");
            }
        }
    }

    #[test]
    fn lowering_acts_on_basis_vectors() {
        let s = space(4, 5);
        let a = annihilation(s);
        for level in Level::ALL {
            for n in 0..5 {
                let mut psi = vec![ZERO; s.dim()];
                psi[s.index(level, n).unwrap()] = ONE;
                let out = a.apply(&psi);
                for (idx, amp) in out.iter().enumerate() {
                    let want = if n > 0 && idx == s.index(level, n - 1).unwrap() {
                        (n as f64).sqrt()
                    } else {
                        0.0
                    };
                    assert!((amp - C64::new(want, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn number_operator_counts_photons() {
        let s = space(4, 6);
        let n_op = annihilation(s).adjoint().product(&annihilation(s)).unwrap();
        for level in Level::ALL {
            for n in 0..6 {
                let mut psi = vec![ZERO; s.dim()];
                let idx = s.index(level, n).unwrap();
                psi[idx] = ONE;
                let out = n_op.apply(&psi);
                assert!((out[idx] - C64::new(n as f64, 0.0)).norm() < 1e-14);
            }
        }
        let direct = number(s);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert!((direct.get(i, j) - n_op.get(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn truncated_canonical_commutator() {
        // Computed by hand: a a† − a† a is diag(1, …, 1, −(N−1)) in each block.
        let nf = 5;
        let s = space(2, nf);
        let a = annihilation(s);
        let c = a.commutator(&a.adjoint()).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let want = if i != j {
                    0.0
                } else if i % nf == nf - 1 {
                    -((nf - 1) as f64)
                } else {
                    1.0
                };
                assert!((c.get(i, j) - C64::new(want, 0.0)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn commutator_with_number_returns_lowering() {
        let s = space(4, 6);
        let a = annihilation(s);
        let c = a.commutator(&number(s)).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert!((c.get(i, j) - a.get(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn transition_operators() {
        let s = space(4, 1 + 1);
        let sigma_eg = atomic_transition(s, Level::E, Level::G).unwrap();
        let proj_e = sigma_eg.adjoint().product(&sigma_eg).unwrap();
        let want = projector(s, Level::E).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert_eq!(proj_e.get(i, j), want.get(i, j));
            }
        }
        // σ_eg annihilates anything without |e⟩ population.
        let mut psi = vec![ZERO; s.dim()];
        psi[s.index(Level::G, 1).unwrap()] = ONE;
        psi[s.index(Level::S, 0).unwrap()] = C64::new(0.0, 1.0);
        psi[s.index(Level::F, 1).unwrap()] = C64::new(0.5, 0.5);
        assert!(sigma_eg.apply(&psi).iter().all(|c| c.norm() == 0.0));

        for i in Level::ALL {
            for j in Level::ALL {
                let ij = atomic_transition(s, i, j).unwrap();
                let ji = atomic_transition(s, j, i).unwrap().adjoint();
                for r in 0..s.dim() {
                    for c in 0..s.dim() {
                        assert_eq!(ij.get(r, c), ji.get(r, c));
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_es_maps_e_to_s() {
        // With one Fock state per level the composite index is the level index.
        let s = HilbertSpace {
            n_atom: 4,
            n_fock: 1,
        };
        let sigma_es = atomic_transition(s, Level::E, Level::S).unwrap();
        assert_eq!(sigma_es.get(1, 2), ONE);
        let nonzero = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| sigma_es.get(i, j) != ZERO)
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn two_level_space_has_no_s_or_f() {
        let s = space(2, 3);
        assert!(matches!(
            atomic_transition(s, Level::S, Level::G),
            Err(Error::UnknownLevel { .. })
        ));
        assert!(atomic_transition(s, Level::E, Level::G).is_ok());
        assert_eq!(s.levels(), vec![Level::G, Level::E]);
    }

    #[test]
    fn expectation_values() {
        let s = space(4, 4);
        let n_op = number(s);
        let vac = DensityMatrix::basis(s, Level::G, 0).unwrap();
        let two = DensityMatrix::basis(s, Level::G, 2).unwrap();
        assert_eq!(expectation(&n_op, &vac).unwrap(), ZERO);
        assert_eq!(expectation(&n_op, &two).unwrap(), C64::new(2.0, 0.0));
        let id = Operator::identity(s);
        let psi: Vec<C64> = (0..s.dim())
            .map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05))
            .collect();
        let rho = DensityMatrix::pure(s, &psi).unwrap();
        rho.validate().unwrap();
        assert!((expectation(&id, &rho).unwrap() - ONE).norm() < 1e-12);
        let other = DensityMatrix::basis(space(2, 4), Level::G, 0).unwrap();
        assert!(matches!(
            expectation(&n_op, &other),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn compose_and_adjoint() {
        let s = space(4, 3);
        let a = annihilation(s);
        let zero = compose(&[(ONE, &a), (-ONE, &a)]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let x = compose(&[(C64::new(0.3, -2.0), &a), (C64::new(0.0, 1.0), &number(s))]).unwrap();
        let back = x.adjoint().adjoint();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert_eq!(back.get(i, j), x.get(i, j));
            }
        }
        let b = annihilation(space(2, 3));
        assert!(a.add(&b).is_err());
        assert!(a.product(&b).is_err());
        assert!(compose(&[(ONE, &a), (ONE, &b)]).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let s = space(2, 2);
        let mut m = Mat::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::new(0.5, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_err());
        m[(1, 1)] = C64::new(0.5, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_ok());
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_err());
        m[(1, 0)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_ok());
        m[(0, 1)] = C64::new(0.9, 0.0);
        m[(1, 0)] = C64::new(0.9, 0.0);
        assert!(DensityMatrix::new(s, m).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let s = space(4, 3);
        let a = DensityMatrix::basis(s, Level::G, 0).unwrap();
        let b = DensityMatrix::basis(s, Level::E, 1).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&a, &a).unwrap() < 1e-15);
    }
}
