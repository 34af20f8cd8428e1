//! K3 crystals: an F-crystal with a symmetric pairing satisfying ⟨φx, φy⟩ = p²σ⟨x, y⟩.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fcrystal::{FCrystal, TateModuleReport};
use crate::galois::GaloisRing;
use crate::matrix::{p_power, Matrix};
use crate::quadform::ZpLattice;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct K3Crystal {
    crystal: FCrystal,
    gram: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub name: &'static str,
    pub passed: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.axiom).collect()
    }
}

/// The Tate module with its pairing, as a Z_p-lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct TateLattice {
    pub report: TateModuleReport,
    pub lattice: ZpLattice,
}

impl K3Crystal {
    pub fn new(crystal: FCrystal, gram: Matrix) -> Result<Self> {
        let r = crystal.rank();
        if gram.rows() != r || gram.cols() != r {
            return Err(Error::InvalidArgument(format!("gram must be {r}×{r}")));
        }
        if gram.transpose() != gram {
            return Err(Error::InvalidArgument("gram matrix is not symmetric".into()));
        }
        Ok(K3Crystal { crystal, gram })
    }

    pub fn crystal(&self) -> &FCrystal {
        &self.crystal
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn ring(&self) -> &GaloisRing {
        self.crystal.ring()
    }

    pub fn rank(&self) -> usize {
        self.crystal.rank()
    }

    pub fn check_axioms(&self) -> Result<AxiomReport> {
        let ring = self.ring();
        if ring.precision() < 3 {
            return Err(Error::InsufficientPrecision("K3 axioms need precision ≥ 3".into()));
        }
        let hodge = self.crystal.hodge_numbers()?;
        let top = hodge.len() - 1;
        let a1 = AxiomCheck {
            axiom: 1,
            name: "p²H ⊆ im φ",
            passed: top <= 2,
            witness: format!("largest elementary divisor p^{top}; Hodge numbers {hodge:?}"),
        };
        let h0 = hodge[0];
        let a2 = AxiomCheck {
            axiom: 2,
            name: "rank(φ ⊗ k) = 1",
            passed: h0 == 1,
            witness: format!("{h0} unit elementary divisors"),
        };
        let det_val = ring.valuation(&self.gram.det(ring));
        let a3 = AxiomCheck {
            axiom: 3,
            name: "perfect pairing",
            passed: det_val == Some(0),
            witness: match det_val {
                Some(v) => format!("ord_p det(gram) = {v}"),
                None => format!("det(gram) ≡ 0 mod p^{}", ring.precision()),
            },
        };
        let a = self.crystal.matrix();
        let lhs = a.transpose().mul(ring, &self.gram).mul(ring, a);
        let rhs = self.gram.sigma(ring).mul_p_pow(ring, 2);
        let diff = lhs.sub(ring, &rhs);
        let bad = (0..self.rank()).flat_map(|i| (0..self.rank()).map(move |j| (i, j))).find(|&(i, j)| !ring.is_zero(diff.get(i, j)));
        let a4 = AxiomCheck {
            axiom: 4,
            name: "⟨φx, φy⟩ = p²σ⟨x, y⟩",
            passed: bad.is_none(),
            witness: match bad {
                Some((i, j)) => format!("Aᵀ·G·A − p²σ(G) nonzero at ({i}, {j})"),
                None => "Aᵀ·G·A = p²σ(G)".into(),
            },
        };
        Ok(AxiomReport { checks: vec![a1, a2, a3, a4] })
    }

    /// Newton polygon is the single slope 1.
    pub fn is_supersingular(&self) -> Result<bool> {
        let s = self.crystal.newton_slopes()?;
        Ok(s.slopes().len() == 1 && s.slopes()[0].0 == num_rational::BigRational::from_integer(1.into()))
    }

    /// T_H with the restricted pairing. The pairing values lie in Z_p.
    pub fn tate_lattice(&self) -> Result<TateLattice> {
        let ring = self.ring();
        let mut report = self.crystal.tate_module()?;
        let prec = report.reliable_precision;
        if prec < 3 {
            return Err(Error::InsufficientPrecision(format!("Tate basis only reliable to precision {prec}")));
        }
        let modulus = BigInt::from(ring.p()).pow(prec);
        let gv: Vec<Vec<_>> = report.basis.iter().map(|t| self.gram.mul_vec(ring, t)).collect();
        let mut g = vec![vec![BigInt::zero(); report.rank]; report.rank];
        for i in 0..report.rank {
            for j in 0..report.rank {
                let mut acc = ring.zero();
                for (x, y) in report.basis[i].iter().zip(&gv[j]) {
                    acc = ring.add(&acc, &ring.mul(x, y));
                }
                if acc[1..].iter().any(|c| !(c % &modulus).is_zero()) {
                    return Err(Error::SelfValidation("Tate pairing is not Z_p-valued".into()));
                }
                g[i][j] = &acc[0] % &modulus;
            }
        }
        report.gram = Some(g.clone());
        let lattice = ZpLattice::new(ring.p(), prec, g)?;
        Ok(TateLattice { report, lattice })
    }

    /// σ0 with ord_p disc(T_H) = 2σ0.
    pub fn artin_invariant(&self) -> Result<u32> {
        if !self.is_supersingular()? {
            return Err(Error::InvalidArgument("Artin invariant needs a supersingular crystal".into()));
        }
        let t = self.tate_lattice()?;
        if t.report.rank != self.rank() {
            return Err(Error::InsufficientPrecision(format!(
                "Tate module has rank {} < {}",
                t.report.rank,
                self.rank()
            )));
        }
        let v = t
            .lattice
            .disc_valuation()
            .ok_or_else(|| Error::InsufficientPrecision("Tate discriminant vanishes at this precision".into()))?;
        if v % 2 == 1 {
            return Err(Error::InvalidArgument(format!("ord_p disc(T_H) = {v} is odd")));
        }
        Ok(v / 2)
    }

    /// The same crystal in the basis given by the columns of an invertible U.
    pub fn transport(&self, u: &Matrix) -> Result<K3Crystal> {
        let ring = self.ring();
        let crystal = self.crystal.change_basis(u)?;
        let gram = u.transpose().mul(ring, &self.gram).mul(ring, u);
        K3Crystal::new(crystal, gram)
    }

    /// p·I with the identity pairing: a slope-1 crystal that is not a K3 crystal.
    pub fn scalar_p(ring: &GaloisRing, rank: usize) -> Result<K3Crystal> {
        let c = FCrystal::new(ring, Matrix::scalar(ring, rank, &p_power(ring, 1)))?;
        K3Crystal::new(c, Matrix::identity(ring, rank))
    }
}
