//! Dense von Neumann propagation `ρ(t) = U ρ U†` with `U = exp(-iHt)` from
//! an eigendecomposition of the truncated Hamiltonian matrix.

use crate::oracle::rotation::exp_hermitian;
use crate::pauli::HamiltonianSpec;
use crate::qstate::{BasisDescriptor, DensityMatrix};
use crate::specfun::HalfInt;
use crate::{c, CMatrix, Error, Result};

/// Leak threshold used when callers do not supply one.
pub const DEFAULT_LEAK_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PropagatorResult {
    pub rho_t: DensityMatrix,
    /// `max |U†U - I|`.
    pub unitarity_defect: f64,
    /// Population within two levels of any Fock cutoff.
    pub truncation_leak: f64,
}

fn lowering(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, levels, |r, col| {
        if col == r + 1 {
            c((col as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn number(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, levels, |r, col| if r == col { c(r as f64, 0.0) } else { c(0.0, 0.0) })
}

/// `p²/2` with exact matrix elements inside the truncation.
fn kinetic(levels: usize) -> CMatrix {
    CMatrix::from_fn(levels, levels, |r, col| {
        let (lo, hi) = (r.min(col), r.max(col));
        if r == col {
            c(0.25 * (2 * r + 1) as f64, 0.0)
        } else if hi == lo + 2 {
            c(-0.25 * (((lo + 1) * (lo + 2)) as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn kron_all(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, op| acc.kronecker(op))
}

/// Modes and optional spin of a basis: Fock factors first, spin-½ last.
fn layout(basis: &BasisDescriptor) -> Result<(Vec<usize>, bool)> {
    let factors = basis.factors();
    let mut modes = Vec::new();
    let mut spin = false;
    for (k, f) in factors.iter().enumerate() {
        match f {
            BasisDescriptor::Fock { levels } if !spin => modes.push(*levels),
            BasisDescriptor::Spin { j } if *j == HalfInt::HALF && k + 1 == factors.len() => spin = true,
            other => return Err(Error::Basis(format!("expected Fock factors then an optional spin-1/2, found {other:?}"))),
        }
    }
    Ok((modes, spin))
}

/// Matrix of `h` on `basis` (Fock modes, then an optional trailing spin-½).
pub fn hamiltonian_matrix(h: &HamiltonianSpec, basis: &BasisDescriptor) -> Result<CMatrix> {
    h.validate()?;
    basis.validate()?;
    let (modes, spin) = layout(basis)?;
    let needs_spin = !matches!(h, HamiltonianSpec::Free);
    if modes.len() != h.spatial_modes() && !matches!(h, HamiltonianSpec::SpinDiag { .. }) {
        return Err(Error::Basis(format!("{} needs {} Fock modes, basis has {}", h.name(), h.spatial_modes(), modes.len())));
    }
    if needs_spin && !spin {
        return Err(Error::Basis(format!("{} needs a spin-1/2 factor", h.name())));
    }
    let mut idents: Vec<CMatrix> = modes.iter().map(|&n| CMatrix::identity(n, n)).collect();
    if spin {
        idents.push(CMatrix::identity(2, 2));
    }
    let spin_slot = modes.len();
    let embed = |slot: usize, op: CMatrix| {
        let mut ops = idents.clone();
        ops[slot] = op;
        kron_all(&ops)
    };
    let spin_diag = |a: f64, b: f64| {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(a, 0.0), c(b, 0.0)]))
    };
    let dim = basis.dim();
    let mut ham = CMatrix::zeros(dim, dim);
    match *h {
        HamiltonianSpec::Free => ham += embed(0, kinetic(modes[0])),
        HamiltonianSpec::SpinDiag { a, c } => ham += embed(spin_slot, spin_diag(a, c)),
        HamiltonianSpec::Trapped => {
            let n = modes[0];
            ham += embed(0, number(n) + CMatrix::identity(n, n) * c(0.5, 0.0));
            ham += embed(spin_slot, spin_diag(1.0, -1.0));
        }
        HamiltonianSpec::Landau => {
            for slot in 0..2 {
                let n = modes[slot];
                ham += embed(slot, number(n) + CMatrix::identity(n, n) * c(0.5, 0.0));
            }
            // i(a1† a2 - a1 a2†)
            let (a1, a2) = (lowering(modes[0]), lowering(modes[1]));
            let mut ops = idents.clone();
            ops[0] = a1.adjoint();
            ops[1] = a2.clone();
            let hop = kron_all(&ops);
            ham += (&hop - hop.adjoint()) * c(0.0, 1.0);
            ham += embed(spin_slot, spin_diag(1.0, -1.0));
        }
    }
    Ok(ham)
}

/// Population of basis states with some mode within two levels of its cutoff.
pub fn truncation_leak(rho: &CMatrix, basis: &BasisDescriptor) -> Result<f64> {
    let (modes, spin) = layout(basis)?;
    let mut dims = modes.clone();
    if spin {
        dims.push(2);
    }
    let mut leak = 0.0;
    for k in 0..rho.nrows() {
        let mut rest = k;
        let mut edge = false;
        for (slot, &d) in dims.iter().enumerate().rev() {
            let level = rest % d;
            rest /= d;
            if slot < modes.len() && level + 2 >= d && d > 2 {
                edge = true;
            }
        }
        if edge {
            leak += rho[(k, k)].re;
        }
    }
    Ok(leak)
}

/// Exact propagation of `rho` under `h` for time `t`.
pub fn vonneumann_evolve(rho: &DensityMatrix, h: &HamiltonianSpec, t: f64, leak_threshold: f64) -> Result<PropagatorResult> {
    let ham = hamiltonian_matrix(h, rho.basis())?;
    let u = exp_hermitian(&ham, t);
    let n = u.nrows();
    let unitarity_defect = crate::max_abs(&(u.adjoint() * &u - CMatrix::identity(n, n)));
    let rho_t = &u * rho.matrix() * u.adjoint();
    let leak = truncation_leak(&rho_t, rho.basis())?.max(truncation_leak(rho.matrix(), rho.basis())?);
    if leak > leak_threshold {
        return Err(Error::TruncationLeak { leak, threshold: leak_threshold });
    }
    Ok(PropagatorResult {
        rho_t: DensityMatrix::new_unchecked(rho.basis().clone(), rho_t)?,
        unitarity_defect,
        truncation_leak: leak,
    })
}

/// Classical RK4 integration of `dρ/dt = -i[H, ρ]`, used to cross-check the
/// eigendecomposition path.
pub fn rk4_vonneumann(rho: &CMatrix, ham: &CMatrix, t: f64, steps: usize) -> CMatrix {
    let steps = steps.max(1);
    let dt = t / steps as f64;
    let f = |r: &CMatrix| (ham * r - r * ham) * c(0.0, -1.0);
    let mut r = rho.clone();
    for _ in 0..steps {
        let k1 = f(&r);
        let k2 = f(&(&r + &k1 * c(0.5 * dt, 0.0)));
        let k3 = f(&(&r + &k2 * c(0.5 * dt, 0.0)));
        let k4 = f(&(&r + &k3 * c(dt, 0.0)));
        r += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
    }
    r
}

/// Five-point centered derivative of a scalar function.
pub fn five_point(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

/// Worst absolute residual between two equally long samples.
pub fn residual_check(lhs: &[f64], rhs: &[f64]) -> Result<f64> {
    if lhs.len() != rhs.len() {
        return Err(Error::Lattice(format!("{} vs {} residual samples", lhs.len(), rhs.len())));
    }
    Ok(lhs.iter().zip(rhs).fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{density_from_pure, landau_fock_state, PureState};

    fn trapped_basis(n: usize) -> BasisDescriptor {
        BasisDescriptor::product(vec![BasisDescriptor::fock(n), BasisDescriptor::spin_half()])
    }

    #[test]
    fn trapped_spectrum() {
        let ham = hamiltonian_matrix(&HamiltonianSpec::Trapped, &trapped_basis(4)).unwrap();
        let diag: Vec<f64> = (0..8).map(|k| ham[(k, k)].re).collect();
        assert_eq!(diag, vec![1.5, -0.5, 2.5, 0.5, 3.5, 1.5, 4.5, 2.5]);
    }

    #[test]
    fn landau_levels_are_eigenstates() {
        let basis = BasisDescriptor::product(vec![BasisDescriptor::fock(6), BasisDescriptor::fock(6), BasisDescriptor::spin_half()]);
        let ham = hamiltonian_matrix(&HamiltonianSpec::Landau, &basis).unwrap();
        for (n, np) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)] {
            let orb = landau_fock_state(n, np, 6).unwrap();
            let up = PureState::basis_state(BasisDescriptor::spin_half(), 0).unwrap();
            let psi = orb.tensor(&up).unwrap();
            let v = psi.amplitudes();
            let hv = &ham * v;
            let e = (v.adjoint() * &hv)[(0, 0)];
            assert!((hv - v * e).norm() < 1e-12);
            assert!((e.re - (2 * n + 2) as f64).abs() < 1e-12, "E({n},{np}) = {e}");
        }
    }

    #[test]
    fn eigen_and_rk4_agree() {
        let basis = trapped_basis(6);
        let psi = PureState::normalized(basis.clone(), nalgebra::DVector::from_fn(12, |k, _| c(1.0 / (k + 1) as f64, 0.1 * k as f64))).unwrap();
        let rho = density_from_pure(&psi);
        let ham = hamiltonian_matrix(&HamiltonianSpec::Trapped, &basis).unwrap();
        let exact = vonneumann_evolve(&rho, &HamiltonianSpec::Trapped, 0.7, 1.0).unwrap();
        assert!(exact.unitarity_defect < 1e-12);
        let rk = rk4_vonneumann(rho.matrix(), &ham, 0.7, 400);
        assert!(crate::max_abs(&(rk - exact.rho_t.matrix())) < 1e-9);
    }

    #[test]
    fn leak_is_reported() {
        let basis = BasisDescriptor::fock(4);
        let rho = density_from_pure(&PureState::basis_state(basis, 3).unwrap());
        assert!(matches!(
            vonneumann_evolve(&rho, &HamiltonianSpec::Free, 0.1, 1e-8),
            Err(Error::TruncationLeak { .. })
        ));
    }

    #[test]
    fn spin_without_spin_factor_is_rejected() {
        assert!(hamiltonian_matrix(&HamiltonianSpec::Trapped, &BasisDescriptor::fock(3)).is_err());
    }

    #[test]
    fn five_point_is_fourth_order() {
        let d = five_point(f64::sin, 0.3, 1e-2);
        assert!((d - 0.3f64.cos()).abs() < 1e-9);
    }
}
