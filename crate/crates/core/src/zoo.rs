//! Factories and seeded samplers for benchmark states.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng::{ginibre, stream_rng};
use crate::state::DensityMatrix;

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Range(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn phi_vector(d: usize) -> Vec<Complex64> {
    let amp = 1.0 / (d as f64).sqrt();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = Complex64::new(amp, 0.0);
    }
    psi
}

/// |Phi_d> = sum_i |ii> / sqrt(d).
pub fn bell_state(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Range(format!("bell state needs d >= 2, got {d}")));
    }
    DensityMatrix::new(ComplexMatrix::outer(&phi_vector(d)), d, d)
}

/// p |psi-><psi-| + (1 - p) I/4; entangled iff p > 1/3.
pub fn werner2(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let singlet = ComplexMatrix::outer(&[z, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), z]);
    let noise = ComplexMatrix::identity(4).scale(0.25);
    DensityMatrix::new(&singlet.scale(p) + &noise.scale(1.0 - p), 2, 2)
}

/// F |Phi_d><Phi_d| + (1 - F)(I - |Phi_d><Phi_d|)/(d^2 - 1); PPT iff F <= 1/d.
pub fn isotropic(d: usize, fidelity: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Range(format!("isotropic state needs d >= 2, got {d}")));
    }
    check_unit_interval("F", fidelity)?;
    let phi = ComplexMatrix::outer(&phi_vector(d));
    let rest = &ComplexMatrix::identity(d * d) - &phi;
    let m = &phi.scale(fidelity) + &rest.scale((1.0 - fidelity) / (d * d - 1) as f64);
    DensityMatrix::new(m, d, d)
}

/// (I - sum_i |psi_i><psi_i|)/4 for the five "tiles" product vectors on 3x3:
/// a PPT entangled state of rank 4.
pub fn tiles_upb() -> Result<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3.0f64.sqrt();
    let ket = |amps: [f64; 3]| amps.map(|a| Complex64::new(a, 0.0));
    let pairs = [
        (ket([1.0, 0.0, 0.0]), ket([h, -h, 0.0])),
        (ket([0.0, 0.0, 1.0]), ket([0.0, h, -h])),
        (ket([h, -h, 0.0]), ket([0.0, 0.0, 1.0])),
        (ket([0.0, h, -h]), ket([1.0, 0.0, 0.0])),
        (ket([t, t, t]), ket([t, t, t])),
    ];
    let mut m = ComplexMatrix::identity(9);
    for (a, b) in pairs {
        let psi: Vec<Complex64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        m = &m - &ComplexMatrix::outer(&psi);
    }
    DensityMatrix::new(m.scale(0.25), 3, 3)
}

/// G G^dagger / Tr with G a dim x rank Ginibre matrix.
pub fn random_state_with(da: usize, db: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let dim = da * db;
    if rank == 0 || rank > dim {
        return Err(Error::Range(format!("rank {rank} outside 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()), da, db)
}

/// Ginibre-ensemble state of dimension `d` and rank at most `rank`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_state_with(d, 1, rank, &mut stream_rng(seed, 0))
}

/// sum_k p_k rho_k^A ⊗ rho_k^B with Dirichlet(1, ..., 1) weights; each local
/// factor is a Ginibre state of rank drawn uniformly from 1..=d.
pub fn random_separable_with(da: usize, db: usize, terms: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::Range("random separable state needs at least one term".into()));
    }
    if da == 0 || db == 0 {
        return Err(Error::Range("local dimensions must be positive".into()));
    }
    let raw: Vec<f64> = (0..terms).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let n = da * db;
    let mut m = ComplexMatrix::zeros(n, n);
    for w in raw {
        let ra = rng.gen_range(1..=da);
        let a = random_state_with(da, 1, ra, rng)?;
        let rb = rng.gen_range(1..=db);
        let b = random_state_with(db, 1, rb, rng)?;
        m = &m + &DensityMatrix::product(&a, &b).matrix().scale(w / total);
    }
    DensityMatrix::new(m.hermitian_part(), da, db)
}

pub fn random_separable(da: usize, db: usize, terms: usize, seed: u64) -> Result<DensityMatrix> {
    random_separable_with(da, db, terms, &mut stream_rng(seed, 0))
}

/// (1 - q) rho + q I / (dA dB).
pub fn noisy(rho: &DensityMatrix, q: f64) -> Result<DensityMatrix> {
    check_unit_interval("q", q)?;
    let n = rho.dim();
    let m = &rho.matrix().scale(1.0 - q) + &ComplexMatrix::identity(n).scale(q / n as f64);
    DensityMatrix::new(m, rho.da(), rho.db())
}

/// Named state families, as looked up by the command-line tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Bell,
    Werner2,
    Isotropic,
    Tiles,
    Random,
    RandomSeparable,
    NoisyBell,
}

impl StateFamily {
    pub const ALL: [StateFamily; 7] = [
        StateFamily::Bell,
        StateFamily::Werner2,
        StateFamily::Isotropic,
        StateFamily::Tiles,
        StateFamily::Random,
        StateFamily::RandomSeparable,
        StateFamily::NoisyBell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Bell => "bell",
            StateFamily::Werner2 => "werner2",
            StateFamily::Isotropic => "isotropic",
            StateFamily::Tiles => "tiles",
            StateFamily::Random => "random",
            StateFamily::RandomSeparable => "random-separable",
            StateFamily::NoisyBell => "noisy-bell",
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Range of the family parameter, or None for parameter-free families.
    pub fn param_range(self) -> Option<(f64, f64)> {
        match self {
            StateFamily::Werner2 | StateFamily::Isotropic | StateFamily::NoisyBell => Some((0.0, 1.0)),
            _ => None,
        }
    }

    /// Local dimensions for a requested `dim` (ignored by fixed-size families).
    pub fn local_dims(self, dim: usize) -> (usize, usize) {
        match self {
            StateFamily::Werner2 => (2, 2),
            StateFamily::Tiles => (3, 3),
            _ => (dim, dim),
        }
    }

    /// Draws the family member at `param`; `seed` only matters for the random families.
    pub fn generate(self, dim: usize, param: f64, seed: u64) -> Result<DensityMatrix> {
        if let Some((lo, hi)) = self.param_range() {
            if !(lo..=hi).contains(&param) {
                return Err(Error::Range(format!("{} parameter {param} outside [{lo}, {hi}]", self.name())));
            }
        }
        match self {
            StateFamily::Bell => bell_state(dim),
            StateFamily::Werner2 => werner2(param),
            StateFamily::Isotropic => isotropic(dim, param),
            StateFamily::Tiles => tiles_upb(),
            StateFamily::Random => {
                let mut rng = stream_rng(seed, 0);
                let rank = rng.gen_range(1..=dim * dim);
                random_state_with(dim, dim, rank, &mut rng)
            }
            StateFamily::RandomSeparable => random_separable(dim, dim, dim * dim, seed),
            StateFamily::NoisyBell => noisy(&bell_state(dim)?, param),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, Side};

    #[test]
    fn bell_state_properties() {
        let b = bell_state(2).unwrap();
        let marg = partial_trace(b.matrix(), 2, 2, Side::A).unwrap();
        assert!(marg.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        assert!((b.purity() - 1.0).abs() < 1e-12);
        assert!(bell_state(1).is_err());
    }

    #[test]
    fn werner_endpoints() {
        assert!(werner2(0.0).unwrap().matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
        assert!((werner2(1.0).unwrap().purity() - 1.0).abs() < 1e-12);
        assert!(matches!(werner2(1.5), Err(Error::Range(_))));
        assert!(matches!(werner2(-0.1), Err(Error::Range(_))));
    }

    #[test]
    fn isotropic_endpoints() {
        let d = 3;
        let mixed = isotropic(d, 1.0 / 9.0).unwrap();
        assert!(mixed.matrix().max_abs_diff(&ComplexMatrix::identity(9).scale(1.0 / 9.0)) < 1e-15);
        assert!(isotropic(d, 1.0).unwrap().matrix().max_abs_diff(bell_state(d).unwrap().matrix()) < 1e-15);
        assert!(isotropic(d, 1.2).is_err());
    }

    #[test]
    fn tiles_state_is_rank_four() {
        let t = tiles_upb().unwrap();
        assert!((t.matrix().trace().re - 1.0).abs() < 1e-12);
        let ev = t.eigen().eigenvalues;
        let nonzero = ev.iter().filter(|&&l| l > 1e-9).count();
        assert_eq!(nonzero, 4);
        assert!(ev.iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn random_density_contract() {
        let pure = random_density(4, 1, 3).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        assert_eq!(random_density(3, 2, 17).unwrap(), random_density(3, 2, 17).unwrap());
        let ev = random_density(5, 3, 2).unwrap().eigen().eigenvalues;
        assert!(ev.iter().all(|&l| l >= -1e-12));
        assert_eq!(ev.iter().filter(|&&l| l > 1e-10).count(), 3);
        assert!(random_density(3, 4, 1).is_err());
        assert!(random_density(3, 0, 1).is_err());
    }

    #[test]
    fn random_separable_contract() {
        assert!(random_separable(2, 2, 0, 1).is_err());
        let s = random_separable(2, 3, 4, 9).unwrap();
        assert_eq!((s.da(), s.db()), (2, 3));
        assert_eq!(s, random_separable(2, 3, 4, 9).unwrap());
        for side in [Side::A, Side::B] {
            let r = s.reduced(side);
            assert!(DensityMatrix::new(r.matrix().clone(), r.dim(), 1).is_ok());
        }
    }

    #[test]
    fn noise_shifts_spectrum() {
        let rho = random_density(4, 2, 5).unwrap();
        assert_eq!(noisy(&rho, 0.0).unwrap(), rho);
        let full = noisy(&rho, 1.0).unwrap();
        assert!(full.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
        let q = 0.3;
        let shifted = noisy(&rho, q).unwrap().eigen().eigenvalues;
        let expected: Vec<f64> = rho.eigen().eigenvalues.iter().map(|l| (1.0 - q) * l + q / 4.0).collect();
        for (a, b) in shifted.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(noisy(&rho, 2.0).is_err());
    }

    #[test]
    fn families_by_name() {
        for f in StateFamily::ALL {
            assert_eq!(StateFamily::by_name(f.name()), Some(f));
            let (lo, _) = f.param_range().unwrap_or((0.0, 0.0));
            let rho = f.generate(2, lo, 1).unwrap();
            assert_eq!((rho.da(), rho.db()), f.local_dims(2));
        }
        assert_eq!(StateFamily::by_name("horodecki"), None);
        assert!(StateFamily::Werner2.generate(2, 1.5, 0).is_err());
    }
}
