#![allow(dead_code)]

pub mod oracle;

use privsense::linalg::{ComplexMatrix, DensityMatrix, C64};
use privsense::SeedStream;
use rand::Rng;

/// `G G† / Tr` with `G` filled by uniform entries on the unit square.
pub fn random_density(n: usize, stream: SeedStream) -> DensityMatrix {
    let d = 1usize << n;
    let mut rng = stream.rng();
    let g: Vec<C64> = (0..d * d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let g = ComplexMatrix::new(d, d, g).unwrap();
    let m = g.matmul(&g.dagger()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / tr)).unwrap()
}

pub fn random_hermitian(d: usize, stream: SeedStream) -> ComplexMatrix {
    let mut rng = stream.rng();
    let g: Vec<C64> = (0..d * d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let g = ComplexMatrix::new(d, d, g).unwrap();
    g.add(&g.dagger()).unwrap().scale_re(0.5)
}
