//! Seeded generators of unimodular matrices and involutions with known
//! multiplicities, for property suites and the self-test.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::involution::InvolutionLattice;
use crate::matrix::IntegerMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for item `index` of a suite.
pub fn substream(seed: u64, suite: &str, index: u64) -> SeededRng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ h);
    r.set_stream(index);
    r
}

/// A random unimodular `n x n` matrix and its inverse.
///
/// Built from `mixing` random elementary operations (transvections with
/// multipliers in `-2..=2`, swaps and sign flips), so entries stay moderate.
pub fn unimodular<R: Rng>(n: usize, mixing: usize, rng: &mut R) -> (IntegerMatrix, IntegerMatrix) {
    let mut u = IntegerMatrix::identity(n);
    let mut inv = IntegerMatrix::identity(n);
    if n == 0 {
        return (u, inv);
    }
    for _ in 0..mixing {
        match rng.gen_range(0..10) {
            0 => {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                u.swap_rows(a, b);
                inv.swap_cols(a, b);
            }
            1 => {
                let a = rng.gen_range(0..n);
                u.negate_row(a);
                inv.negate_col(a);
            }
            _ if n > 1 => {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let f = BigInt::from([-2, -1, 1, 2][rng.gen_range(0..4)]);
                // u <- E u with E = I + f e_ab; inv <- inv E^-1
                u.add_row_multiple(a, b, &f);
                inv.add_col_multiple(b, a, &-f);
            }
            _ => {}
        }
    }
    (u, inv)
}

/// `U D U^-1` for the block involution `D` with the given multiplicities.
pub fn conjugated_involution<R: Rng>(
    n_trivial: usize,
    n_sign: usize,
    n_perm: usize,
    rng: &mut R,
) -> InvolutionLattice {
    let d = InvolutionLattice::standard(n_trivial, n_sign, n_perm);
    let n = d.rank();
    let (u, inv) = unimodular(n, 3 * n + 2, rng);
    let t = &(&u * d.matrix()) * &inv;
    InvolutionLattice::new(t).expect("conjugate of an involution is an involution")
}

/// Random multiplicities `(a, b, c)` with `a + b + 2c == rank`.
pub fn multiplicities<R: Rng>(rank: usize, rng: &mut R) -> (usize, usize, usize) {
    let c = rng.gen_range(0..=rank / 2);
    let rest = rank - 2 * c;
    let b = rng.gen_range(0..=rest);
    (rest - b, b, c)
}

/// Random element of the image of `m` with small coefficients.
pub fn image_element<R: Rng>(m: &IntegerMatrix, rng: &mut R) -> Vec<BigInt> {
    let coeffs: Vec<BigInt> = (0..m.cols()).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
    m.mul_vec(&coeffs)
}
