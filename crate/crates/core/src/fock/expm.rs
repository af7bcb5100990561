//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use nalgebra::DMatrix;

use super::C64;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the unscaled [13/13] approximant meets unit
// roundoff.
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` for a dense complex square matrix.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    let ident = DMatrix::<C64>::identity(n, n);
    let nrm = norm1(m);
    if nrm == 0.0 {
        return ident;
    }
    let squarings = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(squarings));

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &ident * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &ident * b(0);

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    // Truncated Taylor series with many terms; independent of the Padé path.
    fn taylor(m: &DMatrix<C64>, terms: usize) -> DMatrix<C64> {
        let n = m.nrows();
        let mut acc = DMatrix::<C64>::identity(n, n);
        let mut term = DMatrix::<C64>::identity(n, n);
        for k in 1..terms {
            term = &term * m / C64::new(k as f64, 0.0);
            acc += &term;
        }
        acc
    }

    #[test]
    fn zero_gives_identity() {
        let z = DMatrix::<C64>::zeros(5, 5);
        assert_eq!(expm(&z), DMatrix::identity(5, 5));
    }

    #[test]
    fn matches_taylor_for_moderate_norm() {
        let n = 6;
        let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 * 0.1 - 0.2, ((i + 2 * j) % 3) as f64 * 0.07)
        });
        let e = expm(&m);
        let t = taylor(&m, 60);
        let err = (&e - &t).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn scaling_path_for_large_norm() {
        // exp(diag(x)) for large entries exercises the squaring loop
        let m = DMatrix::<C64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 20.0),
            C64::new(-3.0, 1.0),
            C64::new(2.5, -7.0),
        ]));
        let e = expm(&m);
        for i in 0..3 {
            let want = m[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }
}
