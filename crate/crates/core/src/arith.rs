//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here is fraction-free or uses big rationals; no floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p` or `p/q`.
pub fn rat_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Shift large values into range before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        return if n.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i128]) -> Vec<i64> {
    let g = v.iter().fold(0i128, |g, &x| gcd_i128(g, x));
    if g == 0 {
        return v.iter().map(|&x| x as i64).collect();
    }
    v.iter().map(|&x| i64::try_from(x / g).expect("entry fits in i64")).collect()
}

/// Rank over the rationals (fraction-free elimination).
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let a = m[r][c];
                let b = m[i][c];
                let g = gcd_i128(a, b);
                let (fa, fb) = (a / g, b / g);
                for k in 0..ncols {
                    m[i][k] = fa * m[i][k] - fb * m[r][k];
                }
                let rg = m[i].iter().fold(0i128, |g, &x| gcd_i128(g, x));
                if rg > 1 {
                    m[i].iter_mut().for_each(|x| *x /= rg);
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Inverse of a square integer matrix over the rationals, `None` when singular.
pub fn inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| rat(x)).collect();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let t = &f * &a[c][k];
                    a[i][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_from_rational(v: &[Rational]) -> Vec<i64> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            y.to_i64().expect("entry fits in i64")
        })
        .collect()
}

/// A Z-basis of `{x in Z^ncols : rows * x = 0}`.
///
/// Column operations are accumulated in a unimodular matrix; the columns that
/// end up multiplying to zero span the integral kernel. The result is put in
/// reduced row-echelon (Hermite) form so it is canonical.
pub fn integer_kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for row in a.iter_mut() {
            row[dst] -= f * row[src];
        }
        for row in u.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    let swap = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut col = 0;
    for i in 0..a.len() {
        if col >= ncols {
            break;
        }
        loop {
            // Smallest nonzero entry among columns col.. becomes the pivot.
            let piv = (col..ncols).filter(|&c| a[i][c] != 0).min_by_key(|&c| a[i][c].abs());
            let Some(p) = piv else { break };
            swap(&mut a, &mut u, col, p);
            let mut done = true;
            for c in col + 1..ncols {
                if a[i][c] != 0 {
                    let f = a[i][c].div_euclid(a[i][col]);
                    col_op(&mut a, &mut u, c, col, f);
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                col += 1;
                break;
            }
        }
    }
    let basis: Vec<Vec<i128>> = (col..ncols).map(|c| u.iter().map(|row| row[c]).collect()).collect();
    hermite_rows(basis)
}

/// Row Hermite normal form of a full-row-rank integer basis.
pub fn hermite_rows(mut b: Vec<Vec<i128>>) -> Vec<Vec<i64>> {
    if b.is_empty() {
        return Vec::new();
    }
    let ncols = b[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == b.len() {
            break;
        }
        loop {
            let piv = (r..b.len()).filter(|&i| b[i][c] != 0).min_by_key(|&i| b[i][c].abs());
            let Some(p) = piv else { break };
            b.swap(r, p);
            let mut done = true;
            for i in r + 1..b.len() {
                if b[i][c] != 0 {
                    let f = b[i][c].div_euclid(b[r][c]);
                    for k in 0..ncols {
                        b[i][k] -= f * b[r][k];
                    }
                    if b[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if (r..b.len()).all(|i| b[i][c] == 0) {
            continue;
        }
        if b[r][c] < 0 {
            b[r].iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..r {
            let f = b[i][c].div_euclid(b[r][c]);
            if f != 0 {
                for k in 0..ncols {
                    b[i][k] -= f * b[r][k];
                }
            }
        }
        r += 1;
    }
    b.into_iter()
        .filter(|row| row.iter().any(|&x| x != 0))
        .map(|row| row.into_iter().map(|x| i64::try_from(x).expect("entry fits in i64")).collect())
        .collect()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn abs_rat(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_rank() {
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(det(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]), -3);
        assert_eq!(rank(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 2y = 0 has kernel spanned by (1, 1), not (2, 2).
        let k = integer_kernel(&[vec![2, -2]], 2);
        assert_eq!(k, vec![vec![1, 1]]);
        let k = integer_kernel(&[vec![1, 1, 1]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(dot(v, &[1, 1, 1]), 0);
        }
        assert_eq!(integer_kernel(&[], 2), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(rat_frac(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rat(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(rat_to_string(&rat_frac(-2, 4)), "-1/2");
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[1][0], rat(-1));
        assert!(inverse(&[vec![1, 2], vec![2, 4]]).is_none());
    }
}
