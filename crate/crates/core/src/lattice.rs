//! Integer lattice enumeration for torus spectra.
//!
//! Radial sums over `Z^d` are compressed to orbits of the hyperoctahedral
//! group: only sorted non-negative tuples `n_1 >= n_2 >= ... >= n_d >= 0` are
//! visited and each carries the size of its orbit.

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Orbit size of a sorted non-negative tuple under sign changes and
/// coordinate permutations.
pub fn orbit_size(sorted_desc: &[u64]) -> u64 {
    let nonzero = sorted_desc.iter().filter(|&&x| x != 0).count();
    let mut denom = 1u64;
    let mut i = 0;
    while i < sorted_desc.len() {
        let mut j = i;
        while j < sorted_desc.len() && sorted_desc[j] == sorted_desc[i] {
            j += 1;
        }
        denom *= factorial(j - i);
        i = j;
    }
    (factorial(sorted_desc.len()) / denom) << nonzero
}

/// Visits every sorted tuple of length `d` whose leading entry is `first`
/// and whose squared norm is at most `max_norm_sq`. The callback receives the
/// squared norm and the orbit size.
pub fn for_each_orbit<F: FnMut(u64, u64)>(d: usize, first: u64, max_norm_sq: u64, mut f: F) {
    let head = first * first;
    if head > max_norm_sq || d == 0 {
        return;
    }
    let mut tuple = vec![0u64; d];
    tuple[0] = first;
    fn rec<F: FnMut(u64, u64)>(
        tuple: &mut Vec<u64>,
        pos: usize,
        cap: u64,
        acc: u64,
        max: u64,
        f: &mut F,
    ) {
        if pos == tuple.len() {
            f(acc, orbit_size(tuple));
            return;
        }
        let mut v = 0;
        while v <= cap && acc + v * v <= max {
            tuple[pos] = v;
            rec(tuple, pos + 1, v, acc + v * v, max, f);
            v += 1;
        }
        tuple[pos] = 0;
    }
    rec(&mut tuple, 1, first, head, max_norm_sq, &mut f);
}

/// Visits every lattice point of `Z^d` with `n_1 = first` and squared norm at
/// most `max_norm_sq`, in lexicographic order of the remaining coordinates.
pub fn for_each_point<F: FnMut(&[i64], u64)>(d: usize, first: i64, max_norm_sq: u64, mut f: F) {
    let head = (first * first) as u64;
    if head > max_norm_sq || d == 0 {
        return;
    }
    let mut point = vec![0i64; d];
    point[0] = first;
    fn rec<F: FnMut(&[i64], u64)>(point: &mut Vec<i64>, pos: usize, acc: u64, max: u64, f: &mut F) {
        if pos == point.len() {
            f(point, acc);
            return;
        }
        let r = isqrt(max - acc) as i64;
        for v in -r..=r {
            point[pos] = v;
            rec(point, pos + 1, acc + (v * v) as u64, max, f);
        }
        point[pos] = 0;
    }
    rec(&mut point, 1, head, max_norm_sq, &mut f);
}

/// Upper bound on the number of lattice points with squared norm at most `j`.
pub fn point_count_bound(d: usize, j: u64) -> f64 {
    (2.0 * (j as f64).sqrt() + 1.0).powi(d as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(d: usize, max: u64) -> (u64, u64) {
        let r = isqrt(max) as i64;
        let mut count = 0;
        let mut norm_total = 0;
        for first in -r..=r {
            for_each_point(d, first, max, |_, n| {
                count += 1;
                norm_total += n;
            });
        }
        (count, norm_total)
    }

    #[test]
    fn orbit_enumeration_reproduces_full_enumeration() {
        for d in 1..=3 {
            for max in [0u64, 1, 7, 50, 123] {
                let mut count = 0;
                let mut norm_total = 0;
                for first in 0..=isqrt(max) {
                    for_each_orbit(d, first, max, |n, mult| {
                        count += mult;
                        norm_total += n * mult;
                    });
                }
                assert_eq!((count, norm_total), brute_count(d, max), "d={d} max={max}");
            }
        }
    }

    #[test]
    fn isqrt_is_floor() {
        for n in 0..10_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(orbit_size(&[0, 0]), 1);
        assert_eq!(orbit_size(&[1, 0]), 4);
        assert_eq!(orbit_size(&[1, 1]), 4);
        assert_eq!(orbit_size(&[2, 1]), 8);
        assert_eq!(orbit_size(&[3, 2, 1]), 48);
    }
}
