//! Sample statistics used to validate samplers.

/// Kendall's tau-b by Knight's O(n log n) merge-sort algorithm.
pub fn kendall_tau(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let pairs = |k: u64| k * (k.saturating_sub(1)) / 2;
    let n0 = pairs(n as u64);

    // ties in x, and joint ties
    let (mut tie_x, mut tie_xy) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for i in 1..n {
        if pts[i].0 == pts[i - 1].0 {
            run_x += 1;
            if pts[i].1 == pts[i - 1].1 {
                run_xy += 1;
            } else {
                tie_xy += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tie_x += pairs(run_x);
            tie_xy += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tie_x += pairs(run_x);
    tie_xy += pairs(run_xy);

    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tie_y = 0u64;
    let mut run_y = 1u64;
    for i in 1..n {
        if ys[i] == ys[i - 1] {
            run_y += 1;
        } else {
            tie_y += pairs(run_y);
            run_y = 1;
        }
    }
    tie_y += pairs(run_y);

    let num = n0 as f64 - tie_x as f64 - tie_y as f64 + tie_xy as f64 - 2.0 * swaps as f64;
    num / ((n0 - tie_x) as f64).sqrt() / ((n0 - tie_y) as f64).sqrt()
}

/// Sorts `v` ascending and returns the number of inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + (n - j)].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Empirical copula `#{Uᵢ ≤ u, Vᵢ ≤ v}/n`.
pub fn empirical_copula(points: &[(f64, f64)], u: f64, v: f64) -> f64 {
    let hits = points.iter().filter(|p| p.0 <= u && p.1 <= v).count();
    hits as f64 / points.len() as f64
}

/// Pearson correlation.
pub fn pearson(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tau(p: &[(f64, f64)]) -> f64 {
        let mut s = 0.0;
        let n = p.len();
        for i in 0..n {
            for j in i + 1..n {
                s += ((p[i].0 - p[j].0) * (p[i].1 - p[j].1)).signum();
            }
        }
        s / (n * (n - 1) / 2) as f64
    }

    #[test]
    fn knight_matches_brute_force() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = ((i * 37) % 101) as f64;
                let y = ((i * 53) % 97) as f64 + 0.3 * x;
                (x + i as f64 * 1e-3, y)
            })
            .collect();
        assert!((kendall_tau(&pts) - brute_tau(&pts)).abs() < 1e-12);
    }

    #[test]
    fn extremes() {
        let up: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let down: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, -(i as f64))).collect();
        assert_eq!(kendall_tau(&up), 1.0);
        assert_eq!(kendall_tau(&down), -1.0);
        assert!((pearson(&up) - 1.0).abs() < 1e-12);
        assert_eq!(empirical_copula(&up, 10.0, 100.0), 11.0 / 50.0);
    }
}
