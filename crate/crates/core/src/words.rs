//! Exponent words of a finitely generated abelian group, enumerated in
//! increasing L1 length and lexicographically within a length.

/// All exponent vectors in `[-bound, bound]^rank`, sorted by L1 length and
/// then lexicographically. The zero word comes first when `include_zero`.
pub fn words(rank: usize, bound: u32, include_zero: bool) -> Vec<Vec<i64>> {
    let b = i64::from(bound);
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-b; rank];
    if rank == 0 {
        return if include_zero { vec![Vec::new()] } else { Vec::new() };
    }
    loop {
        if include_zero || cur.iter().any(|&e| e != 0) {
            out.push(cur.clone());
        }
        let mut k = rank;
        loop {
            if k == 0 {
                out.sort_by(|x, y| l1(x).cmp(&l1(y)).then_with(|| x.cmp(y)));
                return out;
            }
            k -= 1;
            if cur[k] < b {
                cur[k] += 1;
                break;
            }
            cur[k] = -b;
        }
    }
}

pub fn l1(w: &[i64]) -> u64 {
    w.iter().map(|e| e.unsigned_abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_count() {
        let w = words(2, 1, false);
        assert_eq!(w.len(), 8);
        assert_eq!(w[0], vec![-1, 0]);
        assert_eq!(w[3], vec![1, 0]);
        assert!(w.windows(2).all(|p| l1(&p[0]) <= l1(&p[1])));
        assert_eq!(words(1, 2, true), vec![vec![0], vec![-1], vec![1], vec![-2], vec![2]]);
        assert_eq!(words(0, 3, false).len(), 0);
    }
}
