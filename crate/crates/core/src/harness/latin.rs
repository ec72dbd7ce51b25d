use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Row `r` of the standard `n x n` Latin square: a Williams design for
/// even `n`, the cyclic square for odd `n`.
fn base_row(n: usize, r: usize) -> Vec<usize> {
    if n.is_multiple_of(2) {
        let mut first = Vec::with_capacity(n);
        let (mut lo, mut hi) = (0usize, n - 1);
        for k in 0..n {
            if k % 2 == 0 {
                first.push(lo);
                lo += 1;
            } else {
                first.push(hi);
                hi -= 1;
            }
        }
        first.into_iter().map(|c| (c + r) % n).collect()
    } else {
        (0..n).map(|c| (c + r) % n).collect()
    }
}

/// Condition orders for each participant. Condition labels are shuffled
/// once with `seed`; rows cycle when there are more participants than
/// conditions.
pub fn latin_square_orders(n_conditions: usize, n_participants: usize, seed: u64) -> Vec<Vec<usize>> {
    if n_conditions == 0 {
        return vec![Vec::new(); n_participants];
    }
    let mut labels: Vec<usize> = (0..n_conditions).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (0..n_participants)
        .map(|p| base_row(n_conditions, p % n_conditions).into_iter().map(|c| labels[c]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_latin(rows: &[Vec<usize>]) -> bool {
        let n = rows.len();
        let rows_ok = rows.iter().all(|r| {
            let mut s = r.clone();
            s.sort();
            s == (0..n).collect::<Vec<_>>()
        });
        let cols_ok = (0..n).all(|c| {
            let mut s: Vec<usize> = rows.iter().map(|r| r[c]).collect();
            s.sort();
            s == (0..n).collect::<Vec<_>>()
        });
        rows_ok && cols_ok
    }

    #[test]
    fn single_condition() {
        assert_eq!(latin_square_orders(1, 3, 0), vec![vec![0]; 3]);
    }

    #[test]
    fn three_conditions_are_latin() {
        let rows = latin_square_orders(3, 3, 42);
        assert!(is_latin(&rows));
    }

    #[test]
    fn williams_four_is_carryover_balanced() {
        let rows = latin_square_orders(4, 4, 7);
        assert!(is_latin(&rows));
        let mut follows = [[0; 4]; 4];
        for r in &rows {
            for w in r.windows(2) {
                follows[w[0]][w[1]] += 1;
            }
        }
        for (a, row) in follows.iter().enumerate() {
            for (b, &count) in row.iter().enumerate() {
                assert_eq!(count, usize::from(a != b), "{a} -> {b}");
            }
        }
    }

    #[test]
    fn rows_cycle() {
        let rows = latin_square_orders(9, 21, 1);
        assert_eq!(rows[0], rows[9]);
        assert_eq!(rows[2], rows[20]);
        assert!(is_latin(&rows[..9]));
    }
}
