//! Backtracking search for structure-preserving bijections between two
//! `n x n` key matrices. Shared by isometry and weak-similarity tests.

/// The lexicographically first bijection `phi` with
/// `a[i][j] == b[phi(i)][phi(j)]` for all `i, j`, or `None`.
///
/// Both slices are row-major `n x n`. Points are only matched when their
/// sorted rows agree as multisets.
pub(crate) fn first_bijection<T: Ord>(n: usize, a: &[T], b: &[T]) -> Option<Vec<usize>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * n);

    let pa: Vec<_> = (0..n).map(|i| profile(a, n, i)).collect();
    let pb: Vec<_> = (0..n).map(|i| profile(b, n, i)).collect();

    let mut pa_sorted: Vec<_> = pa.clone();
    let mut pb_sorted: Vec<_> = pb.clone();
    pa_sorted.sort();
    pb_sorted.sort();
    if pa_sorted != pb_sorted {
        return None;
    }

    let candidates: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| pa[i] == pb[j]).collect()).collect();

    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(0, n, a, b, &candidates, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}

fn profile<T: Ord>(m: &[T], n: usize, i: usize) -> Vec<&T> {
    let mut row: Vec<&T> = m[i * n..(i + 1) * n].iter().collect();
    row.sort();
    row
}

fn extend<T: Ord>(
    i: usize,
    n: usize,
    a: &[T],
    b: &[T],
    candidates: &[Vec<usize>],
    phi: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == n {
        return true;
    }
    for &j in &candidates[i] {
        if used[j] {
            continue;
        }
        let consistent = (0..i).all(|k| a[i * n + k] == b[j * n + phi[k]]);
        if !consistent {
            continue;
        }
        phi[i] = j;
        used[j] = true;
        if extend(i + 1, n, a, b, candidates, phi, used) {
            return true;
        }
        used[j] = false;
    }
    phi[i] = usize::MAX;
    false
}
