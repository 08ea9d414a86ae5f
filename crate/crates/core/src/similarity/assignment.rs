//! Maximum-gain linear assignment (Hungarian algorithm, O(n³)).

/// Rectangular matrix of gains in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl GainMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "gain matrix shape mismatch");
        debug_assert!(entries.iter().all(|g| g.is_finite() && (0.0..=1.0).contains(g)));
        Self { rows, cols, entries }
    }

    pub fn from_fn(rows: usize, cols: usize, mut gain: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(gain(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(rows.len(), cols, rows.iter().flatten().copied().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Matched `(row, col)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the matched gains, accumulated in row order.
    pub total_gain: f64,
}

/// Finds a one-to-one assignment of maximum total gain.
///
/// Non-square inputs are padded with zero-gain rows or columns; pairs that
/// land on padding are dropped. Every real row is matched when
/// `rows <= cols` (and vice versa).
pub fn optimal_assignment(m: &GainMatrix) -> Assignment {
    let n = m.rows.max(m.cols);
    if n == 0 {
        return Assignment {
            pairs: Vec::new(),
            total_gain: 0.0,
        };
    }
    let cost = |i: usize, j: usize| -> f64 {
        if i < m.rows && j < m.cols {
            -m.get(i, j)
        } else {
            0.0
        }
    };

    // Potentials-based shortest augmenting path, 1-indexed with a sentinel
    // column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_reduced = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_reduced[j] {
                    min_reduced[j] = reduced;
                    way[j] = j0;
                }
                if min_reduced[j] < delta {
                    delta = min_reduced[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_reduced[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![usize::MAX; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            col_of_row[matched_row[j] - 1] = j - 1;
        }
    }
    let pairs: Vec<(usize, usize)> = col_of_row
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < m.rows && j < m.cols)
        .map(|(i, &j)| (i, j))
        .collect();
    let total_gain = pairs.iter().map(|&(i, j)| m.get(i, j)).sum();
    Assignment { pairs, total_gain }
}
